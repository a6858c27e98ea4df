#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gateaux/io.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  Json report;
  bool has_report = false;
  std::string err_text;
};

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("gateaux_test_cli_" +
                  std::to_string(static_cast<unsigned long>(::getpid())));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome run(const std::string& args, const std::string& tag) {
  fs::path out = work_dir() / (tag + ".out.json");
  fs::path err = work_dir() / (tag + ".err.txt");
  std::string cmd = std::string("\"") + GATEAUX_CLI_PATH + "\" " + args +
                    " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
  int rc = std::system(cmd.c_str());
  Outcome o;
  if (rc != -1 && WIFEXITED(rc)) o.code = WEXITSTATUS(rc);
  std::ifstream ein(err);
  std::stringstream ss;
  ss << ein.rdbuf();
  o.err_text = ss.str();
  std::ifstream jin(out);
  if (jin.good()) {
    try {
      jin >> o.report;
      o.has_report = true;
    } catch (...) {
    }
  }
  return o;
}

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("derivative worked example round-trips through the binary") {
  Mat i2 = Mat::Identity(2, 2);
  Mat sig = Mat::Zero(2, 2);
  sig(0, 0) = 1.0;
  sig(1, 1) = -1.0;
  write_matrix_file((work_dir() / "a.json").string(), i2);
  write_matrix_file((work_dir() / "b.json").string(), sig);
  Outcome o = run("derivative --A " + q(work_dir() / "a.json") + " --B " +
                      q(work_dir() / "b.json"),
                  "deriv");
  CHECK(o.code == 0);
  REQUIRE(o.has_report);
  CHECK(std::abs(o.report["value"].get<double>() - 1.0) <= 1e-12);
  CHECK(o.report["command"] == "derivative");
  Vec eta = vector_from_json(o.report["certificate"]["eta"]);
  CHECK(std::abs(eta.norm() - 1.0) <= 1e-10);
}

TEST_CASE("non-orthogonal pair exits one with a verified witness") {
  Mat rank1 = Mat::Zero(2, 2);
  rank1(0, 0) = 1.0;
  write_matrix_file((work_dir() / "rank1.json").string(), rank1);
  write_matrix_file((work_dir() / "id.json").string(), Mat::Identity(2, 2));
  Outcome o = run("orthogonal --A " + q(work_dir() / "rank1.json") + " --B " +
                      q(work_dir() / "id.json"),
                  "orth");
  CHECK(o.code == 1);
  REQUIRE(o.has_report);
  CHECK(o.report["verdict"] == "NotOrthogonal");
  CHECK(std::abs(o.report["witness"]["lambda"]["re"].get<double>() + 0.5) <=
        1e-6);
  CHECK(std::abs(o.report["witness"]["achieved_norm"].get<double>() - 0.5) <=
        1e-6);
}

TEST_CASE("invalid measure exits one, missing file exits two") {
  Json bad;
  bad["labels"] = {"p", "q"};
  bad["dim"] = 2;
  bad["effects"]["p"]["re"] = {{1.0, 0.0}, {0.0, 1.0}};
  bad["effects"]["q"]["re"] = {{1.0, 0.0}, {0.0, 1.0}};
  {
    std::ofstream out(work_dir() / "povm_bad.json");
    out << bad.dump(2) << "\n";
  }
  Outcome invalid =
      run("povm validate " + q(work_dir() / "povm_bad.json"), "pbad");
  CHECK(invalid.code == 1);
  REQUIRE(invalid.has_report);
  CHECK(invalid.report["valid_povm"] == false);

  Outcome missing =
      run("povm validate " + q(work_dir() / "absent.json"), "pmiss");
  CHECK(missing.code == 2);
}

TEST_CASE("vacuous selftest exits zero with a warning") {
  Outcome o = run("selftest --count 0", "self0");
  CHECK(o.code == 0);
  CHECK(o.err_text.find("vacuous") != std::string::npos);
  REQUIRE(o.has_report);
  CHECK(o.report["all_pass"] == true);
}

TEST_CASE("injected selftest fault exits five and names the suite") {
  Outcome o = run("selftest --count 0 --inject-fault", "selff");
  CHECK(o.code == 5);
  CHECK(o.err_text.find("injected_fault") != std::string::npos);
}
