#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gateaux/derivative.hpp"
#include "gateaux/io.hpp"
#include "gateaux/linalg.hpp"
#include "gateaux/orthogonality.hpp"
#include "gateaux/povm.hpp"
#include "gateaux/selftest.hpp"
#include "gateaux/types.hpp"

namespace {

using namespace gateaux;

constexpr int kExitOk = 0;
constexpr int kExitNegative = 1;        // NotOrthogonal / invalid measure
constexpr int kExitInput = 2;           // parse or shape failure
constexpr int kExitVerification = 3;    // internal certificate re-check failed
constexpr int kExitIndeterminate = 4;   // margin instance, honest abstention
constexpr int kExitSelftest = 5;        // property suite failure

// Flag wins over the GATEAUX_TOL environment variable, which wins over the
// built-in default.
double resolve_tol(bool flag_given, double flag_value, double dflt) {
  if (flag_given) return flag_value;
  if (const char* env = std::getenv("GATEAUX_TOL")) {
    try {
      return std::stod(env);
    } catch (...) {
      throw InvalidInput("GATEAUX_TOL is not a number");
    }
  }
  return dflt;
}

Json matrix_input(const std::string& path, const Mat& m) {
  Json j;
  j["path"] = path;
  j["digest"] = json_digest(matrix_to_json(m));
  return j;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Orthogonal:
      return "Orthogonal";
    case Verdict::NotOrthogonal:
      return "NotOrthogonal";
    default:
      return "Indeterminate";
  }
}

std::string self_path(const char* argv0) {
  char buf[4096];
  ssize_t len = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (len > 0) {
    buf[len] = '\0';
    return std::string(buf);
  }
  return argv0 ? std::string(argv0) : std::string();
}

int cmd_derivative(const std::string& a_path, const std::string& b_path,
                   bool phase_given, double phase, bool fd_check,
                   bool inject_fault, bool tol_given, double tol_value,
                   std::uint64_t seed) {
  Mat a = read_matrix_file(a_path);
  Mat b = read_matrix_file(b_path);
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "shape mismatch: A is " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + ", B is " + std::to_string(b.rows()) +
              "x" + std::to_string(b.cols()));
  double cert_tol = resolve_tol(tol_given, tol_value, 1e-8);
  Mat b_eff = phase_given ? Mat(std::polar(1.0, phase) * b) : b;

  DerivativeResult res = gd_opnorm(a, b_eff);
  if (inject_fault) res.certificate *= 2.0;  // deliberately break the certificate

  double na = op_norm(a);
  const Vec& eta = res.certificate;
  double unit_res = std::abs(eta.norm() - 1.0);
  double att_res, pair_res;
  if (na == 0.0) {
    att_res = std::abs((b_eff * eta).norm() - res.value);
    pair_res = 0.0;
  } else {
    att_res = std::abs((a * eta).norm() - na);
    pair_res = std::abs(((a * eta).dot(b_eff * eta)).real() / na - res.value);
  }
  bool verified = unit_res <= cert_tol &&
                  att_res <= cert_tol * std::max(1.0, na) &&
                  pair_res <= cert_tol * std::max(1.0, op_norm(b_eff));

  Json report;
  report["command"] = "derivative";
  report["inputs"]["A"] = matrix_input(a_path, a);
  report["inputs"]["B"] = matrix_input(b_path, b);
  report["seed"] = seed;
  report["tolerances"] = {{"certificate", cert_tol}, {"fd", 1e-7}};
  report["value"] = res.value;
  if (phase_given) report["phase"] = phase;
  report["certificate"]["eta"] = vector_to_json(eta);
  report["certificate"]["residuals"] = {
      {"unit", unit_res}, {"attainment", att_res}, {"pairing", pair_res}};
  report["certificate"]["verified"] = verified;
  if (fd_check) {
    auto [oracle, trace] = gd_fd_oracle(a, b_eff, 1e-7);
    report["fd_check"] = {{"oracle", oracle},
                          {"delta", res.value - oracle},
                          {"steps", trace.steps.size()}};
  }
  std::cout << report.dump(2) << "\n";
  if (!verified) {
    std::cerr << "derivative certificate failed re-verification: unit "
              << unit_res << ", attainment " << att_res << ", pairing "
              << pair_res << " against tolerance " << cert_tol << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_orthogonal(const std::string& a_path, const std::string& b_path,
                   const std::string& subspace_dir, bool tol_given,
                   double tol_value, std::uint64_t seed) {
  namespace fs = std::filesystem;
  Mat a = read_matrix_file(a_path);
  Json report;
  report["command"] = "orthogonal";
  report["inputs"]["A"] = matrix_input(a_path, a);
  report["seed"] = seed;

  OrthogonalityDecision dec;
  double na = op_norm(a);
  if (!b_path.empty()) {
    double tol = resolve_tol(tol_given, tol_value, 1e-8);
    report["mode"] = "pair";
    report["tolerances"] = {{"certificate", tol}};
    Mat b = read_matrix_file(b_path);
    require(a.rows() == b.rows() && a.cols() == b.cols(),
            "shape mismatch between A and B");
    report["inputs"]["B"] = matrix_input(b_path, b);
    dec = bj_pair(a, b, tol);
    report["verdict"] = verdict_name(dec.verdict);
    if (dec.verdict == Verdict::Orthogonal && dec.eta) {
      double r_pair = std::abs((a * *dec.eta).dot(b * *dec.eta));
      double r_att = std::abs((a * *dec.eta).norm() - na);
      report["certificate"]["eta"] = vector_to_json(*dec.eta);
      report["certificate"]["residuals"] = {{"pairing", r_pair},
                                            {"attainment", r_att}};
    } else if (dec.verdict == Verdict::NotOrthogonal && dec.lambda) {
      double achieved = op_norm(a + *dec.lambda * b);
      report["witness"]["lambda"] = {{"re", dec.lambda->real()},
                                     {"im", dec.lambda->imag()}};
      report["witness"]["achieved_norm"] = achieved;
      report["witness"]["decrease"] = na - achieved;
    }
  } else {
    double tol = resolve_tol(tol_given, tol_value, 1e-6);
    report["mode"] = "subspace";
    report["tolerances"] = {{"certificate", tol}};
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(subspace_dir, ec))
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    require(!ec, "cannot read directory: " + subspace_dir);
    require(!files.empty(),
            "no .json matrix files in directory: " + subspace_dir);
    std::sort(files.begin(), files.end());
    std::vector<Mat> b_list;
    report["inputs"]["subspace"] = Json::array();
    for (const fs::path& p : files) {
      Mat bj = read_matrix_file(p.string());
      require(bj.rows() == a.rows() && bj.cols() == a.cols(),
              "shape mismatch between A and " + p.string());
      report["inputs"]["subspace"].push_back(matrix_input(p.string(), bj));
      b_list.push_back(bj);
    }
    dec = bj_subspace(a, b_list, tol, seed);
    report["verdict"] = verdict_name(dec.verdict);
    if (dec.verdict == Verdict::Orthogonal && dec.rho) {
      const Mat& rho = dec.rho->matrix;
      double r_att =
          std::abs((rho * (a.adjoint() * a)).trace().real() - na * na);
      double worst = 0.0;
      for (const Mat& bj : b_list)
        worst = std::max(worst,
                         std::abs((rho * (a.adjoint() * bj)).trace()));
      report["certificate"]["rho"] = matrix_to_json(rho);
      report["certificate"]["residuals"] = {{"attainment", r_att},
                                            {"worst_annihilation", worst}};
    } else if (dec.verdict == Verdict::NotOrthogonal && dec.witness &&
               dec.coefficients) {
      double achieved = op_norm(a - *dec.witness);
      report["witness"]["coefficients"] = vector_to_json(*dec.coefficients);
      report["witness"]["achieved_norm"] = achieved;
      report["witness"]["decrease"] = na - achieved;
    }
  }
  if (!dec.note.empty()) report["note"] = dec.note;
  std::cout << report.dump(2) << "\n";
  switch (dec.verdict) {
    case Verdict::Orthogonal:
      return kExitOk;
    case Verdict::NotOrthogonal:
      return kExitNegative;
    default:
      std::cerr << "indeterminate: " << dec.note << "\n";
      return kExitIndeterminate;
  }
}

int cmd_povm_validate(const std::string& path) {
  FinitePovm nu = read_povm_file(path);
  PovmValidation val = validate_povm(nu);
  Json report;
  report["command"] = "povm validate";
  report["inputs"]["measure"] = {{"path", path},
                                 {"digest", json_digest(povm_to_json(nu))}};
  report["valid_povm"] = val.valid_povm;
  report["quantum_probability"] = val.quantum_probability;
  report["violations"] = val.violations;
  report["total_spectrum"] = Json::array();
  for (Index i = 0; i < val.total_spectrum.size(); ++i)
    report["total_spectrum"].push_back(val.total_spectrum(i));
  std::cout << report.dump(2) << "\n";
  if (!val.valid_povm) {
    for (const std::string& v : val.violations) std::cerr << v << "\n";
    return kExitNegative;
  }
  return kExitOk;
}

int cmd_povm_integrate(const std::string& measure_path,
                       const std::string& function_path) {
  FinitePovm nu = read_povm_file(measure_path);
  std::map<std::string, cplx> f = read_scalar_function_file(function_path);
  Mat result = integrate_scalar(f, nu);
  Json report;
  report["command"] = "povm integrate";
  report["inputs"]["measure"] = {{"path", measure_path},
                                 {"digest", json_digest(povm_to_json(nu))}};
  report["inputs"]["function"] = {
      {"path", function_path},
      {"digest", json_digest(read_json_file(function_path))}};
  report["result"] = matrix_to_json(result);
  std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_selftest(std::uint64_t seed, int count, bool inject_fault,
                 const std::string& cli) {
  SelftestOptions opt;
  opt.seed = seed;
  opt.count = count;
  opt.inject_fault = inject_fault;
  opt.cli_path = cli;
  if (count == 0)
    std::cerr << "warning: --count 0 requested, every suite is a vacuous pass"
              << "\n";
  std::vector<SuiteResult> suites = run_selftest(opt);
  Json report;
  report["command"] = "selftest";
  report["seed"] = seed;
  report["count"] = count;
  report["suites"] = Json::array();
  bool all_pass = true;
  std::vector<std::string> failed_names;
  for (const SuiteResult& s : suites) {
    std::cerr << "suite " << s.name << ": " << (s.pass ? "PASS" : "FAIL")
              << " (checked " << s.checked << ", failed " << s.failed << ") "
              << s.detail << "\n";
    report["suites"].push_back({{"name", s.name},
                                {"pass", s.pass},
                                {"checked", s.checked},
                                {"failed", s.failed},
                                {"detail", s.detail}});
    if (!s.pass) {
      all_pass = false;
      failed_names.push_back(s.name);
    }
  }
  report["all_pass"] = all_pass;
  std::cout << report.dump(2) << "\n";
  if (!all_pass) {
    std::string joined;
    for (const std::string& n : failed_names)
      joined += (joined.empty() ? "" : ", ") + n;
    std::cerr << "selftest failed in: " << joined << "; reproduce with --seed "
              << seed << "\n";
    return kExitSelftest;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Operator norm derivatives, orthogonality certificates, and "
      "operator-valued measures"};
  app.require_subcommand(1);

  std::string a_path, b_path, subspace_dir, povm_path, function_path;
  double phase = 0.0, tol_value = 0.0;
  bool fd_check = false, inject_fault = false;
  std::uint64_t seed = 20260819ull;
  std::uint64_t selftest_seed = 1ull;
  int count = -1;

  CLI::App* deriv = app.add_subcommand(
      "derivative", "One-sided derivative of the operator norm at A toward B");
  deriv->add_option("--A", a_path, "base matrix file")->required();
  deriv->add_option("--B", b_path, "direction matrix file")->required();
  CLI::Option* phase_opt = deriv->add_option(
      "--phase", phase, "rotate the direction by exp(i phase)");
  deriv->add_flag("--fd-check", fd_check,
                  "cross-check against the difference-quotient oracle");
  deriv->add_flag("--inject-fault", inject_fault,
                  "corrupt the certificate to exercise the verification path");
  CLI::Option* dtol_opt =
      deriv->add_option("--tol", tol_value, "certificate tolerance");
  deriv->add_option("--seed", seed, "seed echoed into the report");

  CLI::App* orth = app.add_subcommand(
      "orthogonal", "Decide norm orthogonality with a certificate");
  orth->add_option("--A", a_path, "base matrix file")->required();
  CLI::Option* b_opt = orth->add_option("--B", b_path, "pair partner file");
  CLI::Option* sub_opt = orth->add_option(
      "--subspace", subspace_dir, "directory of matrix files spanning the subspace");
  b_opt->excludes(sub_opt);
  CLI::Option* otol_opt =
      orth->add_option("--tol", tol_value, "certificate tolerance");
  orth->add_option("--seed", seed, "seed for the witness search");

  CLI::App* povm = app.add_subcommand(
      "povm", "Validate or integrate finite operator-valued measures");
  povm->require_subcommand(1);
  CLI::App* pval = povm->add_subcommand("validate", "check effects and total");
  pval->add_option("measure", povm_path, "measure file")->required();
  CLI::App* pint =
      povm->add_subcommand("integrate", "integrate a scalar function");
  pint->add_option("measure", povm_path, "measure file")->required();
  pint->add_option("function", function_path, "scalar function file")
      ->required();

  CLI::App* self = app.add_subcommand(
      "selftest", "Run the property-suite battery against built-in oracles");
  self->add_option("--seed", selftest_seed, "suite seed");
  self->add_option("--count", count,
                   "instances per randomized suite (0 = vacuous pass)");
  self->add_flag("--inject-fault", inject_fault,
                 "append a forced failure to exercise the exit path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (deriv->parsed())
      return cmd_derivative(a_path, b_path, phase_opt->count() > 0, phase,
                            fd_check, inject_fault, dtol_opt->count() > 0,
                            tol_value, seed);
    if (orth->parsed()) {
      require(b_opt->count() > 0 || sub_opt->count() > 0,
              "orthogonal needs --B or --subspace");
      return cmd_orthogonal(a_path, b_opt->count() > 0 ? b_path : "",
                            subspace_dir, otol_opt->count() > 0, tol_value,
                            seed);
    }
    if (povm->parsed()) {
      if (pval->parsed()) return cmd_povm_validate(povm_path);
      return cmd_povm_integrate(povm_path, function_path);
    }
    if (self->parsed())
      return cmd_selftest(selftest_seed, count, inject_fault,
                          self_path(argv[0]));
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DegenerateInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failure: " << e.what() << "\n";
    return kExitVerification;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitInput;
}
