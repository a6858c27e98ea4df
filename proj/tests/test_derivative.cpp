#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gateaux/derivative.hpp"
#include "gateaux/linalg.hpp"
#include "gateaux/opspace.hpp"
#include "gateaux/random.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;

namespace {
Mat diag2(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}
}  // namespace

TEST_CASE("derivative at the identity toward a hermitian direction") {
  DerivativeResult res = gd_opnorm(Mat::Identity(2, 2), diag2(1.0, -1.0));
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(res.certificate.norm() - 1.0) <= 1e-12);
}

TEST_CASE("derivative vanishes when the direction misses the top subspace") {
  DerivativeResult res = gd_opnorm(diag2(2.0, 1.0), diag2(0.0, 5.0));
  CHECK(std::abs(res.value) <= 1e-14);
}

TEST_CASE("derivative toward the base itself is the norm") {
  Rng rng(41);
  Mat a = rng.gaussian(5, 5);
  double na = op_norm(a);
  CHECK(gd_opnorm(a, a).value == doctest::Approx(na).epsilon(1e-11));
  CHECK(gd_phase(a, a, std::numbers::pi) == doctest::Approx(-na).epsilon(1e-11));
}

TEST_CASE("derivative at zero base is the direction norm") {
  Rng rng(43);
  Mat b = rng.gaussian(4, 4);
  DerivativeResult res = gd_opnorm(Mat::Zero(4, 4), b);
  CHECK(res.value == doctest::Approx(op_norm(b)).epsilon(1e-12));
  CHECK(std::abs((b * res.certificate).norm() - op_norm(b)) <= 1e-10);
}

TEST_CASE("difference-quotient oracle agrees on a random pair") {
  Rng rng(47);
  Mat a = rng.gaussian(4, 4);
  Mat b = rng.gaussian(4, 4);
  auto [oracle, trace] = gd_fd_oracle(a, b, 1e-7);
  double analytic = gd_opnorm(a, b).value;
  CHECK(std::abs(analytic - oracle) <= 1e-5 * std::max(1.0, op_norm(b)));
  REQUIRE(trace.steps.size() >= 2);
  for (size_t j = 1; j < trace.steps.size(); ++j) {
    CHECK(trace.steps[j].t < trace.steps[j - 1].t);
    CHECK(trace.steps[j].quotient <= trace.steps[j - 1].quotient + 1e-12);
  }
}

TEST_CASE("positive homogeneity in the direction") {
  Rng rng(53);
  Mat a = rng.gaussian(3, 3);
  Mat b = rng.gaussian(3, 3);
  double g = gd_opnorm(a, b).value;
  double g2 = gd_opnorm(a, Mat(2.0 * b)).value;
  CHECK(g2 == doctest::Approx(2.0 * g).epsilon(1e-10));
}

TEST_CASE("block function derivative reduces to the matrix case on one label") {
  Rng rng(59);
  Mat a = rng.gaussian(3, 3);
  Mat b = rng.gaussian(3, 3);
  BlockOperator f = BlockOperator::functions({"x"}, {a});
  BlockOperator g = BlockOperator::functions({"x"}, {b});
  DerivativeResult block = gd_blockfun(f, g);
  CHECK(block.value == doctest::Approx(gd_opnorm(a, b).value).epsilon(1e-12));
  REQUIRE(block.active_label.has_value());
  CHECK(*block.active_label == "x");
}

TEST_CASE("block function derivative follows the norm-attaining label") {
  // The norm lives on x1; the huge direction entry at x0 must not leak in.
  BlockOperator f =
      BlockOperator::functions({"x0", "x1"}, {diag2(1.0, 0.0), diag2(3.0, 0.0)});
  BlockOperator g = BlockOperator::functions(
      {"x0", "x1"}, {diag2(100.0, 0.0), diag2(1.0, 0.0)});
  DerivativeResult res = gd_blockfun(f, g);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(res.active_label.has_value());
  CHECK(*res.active_label == "x1");
}

TEST_CASE("operator system certificate verification accepts and rejects") {
  Rng rng(61);
  Index n = 2, k = 2;
  Vec xi = rng.unit_vector(n * k);
  UcpConstruction uc = ucp_from_vector(xi, n, k);
  Mat assembled = xi * xi.adjoint();  // norm one, attained at xi
  BlockOperator s1 = BlockOperator::full_matrix(assembled, k);
  BlockOperator s2 = BlockOperator::full_matrix(assembled, k);
  OpsysVerification ok = gd_opsys_verify(s1, s2, uc.map, uc.eta);
  CHECK(ok.accepted);
  CHECK(ok.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(ok.norm_residual <= 1e-8);
  CHECK(ok.pairing_residual <= 1e-8);

  Vec wrong = rng.unit_vector(n * n);
  OpsysVerification bad = gd_opsys_verify(s1, s2, uc.map, wrong);
  CHECK(!bad.accepted);
  CHECK(!bad.violation.empty());
}
