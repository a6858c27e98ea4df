#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "gateaux/linalg.hpp"
#include "gateaux/povm.hpp"
#include "gateaux/random.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;

namespace {
FinitePovm uniform_pair() {
  FinitePovm nu;
  nu.dim = 2;
  nu.labels = {"p", "q"};
  nu.effects = {0.5 * Mat::Identity(2, 2), 0.5 * Mat::Identity(2, 2)};
  return nu;
}
}  // namespace

TEST_CASE("validation accepts the uniform pair and rejects oversized effects") {
  PovmValidation good = validate_povm(uniform_pair());
  CHECK(good.valid_povm);
  CHECK(good.quantum_probability);
  CHECK(good.violations.empty());

  FinitePovm bad;
  bad.dim = 2;
  bad.labels = {"p", "q"};
  bad.effects = {Mat::Identity(2, 2), Mat::Identity(2, 2)};
  PovmValidation rejected = validate_povm(bad);
  CHECK(!rejected.valid_povm);
  CHECK(!rejected.violations.empty());
  CHECK(rejected.total_spectrum.maxCoeff() == doctest::Approx(2.0));
}

TEST_CASE("validation flags non-hermitian and negative effects") {
  FinitePovm skew;
  skew.dim = 2;
  skew.labels = {"p"};
  Mat s = Mat::Zero(2, 2);
  s(0, 1) = 1.0;
  skew.effects = {s};
  CHECK(!validate_povm(skew).valid_povm);

  FinitePovm negative;
  negative.dim = 2;
  negative.labels = {"p", "q"};
  negative.effects = {1.5 * Mat::Identity(2, 2), -0.5 * Mat::Identity(2, 2)};
  PovmValidation rejected = validate_povm(negative);
  CHECK(!rejected.valid_povm);
}

TEST_CASE("scalar integration is linear and recovers the total") {
  FinitePovm nu = uniform_pair();
  std::map<std::string, cplx> one = {{"p", 1.0}, {"q", 1.0}};
  CHECK((integrate_scalar(one, nu) - Mat::Identity(2, 2)).norm() <= 1e-14);

  std::map<std::string, cplx> indicator = {{"p", 1.0}, {"q", 0.0}};
  CHECK((integrate_scalar(indicator, nu) - nu.effects[0]).norm() <= 1e-14);

  Rng rng(101);
  std::map<std::string, cplx> f = {{"p", rng.cnormal()}, {"q", rng.cnormal()}};
  std::map<std::string, cplx> g = {{"p", rng.cnormal()}, {"q", rng.cnormal()}};
  std::map<std::string, cplx> sum = {{"p", f["p"] + g["p"]},
                                     {"q", f["q"] + g["q"]}};
  Mat lhs = integrate_scalar(sum, nu);
  Mat rhs = integrate_scalar(f, nu) + integrate_scalar(g, nu);
  CHECK((lhs - rhs).norm() <= 1e-12);

  std::map<std::string, cplx> partial = {{"p", 1.0}};
  CHECK_THROWS_AS(integrate_scalar(partial, nu), InvalidInput);
}

TEST_CASE("block integration against a singleton measure is a kronecker form") {
  FinitePovm omega;
  omega.dim = 2;
  omega.labels = {"x"};
  omega.effects = {Mat::Identity(2, 2)};
  Rng rng(103);
  Mat a = rng.gaussian(2, 2);
  BlockOperator f = BlockOperator::functions({"x"}, {a});
  Mat lhs = integrate_block(f, omega);
  Mat rhs = kron(a, Mat::Identity(2, 2));
  CHECK((lhs - rhs).norm() <= 1e-14);
}

TEST_CASE("block measure of a singleton state has the flat-sheet spectrum") {
  FinitePovm omega;
  omega.dim = 2;
  omega.labels = {"x"};
  omega.effects = {Mat::Identity(2, 2)};
  BlockMeasure nu = state_to_block_measure(omega);
  CHECK(!nu.normalized);
  REQUIRE(nu.blocks.size() == 1);
  Mat ones = Mat::Ones(2, 2);
  CHECK((nu.blocks[0] - kron(ones, Mat::Identity(2, 2))).norm() <= 1e-14);
  HermitianEigen eig = herm_eig(nu.blocks[0]);
  CHECK(eig.values(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.values(1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(eig.values(2) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig.values(3) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("state-side and measure-side integrals agree") {
  FinitePovm nu = uniform_pair();
  Rng rng(107);
  BlockOperator f = BlockOperator::functions(
      {"p", "q"}, {rng.gaussian(2, 2), rng.gaussian(2, 2)});
  Mat state_side = integrate_block(f, nu);
  Mat measure_side = integrate_block_measure(f, state_to_block_measure(nu));
  CHECK((state_side - measure_side).norm() <= 1e-12);
}

TEST_CASE("compression preserves the diagonal measure of the paired vector") {
  FinitePovm omega = uniform_pair();
  BlockMeasure nu = state_to_block_measure(omega);
  // Uniform slots: eta stacks e_i / sqrt(2).
  Vec eta = Vec::Zero(4);
  eta(0) = 1.0 / std::sqrt(2.0);
  eta(3) = 1.0 / std::sqrt(2.0);
  CompressedMeasure cm = compress_measure(nu, eta);
  CHECK(validate_povm(cm.omega_prime).valid_povm);
  CHECK((cm.w * cm.xi - eta).norm() <= 1e-12);
  for (size_t x = 0; x < nu.blocks.size(); ++x) {
    cplx lhs = cm.xi.dot(cm.omega_prime.effects[x] * cm.xi);
    cplx rhs = eta.dot(nu.blocks[x] * eta);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("commutative derivative certificate on a pinned two-label instance") {
  Mat f0 = Mat::Zero(2, 2), f1 = Mat::Zero(2, 2);
  f0(0, 0) = 2.0;
  f0(1, 1) = 1.0;
  f1(0, 0) = 1.0;
  f1(1, 1) = 1.0;
  Mat g0 = Mat::Zero(2, 2), g1 = Mat::Zero(2, 2);
  g0(0, 0) = 5.0;
  g1(0, 0) = 7.0;
  g1(1, 1) = 7.0;
  BlockOperator f = BlockOperator::functions({"x0", "x1"}, {f0, f1});
  BlockOperator g = BlockOperator::functions({"x0", "x1"}, {g0, g1});
  CommutativeDerivative cert = gd_commutative_certificate(f, g);
  // Norm 2 attained only at x0; there the derivative is 5.
  CHECK(cert.value == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cert.active_label == "x0");
  CHECK(cert.certificate_valid);
  CHECK(cert.norm_residual <= 1e-6 * 2.0);
  CHECK(cert.pairing_residual <= 1e-6 * 7.0);
}
