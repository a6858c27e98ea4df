#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gateaux/linalg.hpp"
#include "gateaux/orthogonality.hpp"
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

TEST_CASE("identity is orthogonal to the traceless hermitian direction") {
  OrthogonalityDecision dec = bj_pair(Mat::Identity(2, 2), diag2(1.0, -1.0));
  REQUIRE(dec.verdict == Verdict::Orthogonal);
  REQUIRE(dec.eta.has_value());
  const Vec& eta = *dec.eta;
  const double inv_sqrt2 = 0.70710678118654752;
  CHECK(std::abs(std::abs(eta(0)) - inv_sqrt2) <= 1e-6);
  CHECK(std::abs(std::abs(eta(1)) - inv_sqrt2) <= 1e-6);
  CHECK(std::abs(eta.dot(diag2(1.0, -1.0) * eta)) <= 1e-8);
}

TEST_CASE("rank-one base is not orthogonal to the identity") {
  Mat a = diag2(1.0, 0.0);
  OrthogonalityDecision dec = bj_pair(a, Mat::Identity(2, 2));
  REQUIRE(dec.verdict == Verdict::NotOrthogonal);
  REQUIRE(dec.lambda.has_value());
  CHECK(std::abs(*dec.lambda - cplx(-0.5, 0.0)) <= 1e-6);
  CHECK(std::abs(dec.achieved_norm - 0.5) <= 1e-6);
  CHECK(op_norm(a + *dec.lambda * Mat::Identity(2, 2)) <= 1.0 - 1e-9);
}

TEST_CASE("nothing is orthogonal to itself") {
  Rng rng(67);
  Mat a = rng.gaussian(3, 3);
  OrthogonalityDecision dec = bj_pair(a, a);
  REQUIRE(dec.verdict == Verdict::NotOrthogonal);
  REQUIRE(dec.lambda.has_value());
  CHECK(op_norm(a + *dec.lambda * a) <= op_norm(a) - 1e-9);
}

TEST_CASE("margin instance is reported indeterminate, never guessed") {
  Mat b = Mat::Zero(2, 2);
  b(0, 0) = 1.00001;
  b(0, 1) = 2.0;
  b(1, 1) = 1.00001;
  OrthogonalityDecision dec = bj_pair(Mat::Identity(2, 2), b);
  CHECK(dec.verdict == Verdict::Indeterminate);
  CHECK(!dec.note.empty());
}

TEST_CASE("density matrix validation") {
  CHECK_NOTHROW(DensityMatrix::validated(Mat(0.5 * Mat::Identity(2, 2))));
  CHECK_THROWS(DensityMatrix::validated(Mat::Identity(2, 2)));  // trace 2
  Mat skew = Mat::Zero(2, 2);
  skew(0, 1) = 1.0;
  CHECK_THROWS(DensityMatrix::validated(skew));
}

TEST_CASE("density face feasibility finds the balanced state") {
  FeasibilityResult res = density_face_feasibility({diag2(1.0, -1.0)});
  REQUIRE(res.status == FeasibilityStatus::Feasible);
  CHECK(std::abs((res.sigma * diag2(1.0, -1.0)).trace()) <= 1e-6);
  CHECK(std::abs(res.sigma.trace().real() - 1.0) <= 1e-10);
}

TEST_CASE("density face feasibility rejects the identity constraint") {
  FeasibilityResult res = density_face_feasibility({Mat::Identity(2, 2)});
  CHECK(res.status == FeasibilityStatus::Infeasible);
  // Any density has trace one, so the objective cannot drop below one.
  CHECK(res.lower_bound > 1e-4);
}

TEST_CASE("subspace orthogonality against the traceless basis") {
  Mat e01 = Mat::Zero(2, 2), e10 = Mat::Zero(2, 2);
  e01(0, 1) = 1.0;
  e10(1, 0) = 1.0;
  std::vector<Mat> basis = {diag2(1.0, -1.0), e01, e10};
  OrthogonalityDecision dec = bj_subspace(Mat::Identity(2, 2), basis);
  REQUIRE(dec.verdict == Verdict::Orthogonal);
  REQUIRE(dec.rho.has_value());
  CHECK((dec.rho->matrix - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("subspace witness strictly decreases the norm") {
  Mat a = diag2(1.0, 0.0);
  std::vector<Mat> basis = {Mat::Identity(2, 2)};
  OrthogonalityDecision dec = bj_subspace(a, basis);
  REQUIRE(dec.verdict == Verdict::NotOrthogonal);
  REQUIRE(dec.witness.has_value());
  REQUIRE(dec.coefficients.has_value());
  CHECK(op_norm(a - *dec.witness) <= op_norm(a) - 1e-9);
  Mat recombined = (*dec.coefficients)(0) * Mat::Identity(2, 2);
  CHECK((recombined - *dec.witness).norm() <= 1e-10);
}

TEST_CASE("state certificate annihilates the subspace and attains the norm") {
  Mat e01 = Mat::Zero(2, 2), e10 = Mat::Zero(2, 2);
  e01(0, 1) = 1.0;
  e10(1, 0) = 1.0;
  std::vector<Mat> basis = {diag2(1.0, -1.0), e01, e10};
  Mat x = Mat::Identity(2, 2);
  DensityMatrix rho = state_certificate(x, basis);
  CHECK(std::abs((rho.matrix * (x.adjoint() * x)).trace().real() - 1.0) <=
        1e-6);
  for (const Mat& y : basis)
    CHECK(std::abs((rho.matrix * (x.adjoint() * y)).trace()) <= 1e-6);
}
