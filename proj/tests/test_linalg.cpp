#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gateaux/linalg.hpp"
#include "gateaux/random.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;

TEST_CASE("operator norm on diagonal and nilpotent matrices") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  CHECK(op_norm(d) == doctest::Approx(3.0).epsilon(1e-14));

  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  CHECK(op_norm(n) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("hermitian eigendecomposition reconstructs and orders ascending") {
  Rng rng(11);
  Mat h = rng.hermitian(5);
  HermitianEigen eig = herm_eig(h);
  for (Index i = 1; i < 5; ++i) CHECK(eig.values(i - 1) <= eig.values(i));
  Mat rebuilt =
      eig.vectors * eig.values.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
  CHECK((rebuilt - h).norm() <= 1e-12 * h.norm());
  CHECK((eig.vectors.adjoint() * eig.vectors - Mat::Identity(5, 5)).norm() <=
        1e-12);
}

TEST_CASE("hermitian eigendecomposition rejects a non-hermitian input") {
  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 1.0;
  CHECK_THROWS_AS(herm_eig(n), InvalidInput);
}

TEST_CASE("svd of a nilpotent matrix") {
  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  Svd dec = svd(n);
  CHECK(dec.singular(0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(dec.singular(1) == doctest::Approx(0.0).epsilon(1e-14));
  Mat rebuilt = dec.left * dec.singular.cast<cplx>().asDiagonal() *
                dec.right.adjoint();
  CHECK((rebuilt - n).norm() <= 1e-12);
}

TEST_CASE("svd reconstructs a random rectangular matrix deterministically") {
  Rng rng(5);
  Mat a = rng.gaussian(5, 4);
  Svd first = svd(a);
  Svd second = svd(a);
  CHECK((first.left - second.left).norm() == 0.0);
  CHECK((first.right - second.right).norm() == 0.0);
  Mat rebuilt = first.left * first.singular.cast<cplx>().asDiagonal() *
                first.right.adjoint();
  CHECK((rebuilt - a).norm() <= 1e-12 * a.norm());
  CHECK((first.left.adjoint() * first.left - Mat::Identity(4, 4)).norm() <=
        1e-12);
  CHECK((first.right.adjoint() * first.right - Mat::Identity(4, 4)).norm() <=
        1e-12);
  for (Index i = 1; i < 4; ++i) CHECK(first.singular(i - 1) >= first.singular(i));
}

TEST_CASE("maximal singular subspace of a degenerate diagonal") {
  Mat d = Mat::Zero(3, 3);
  d(0, 0) = 2.0;
  d(1, 1) = 2.0;
  d(2, 2) = 1.0;
  SubspaceBasis k = max_singular_subspace(d);
  REQUIRE(k.dim() == 2);
  Mat proj = k.columns * k.columns.adjoint();
  Mat expected = Mat::Zero(3, 3);
  expected(0, 0) = 1.0;
  expected(1, 1) = 1.0;
  CHECK((proj - expected).norm() <= 1e-12);
}

TEST_CASE("maximal singular subspace attains the norm") {
  Rng rng(7);
  Mat a = rng.gaussian(6, 6);
  double na = op_norm(a);
  SubspaceBasis k = max_singular_subspace(a);
  REQUIRE(k.dim() >= 1);
  for (Index j = 0; j < k.dim(); ++j) {
    Vec eta = k.columns.col(j);
    CHECK((a * eta).norm() >= (1.0 - 2e-8) * na);
  }
}

TEST_CASE("polar partial isometry on a rank-deficient diagonal") {
  Mat d = Mat::Zero(2, 2);
  d(0, 0) = 2.0;
  Mat w = polar_partial_isometry(d);
  Mat expected = Mat::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK((w - expected).norm() <= 1e-12);
}

TEST_CASE("polar partial isometry factors a random matrix") {
  Rng rng(19);
  Mat a = rng.gaussian(4, 4);
  Mat w = polar_partial_isometry(a);
  HermitianEigen eig = herm_eig(Mat(a.adjoint() * a));
  Mat root = eig.vectors *
             eig.values.cwiseMax(0.0).cwiseSqrt().cast<cplx>().asDiagonal() *
             eig.vectors.adjoint();
  CHECK((w * root - a).norm() <= 1e-10 * a.norm());
  CHECK(op_norm(w) <= 1.0 + 1e-12);
}

TEST_CASE("kronecker and stacked tensor are mutually consistent") {
  Rng rng(3);
  Mat a = rng.gaussian(3, 3);
  Vec v = rng.unit_vector(3);
  Vec w = rng.unit_vector(2);
  Vec lhs = kron(a, Mat::Identity(2, 2)) * tensor(v, w);
  Vec rhs = tensor(Vec(a * v), w);
  CHECK((lhs - rhs).norm() <= 1e-12);
}
