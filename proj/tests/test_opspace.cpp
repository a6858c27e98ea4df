#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "gateaux/linalg.hpp"
#include "gateaux/opspace.hpp"
#include "gateaux/random.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;

TEST_CASE("matrix norm through the concrete realizations") {
  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  CHECK(matrix_norm(BlockOperator::scalars(n)) ==
        doctest::Approx(2.0).epsilon(1e-14));

  Rng rng(71);
  Mat assembled = rng.gaussian(6, 6);
  CHECK(matrix_norm(BlockOperator::full_matrix(assembled, 3)) ==
        doctest::Approx(op_norm(assembled)).epsilon(1e-14));

  Mat small = 0.5 * Mat::Identity(2, 2);
  Mat large = 3.0 * Mat::Identity(2, 2);
  CHECK(matrix_norm(BlockOperator::functions({"a", "b"}, {small, large})) ==
        doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("norm-attaining functional attains and stays contractive") {
  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  DualFunctional f = hahn_banach_functional(BlockOperator::scalars(n));
  CHECK(std::abs(f.apply(n) - cplx(2.0, 0.0)) <= 1e-12);
  CHECK(std::abs(std::abs(f.xi(1)) - 1.0) <= 1e-12);   // top right vector e2
  CHECK(std::abs(std::abs(f.zeta(0)) - 1.0) <= 1e-12); // top left vector e1
  Rng rng(73);
  for (int i = 0; i < 10; ++i) {
    Mat u = rng.gaussian(2, 2);
    CHECK(std::abs(f.apply(u)) <= op_norm(u) + 1e-12);
  }
}

TEST_CASE("scalar factorization is the identity map") {
  Rng rng(79);
  DualFunctional f{rng.unit_vector(1), rng.unit_vector(1)};
  CbFactorization cb = cb_factorization(f, 1, 1);
  for (int i = 0; i < 5; ++i) {
    Mat u = rng.gaussian(1, 1);
    CHECK(std::abs(f.apply(u) -
                   cb.xi_prime.dot(cb.apply_blocks(u, 1) * cb.eta)) <= 1e-12);
  }
}

TEST_CASE("factorization reproduces a random functional exactly") {
  Rng rng(83);
  Index n = 2, k = 3;
  DualFunctional f{rng.unit_vector(n * k), rng.unit_vector(n * k)};
  CbFactorization cb = cb_factorization(f, n, k);
  CHECK(op_norm(cb.w_left) <= 1.0 + 1e-12);
  CHECK(op_norm(cb.w_right) <= 1.0 + 1e-12);
  CHECK(std::abs(cb.eta.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(cb.xi_prime.norm() - 1.0) <= 1e-12);
  for (int i = 0; i < 10; ++i) {
    Mat u = rng.gaussian(n * k, n * k);
    CHECK(std::abs(f.apply(u) -
                   cb.xi_prime.dot(cb.apply_blocks(u, k) * cb.eta)) <= 1e-9);
  }
}

TEST_CASE("matrix state from a vector is unital, completely positive, exact") {
  Rng rng(89);
  Index n = 2, k = 2;
  Vec xi = rng.unit_vector(n * k);
  UcpConstruction uc = ucp_from_vector(xi, n, k);
  const Mat& v = uc.map.isometry;
  CHECK((v.adjoint() * v - Mat::Identity(n, n)).norm() <= 1e-10);
  CHECK((uc.map.apply(Mat::Identity(k, k)) - Mat::Identity(n, n)).norm() <=
        1e-12);
  HermitianEigen choi = herm_eig(re_part(uc.map.choi()));
  CHECK(choi.values(0) >= -1e-10);
  CHECK(std::abs(uc.eta.norm() - 1.0) <= 1e-12);
  for (int i = 0; i < 10; ++i) {
    Mat s = rng.gaussian(n * k, n * k);
    cplx lhs = uc.eta.dot(uc.map.apply_blocks(s, k) * uc.eta);
    cplx rhs = xi.dot(s * xi);
    CHECK(std::abs(lhs - rhs) <= 1e-9);
  }
}

TEST_CASE("orthogonality factorization with a rank-one density") {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 0.5;
  Mat w = Mat::Zero(2, 2);
  w(0, 1) = 1.0;  // compression to the top subspace of a vanishes
  FactorizationCertificate cert = orthogonality_factorization(
      BlockOperator::scalars(a), {BlockOperator::scalars(w)});
  CHECK(cert.single_vector);
  REQUIRE(cert.factorization.has_value());
  REQUIRE(cert.residuals.size() >= 2);
  CHECK(cert.residuals[0] <= 1e-8);
  CHECK(cert.residuals[1] <= 1e-8);
}

TEST_CASE("orthogonality factorization falls back to the mixed density") {
  Mat sig = Mat::Zero(2, 2);
  sig(0, 0) = 1.0;
  sig(1, 1) = -1.0;
  FactorizationCertificate cert = orthogonality_factorization(
      BlockOperator::scalars(Mat::Identity(2, 2)),
      {BlockOperator::scalars(sig)});
  CHECK(!cert.single_vector);
  CHECK((cert.rho.matrix - 0.5 * Mat::Identity(2, 2)).norm() <= 1e-6);
}

TEST_CASE("support mapping attains at the base and stays contractive") {
  Rng rng(97);
  Index n = 2, k = 2;
  Vec xi = rng.unit_vector(n * k);
  UcpConstruction uc = ucp_from_vector(xi, n, k);
  BlockOperator v = BlockOperator::full_matrix(Mat(xi * xi.adjoint()), k);
  SupportReport report =
      support_mapping_check(CompressionMap::from_ucp(uc.map), v);
  CHECK(report.valid);
  CHECK(report.attainment_residual <= 1e-8);
  CHECK(report.worst_margin <= 1e-9);
  CHECK(report.samples_checked > 0);
}
