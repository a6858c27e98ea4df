#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "gateaux/numrange.hpp"
#include "gateaux/random.hpp"
#include "gateaux/types.hpp"

using namespace gateaux;

TEST_CASE("support maximum on pinned matrices") {
  CHECK(rho_star(Mat::Identity(2, 2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho_star(Mat(-Mat::Identity(2, 2))) ==
        doctest::Approx(-1.0).epsilon(1e-14));
  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  CHECK(rho_star(n) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("support maximum comes with an attaining vector") {
  Rng rng(23);
  Mat m = rng.gaussian(5, 5);
  auto [value, vec] = rho_star_vector(m);
  CHECK(std::abs(vec.norm() - 1.0) <= 1e-12);
  CHECK(std::abs(vec.dot(m * vec).real() - value) <= 1e-10);
}

TEST_CASE("zero membership in the numerical range") {
  Mat sig = Mat::Zero(2, 2);
  sig(0, 0) = 1.0;
  sig(1, 1) = -1.0;
  CHECK(contains_zero(sig).contains_zero);

  Mat n = Mat::Zero(2, 2);
  n(0, 1) = 2.0;
  CHECK(contains_zero(n).contains_zero);

  ZeroMembership far = contains_zero(Mat::Identity(2, 2));
  CHECK(!far.contains_zero);
  // The range is the point {1}; the separating direction looks along -1.
  CHECK(far.support_value == doctest::Approx(-1.0).epsilon(1e-10));
}

TEST_CASE("range point certificate at the balanced midpoint") {
  Mat sig = Mat::Zero(2, 2);
  sig(0, 0) = 1.0;
  sig(1, 1) = -1.0;
  RangeCertificate cert = range_point_certificate(sig, cplx(0.0, 0.0));
  CHECK(cert.residual <= 1e-8);
  CHECK(std::abs(cert.vector.norm() - 1.0) <= 1e-10);
  const double inv_sqrt2 = 0.70710678118654752;
  CHECK(std::abs(std::abs(cert.vector(0)) - inv_sqrt2) <= 1e-6);
  CHECK(std::abs(std::abs(cert.vector(1)) - inv_sqrt2) <= 1e-6);
  CHECK(std::abs(cert.vector.dot(sig * cert.vector) - cert.value) <= 1e-8);
}

TEST_CASE("range point certificate at an interior target of a random matrix") {
  Rng rng(31);
  Mat m = rng.gaussian(4, 4);
  // The mean of the diagonal Rayleigh quotients is inside the range by
  // convexity, so it is always certifiable.
  cplx z = m.trace() / 4.0;
  RangeCertificate cert = range_point_certificate(m, z);
  CHECK(cert.residual <= 1e-8);
  CHECK(std::abs(cert.vector.dot(m * cert.vector) - z) <= 1e-8);
}

TEST_CASE("range point certificate refuses a target outside the range") {
  CHECK_THROWS(range_point_certificate(Mat::Identity(2, 2), cplx(0.0, 0.0)));
}
