#ifndef GATEAUX_DERIVATIVE_HPP
#define GATEAUX_DERIVATIVE_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gateaux/operators.hpp"
#include "gateaux/types.hpp"

namespace gateaux {

// One-sided derivative of the operator norm at a base point, with the
// attaining unit vector. For block functions the winning label is recorded.
struct DerivativeResult {
  double value = 0.0;
  Vec certificate;  // unit; |  ||A eta|| - ||A||  | <= 1e-8 * ||A||
  std::optional<std::string> active_label;
};

struct QuotientStep {
  double t = 0.0;
  double quotient = 0.0;
};

// Difference quotients recorded at decreasing t; nonincreasing by convexity.
struct QuotientTrace {
  std::vector<QuotientStep> steps;
};

// d/dt ||A + tB|| at t -> 0+. Equals the largest eigenvalue of the Hermitian
// part of A*B compressed to the maximal singular subspace of A, over ||A||.
// A = 0 gives ||B|| with a top right-singular vector of B as certificate.
DerivativeResult gd_opnorm(const Mat& a, const Mat& b);

// Independent check: evaluates (||A + tB|| - ||A||)/t on t = 2^-j, j = 10..40,
// stopping once successive change <= tol or the floating-point noise floor is
// reached. The recorded trace is nonincreasing by construction.
std::pair<double, QuotientTrace> gd_fd_oracle(const Mat& a, const Mat& b,
                                              double tol = 1e-7);

// Same schedule for any convex norm-like map t -> norm(t); norm0 = norm(0).
std::pair<double, QuotientTrace> gd_fd_oracle_fn(
    const std::function<double(double)>& norm_at, double norm0, double tol);

// Derivative in the rotated direction e^{i phase} B.
double gd_phase(const Mat& a, const Mat& b, double phase);

// Derivative of the sup norm over a finite label set: maximum of the pointwise
// derivatives over the norm-attaining labels (within relative tie 1e-8).
DerivativeResult gd_blockfun(const BlockOperator& f, const BlockOperator& g);

// Outcome of checking a (phi, eta) certificate for the derivative at s1 in
// direction s2 over an operator system realized in M_n(M_k).
struct OpsysVerification {
  bool accepted = false;
  double value = 0.0;       // Re<phi_n(s2) eta, phi_n(s1) eta> / ||s1|| when accepted
  std::string violation;    // first failed constraint otherwise
  double norm_residual = 0.0;      // | ||phi_n(s1)|| - ||s1|| |
  double pairing_residual = 0.0;   // | <Re(phi_n(s1)) eta, eta> - ||s1|| |
};

// Accepts iff phi preserves the norm of s1 and eta attains it in the numerical
// range sense; the returned value then never exceeds the true derivative.
OpsysVerification gd_opsys_verify(const BlockOperator& s1,
                                  const BlockOperator& s2, const UcpMap& phi,
                                  const Vec& eta, double tol = 1e-8);

}  // namespace gateaux

#endif
