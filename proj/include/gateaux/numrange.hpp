#ifndef GATEAUX_NUMRANGE_HPP
#define GATEAUX_NUMRANGE_HPP

#include <utility>

#include "gateaux/types.hpp"

namespace gateaux {

// sup of the real part of the numerical range: lambda_max((A+A*)/2).
// May be negative; no clamping.
double rho_star(const Mat& a);

// Same value together with an attaining unit vector.
std::pair<double, Vec> rho_star_vector(const Mat& a);

// Decision for 0 in the numerical range W(M), by the support minimum
// min_theta lambda_max(Re(e^{i theta} M)).  On a negative verdict the angle
// is a separating half-plane witness.
struct ZeroMembership {
  bool contains_zero = false;
  double witness_angle = 0.0;
  double support_value = 0.0;
};

ZeroMembership contains_zero(const Mat& m, double tol = 1e-10);

// Constructive witness that z lies in W(M): a unit vector whose Rayleigh
// quotient hits z.  value stores the certified target z and
// residual = |<M vector, vector> - value|.
struct RangeCertificate {
  Vec vector;
  cplx value;
  double residual = 0.0;
};

// Requires z in W(M) up to tol; throws SearchFailure when the refinement
// budget is exhausted without reaching residual <= tol (the usual cause is
// z outside the range).
RangeCertificate range_point_certificate(const Mat& m, cplx z, double tol = 1e-8);

}  // namespace gateaux

#endif
