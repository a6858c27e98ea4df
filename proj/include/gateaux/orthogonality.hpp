#ifndef GATEAUX_ORTHOGONALITY_HPP
#define GATEAUX_ORTHOGONALITY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gateaux/types.hpp"

namespace gateaux {

// PSD, unit-trace matrix; carries states z -> tr(rho z) on a matrix algebra.
struct DensityMatrix {
  Mat matrix;

  // Checks Hermitian within 1e-12, lambda_min >= -1e-10, trace 1 within 1e-10.
  static DensityMatrix validated(const Mat& m);
};

enum class Verdict { Orthogonal, NotOrthogonal, Indeterminate };

// Decision with a machine-checkable certificate in both directions:
// Orthogonal ships eta (pair) or rho (subspace); NotOrthogonal ships a
// verified strictly-decreasing witness. Indeterminate is explicit, never a
// silent guess on margin instances.
struct OrthogonalityDecision {
  Verdict verdict = Verdict::Indeterminate;
  std::optional<Vec> eta;             // unit, pair certificate
  std::optional<DensityMatrix> rho;   // subspace certificate
  std::optional<cplx> lambda;         // pair witness: ||A + lambda B|| < ||A||
  std::optional<Mat> witness;         // subspace witness w = sum c_j B_j
  std::optional<Vec> coefficients;    // the c_j
  double achieved_norm = 0.0;         // norm at the witness
  std::vector<double> residuals;
  std::string note;
};

// Pairwise decision: A is norm-orthogonal to B iff 0 lies in the numerical
// range of the compression of A*B to the maximal singular subspace of A.
// tol is the absolute certificate tolerance on |<A eta, B eta>|.
OrthogonalityDecision bj_pair(const Mat& a, const Mat& b, double tol = 1e-8);

enum class FeasibilityStatus { Feasible, Infeasible, Indeterminate };

struct FeasibilityResult {
  FeasibilityStatus status = FeasibilityStatus::Indeterminate;
  Mat sigma;          // best density found
  double objective = 0.0;   // sum_j |tr(sigma C_j)|^2 at sigma
  double lower_bound = 0.0; // certified lower bound on the optimum
  Mat gradient;       // Hermitian gradient at exit (infeasibility indicator)
  int iterations = 0;
};

// Finds a density sigma with |tr(sigma C_j)| <= tol for all j, by Frank-Wolfe
// on f(sigma) = sum |tr(sigma C_j)|^2 with exact line search, accelerated by
// periodic projection onto the constraint affine space. Classification:
// f <= tol^2 Feasible; f (or its certified lower bound) above
// max(1e-8, 1e4 tol^2) Infeasible; otherwise Indeterminate.
FeasibilityResult density_face_feasibility(const std::vector<Mat>& c_list,
                                           double tol = 1e-6,
                                           int max_iters = 20000);

// Subspace decision: A orthogonal to span{B_list} iff a density sigma on the
// maximal singular subspace annihilates every compressed A*B_j. Orthogonal
// returns rho lifted to the ambient space; NotOrthogonal returns verified
// coefficients with ||A - sum c_j B_j|| <= ||A|| - 1e-9.
OrthogonalityDecision bj_subspace(const Mat& a, const std::vector<Mat>& b_list,
                                  double tol = 1e-6,
                                  std::uint64_t seed = 20260819);

// The state certifying bj_subspace(x, b_list) == Orthogonal for a norm-one x:
// tr(rho x*x) = 1 and |tr(rho x*y)| <= 1e-6 for every y in b_list.
DensityMatrix state_certificate(const Mat& x, const std::vector<Mat>& b_list);

}  // namespace gateaux

#endif
