#ifndef GATEAUX_LINALG_HPP
#define GATEAUX_LINALG_HPP

#include "gateaux/types.hpp"

namespace gateaux {

// Eigendecomposition of a Hermitian matrix. values ascending; vectors has
// orthonormal columns aligned with values; H*vectors = vectors*diag(values).
struct HermitianEigen {
  RVec values;
  Mat vectors;
};

// Thin singular value decomposition A = left * diag(singular) * right^*.
// singular nonnegative, descending; left/right have orthonormal columns.
// Column phases are fixed deterministically (first significant component of
// each right vector is real positive), so repeated runs agree exactly.
struct Svd {
  Mat left;
  RVec singular;
  Mat right;
};

// Orthonormal basis of a subspace of C^ambient_dim, stored as columns.
struct SubspaceBasis {
  Index ambient_dim = 0;
  Mat columns;

  Index dim() const { return columns.cols(); }
};

// Largest singular value. Zero-dimensional input is invalid.
double op_norm(const Mat& a);

// Requires ||H - H*||_F <= 1e-12 * ||H||_F; solves on the Hermitian average.
HermitianEigen herm_eig(const Mat& h);

Svd svd(const Mat& a);

// Basis of the span of right singular vectors with sigma >= (1-rel_tol)*sigma_max.
// Every unit vector eta in the span has ||A eta|| >= (1-2*rel_tol)*||A||.
// Requires ||A|| > 0.
SubspaceBasis max_singular_subspace(const Mat& a, double rel_tol = 1e-8);

// W = left*right^* over the nonzero singular triples; A = W*(A^*A)^{1/2} and
// W^*W is the orthogonal projection onto the row space.
Mat polar_partial_isometry(const Mat& a);

}  // namespace gateaux

#endif
