#ifndef GATEAUX_OPERATORS_HPP
#define GATEAUX_OPERATORS_HPP

#include <functional>
#include <string>
#include <vector>

#include "gateaux/types.hpp"

namespace gateaux {

// Applies a map on k x k matrices to every k x k block of an assembled
// nk x nk matrix and reassembles the images (m x m each) into an nm x nm
// matrix. Blocks live at offsets (p*k, q*k); images land at (p*m, q*m).
Mat map_blocks(const Mat& assembled, Index k,
               const std::function<Mat(const Mat&)>& phi);

// Element of M_n(V) for a concrete base space V. Storage by base:
//   Scalars    - one n x n matrix, entry (p,q) is the scalar block.
//   FullMatrix - one assembled nk x nk matrix, block (p,q) at (p*k, q*k).
//   Functions  - one n x n evaluation matrix per label of a finite set.
struct BlockOperator {
  enum class Base { Scalars, FullMatrix, Functions };

  Base base = Base::Scalars;
  Index n = 0;          // block count
  Index entry_dim = 1;  // k for FullMatrix, 1 otherwise
  std::vector<std::string> labels;  // Functions only, parallel to data
  std::vector<Mat> data;

  static BlockOperator scalars(const Mat& m);
  static BlockOperator full_matrix(const Mat& assembled, Index k);
  static BlockOperator functions(const std::vector<std::string>& labels,
                                 const std::vector<Mat>& evaluations);

  // k x k (or 1 x 1) block at position (p, q) of realization i.
  Mat block(Index p, Index q, Index i = 0) const;
};

// Norm-attaining functional on an assembled space, F(u) = <u xi, zeta>.
struct DualFunctional {
  Vec xi;    // unit
  Vec zeta;  // unit
  cplx apply(const Mat& u) const { return zeta.dot(u * xi); }
};

// Factorization F(u) = <phi_n(u) eta, xi_prime> with phi(a) = w_left* a w_right
// completely contractive. The paired vectors stack n slots of length n.
struct CbFactorization {
  Mat w_left;    // k x n, norm <= 1
  Mat w_right;   // k x n, norm <= 1
  Vec eta;       // unit, C^{n^2}
  Vec xi_prime;  // unit, C^{n^2}

  Mat apply(const Mat& a) const;                  // k x k -> n x n
  Mat apply_blocks(const Mat& u, Index k) const;  // phi_n on an assembled matrix
};

// Unital completely positive map in Stinespring form phi(a) = V*(a (x) I_m)V.
struct UcpMap {
  Mat isometry;    // (domain_dim * mult) x codomain, isometry* isometry = I
  Index domain_dim = 0;
  Index mult = 1;

  Index codomain_dim() const { return isometry.cols(); }
  Mat apply(const Mat& a) const;
  Mat apply_blocks(const Mat& s, Index k) const;
  // Block matrix [phi(E_ij)]; PSD exactly when the map is completely positive.
  Mat choi() const;
};

// Common compression form a -> left*(a (x) I_mult) right covering both ucp
// maps (left = right = isometry) and cb factorizations (mult = 1).
struct CompressionMap {
  Mat left;
  Mat right;
  Index domain_dim = 0;
  Index mult = 1;

  static CompressionMap from_ucp(const UcpMap& phi);
  static CompressionMap from_cb(const CbFactorization& cb, Index domain_dim);
  Index codomain_dim() const { return left.cols(); }
  Mat apply(const Mat& a) const;
  Mat apply_blocks(const Mat& s) const;
};

}  // namespace gateaux

#endif
