#ifndef GATEAUX_TYPES_HPP
#define GATEAUX_TYPES_HPP

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace gateaux {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;
using Index = Eigen::Index;

// Input that violates a precondition (shape, emptiness, non-finite entries).
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Structurally valid input on which the operation is undefined (e.g. zero matrix
// where a norm-attaining direction is required).
struct DegenerateInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A constructive search exhausted its budget without meeting its tolerance.
struct SearchFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computed certificate failed its own re-verification.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Hermitian part (M + M*)/2.
inline Mat re_part(const Mat& m) { return 0.5 * (m + m.adjoint()); }

// Skew part divided by i, i.e. (M - M*)/(2i); Hermitian, and M = re + i*im.
inline Mat im_part(const Mat& m) {
  return (m - m.adjoint()) / cplx(0.0, 2.0);
}

inline bool all_finite(const Mat& m) { return m.allFinite(); }

// Kronecker product, row-major pairing: out((i*Br+p), (j*Bc+q)) = A(i,j)B(p,q).
inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Stacked tensor consistent with kron above: slot i of length dim(w) holds v(i)*w.
inline Vec tensor(const Vec& v, const Vec& w) {
  Vec out(v.size() * w.size());
  for (Index i = 0; i < v.size(); ++i) out.segment(i * w.size(), w.size()) = v(i) * w;
  return out;
}

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidInput(what);
}

}  // namespace gateaux

#endif
