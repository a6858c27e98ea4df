#include "gateaux/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

namespace gateaux {

namespace {

void check_nonempty_finite(const Mat& a, const char* op) {
  require(a.rows() > 0 && a.cols() > 0, std::string(op) + ": empty matrix");
  require(all_finite(a), std::string(op) + ": non-finite entries");
}

// Rotate each singular pair so the first significant component of the right
// vector is real positive. u*v^* is invariant, so the reconstruction is too.
void fix_phases(Mat& left, Mat& right) {
  for (Index j = 0; j < right.cols(); ++j) {
    Index lead = 0;
    double best = 0.0;
    for (Index i = 0; i < right.rows(); ++i) {
      double m = std::abs(right(i, j));
      if (m > 1e-8) {
        lead = i;
        best = m;
        break;
      }
      if (m > best) {
        best = m;
        lead = i;
      }
    }
    cplx pivot = right(lead, j);
    double m = std::abs(pivot);
    if (m == 0.0) continue;
    cplx phase = std::conj(pivot) / m;
    right.col(j) *= phase;
    left.col(j) *= phase;
  }
}

}  // namespace

double op_norm(const Mat& a) {
  check_nonempty_finite(a, "op_norm");
  if (a.rows() == 1 || a.cols() == 1) return a.norm();
  // sigma_max via the top eigenvalue of A^*A; the top value keeps full
  // relative accuracy under the squaring.
  Mat gram = re_part(a.adjoint() * a);
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  return std::sqrt(std::max(lmax, 0.0));
}

HermitianEigen herm_eig(const Mat& h) {
  check_nonempty_finite(h, "herm_eig");
  require(h.rows() == h.cols(), "herm_eig: matrix not square");
  double scale = h.norm();
  double dev = (h - h.adjoint()).norm();
  require(dev <= 1e-12 * scale || dev == 0.0, "herm_eig: matrix not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(h));
  require(es.info() == Eigen::Success, "herm_eig: eigensolver did not converge");
  HermitianEigen out{es.eigenvalues(), es.eigenvectors()};
  // Deterministic eigenvector phases, same rule as the singular vectors.
  Mat dummy = out.vectors;
  fix_phases(dummy, out.vectors);
  return out;
}

Svd svd(const Mat& a) {
  check_nonempty_finite(a, "svd");
  Eigen::JacobiSVD<Mat> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Svd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  fix_phases(out.left, out.right);
  return out;
}

SubspaceBasis max_singular_subspace(const Mat& a, double rel_tol) {
  check_nonempty_finite(a, "max_singular_subspace");
  require(rel_tol > 0.0 && rel_tol < 1.0, "max_singular_subspace: rel_tol outside (0,1)");
  Svd dec = svd(a);
  double smax = dec.singular(0);
  if (smax <= 0.0) throw DegenerateInput("max_singular_subspace: zero matrix");
  Index r = 0;
  while (r < dec.singular.size() && dec.singular(r) >= (1.0 - rel_tol) * smax) ++r;
  return SubspaceBasis{a.cols(), dec.right.leftCols(r)};
}

Mat polar_partial_isometry(const Mat& a) {
  check_nonempty_finite(a, "polar_partial_isometry");
  Svd dec = svd(a);
  double smax = dec.singular.size() ? dec.singular(0) : 0.0;
  double cut = static_cast<double>(std::max(a.rows(), a.cols())) *
               std::numeric_limits<double>::epsilon() * smax;
  Index r = 0;
  while (r < dec.singular.size() && dec.singular(r) > cut) ++r;
  if (r == 0) return Mat::Zero(a.rows(), a.cols());
  return dec.left.leftCols(r) * dec.right.leftCols(r).adjoint();
}

}  // namespace gateaux
