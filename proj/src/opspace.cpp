#include "gateaux/opspace.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "gateaux/linalg.hpp"
#include "gateaux/numrange.hpp"
#include "gateaux/random.hpp"

namespace gateaux {

Mat map_blocks(const Mat& assembled, Index k,
               const std::function<Mat(const Mat&)>& phi) {
  require(k > 0 && assembled.rows() == assembled.cols() &&
              assembled.rows() % k == 0,
          "map_blocks: assembled matrix is not n*k square");
  Index n = assembled.rows() / k;
  Mat first = phi(assembled.block(0, 0, k, k));
  require(first.rows() == first.cols() && first.rows() > 0,
          "map_blocks: block images must be square");
  Index m = first.rows();
  Mat out(n * m, n * m);
  out.block(0, 0, m, m) = first;
  for (Index p = 0; p < n; ++p)
    for (Index q = 0; q < n; ++q) {
      if (p == 0 && q == 0) continue;
      out.block(p * m, q * m, m, m) = phi(assembled.block(p * k, q * k, k, k));
    }
  return out;
}

BlockOperator BlockOperator::scalars(const Mat& m) {
  require(m.rows() > 0 && m.rows() == m.cols() && all_finite(m),
          "block operator: scalar entries need a square finite matrix");
  BlockOperator v;
  v.base = Base::Scalars;
  v.n = m.rows();
  v.entry_dim = 1;
  v.data = {m};
  return v;
}

BlockOperator BlockOperator::full_matrix(const Mat& assembled, Index k) {
  require(k > 0 && assembled.rows() == assembled.cols() &&
              assembled.rows() % k == 0 && assembled.rows() > 0,
          "block operator: assembled matrix must be n*k square");
  require(all_finite(assembled), "block operator: non-finite entries");
  BlockOperator v;
  v.base = Base::FullMatrix;
  v.n = assembled.rows() / k;
  v.entry_dim = k;
  v.data = {assembled};
  return v;
}

BlockOperator BlockOperator::functions(const std::vector<std::string>& labels,
                                       const std::vector<Mat>& evaluations) {
  require(!labels.empty() && labels.size() == evaluations.size(),
          "block operator: one evaluation per label required");
  Index n = evaluations[0].rows();
  for (const Mat& e : evaluations)
    require(e.rows() == n && e.cols() == n && n > 0 && all_finite(e),
            "block operator: evaluations must share a square shape");
  BlockOperator v;
  v.base = Base::Functions;
  v.n = n;
  v.entry_dim = 1;
  v.labels = labels;
  v.data = evaluations;
  return v;
}

Mat BlockOperator::block(Index p, Index q, Index i) const {
  require(i >= 0 && i < static_cast<Index>(data.size()),
          "block operator: realization index out of range");
  if (base == Base::Functions) {
    require(p >= 0 && p < n && q >= 0 && q < n, "block operator: index out of range");
    return data[i].block(p, q, 1, 1);
  }
  require(p >= 0 && p < n && q >= 0 && q < n, "block operator: index out of range");
  return data[i].block(p * entry_dim, q * entry_dim, entry_dim, entry_dim);
}

Mat CbFactorization::apply(const Mat& a) const {
  return w_left.adjoint() * a * w_right;
}

Mat CbFactorization::apply_blocks(const Mat& u, Index k) const {
  return map_blocks(u, k, [this](const Mat& a) { return apply(a); });
}

Mat UcpMap::apply(const Mat& a) const {
  require(a.rows() == domain_dim && a.cols() == domain_dim,
          "ucp map: argument dimension mismatch");
  return isometry.adjoint() * kron(a, Mat::Identity(mult, mult)) * isometry;
}

Mat UcpMap::apply_blocks(const Mat& s, Index k) const {
  require(k == domain_dim, "ucp map: block size mismatch");
  return map_blocks(s, k, [this](const Mat& a) { return apply(a); });
}

Mat UcpMap::choi() const {
  Index k = domain_dim;
  Index m = codomain_dim();
  Mat out(k * m, k * m);
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j) {
      Mat e = Mat::Zero(k, k);
      e(i, j) = 1.0;
      out.block(i * m, j * m, m, m) = apply(e);
    }
  return out;
}

CompressionMap CompressionMap::from_ucp(const UcpMap& phi) {
  return CompressionMap{phi.isometry, phi.isometry, phi.domain_dim, phi.mult};
}

CompressionMap CompressionMap::from_cb(const CbFactorization& cb,
                                       Index domain_dim) {
  return CompressionMap{cb.w_left, cb.w_right, domain_dim, 1};
}

Mat CompressionMap::apply(const Mat& a) const {
  require(a.rows() == domain_dim && a.cols() == domain_dim,
          "compression map: argument dimension mismatch");
  if (mult == 1) return left.adjoint() * a * right;
  return left.adjoint() * kron(a, Mat::Identity(mult, mult)) * right;
}

Mat CompressionMap::apply_blocks(const Mat& s) const {
  return map_blocks(s, domain_dim, [this](const Mat& a) { return apply(a); });
}

double matrix_norm(const BlockOperator& v) {
  if (v.base == BlockOperator::Base::Functions) {
    double best = 0.0;
    for (const Mat& e : v.data) best = std::max(best, op_norm(e));
    return best;
  }
  return op_norm(v.data[0]);
}

DualFunctional hahn_banach_functional(const BlockOperator& v) {
  require(v.base != BlockOperator::Base::Functions,
          "hahn_banach_functional: needs a single-matrix realization");
  Svd s = svd(v.data[0]);
  if (s.singular(0) <= 0.0)
    throw DegenerateInput("hahn_banach_functional: zero element has no attaining functional");
  return DualFunctional{s.right.col(0), s.left.col(0)};
}

namespace {

// Square root of a PSD Gram matrix with tiny negative rounding clipped.
Mat psd_sqrt(const Mat& gram) {
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(gram));
  RVec vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * vals.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

// Stacks the columns of p (m x n) into slots of length m.
Vec stack_columns(const Mat& p) {
  Vec out(p.rows() * p.cols());
  for (Index q = 0; q < p.cols(); ++q) out.segment(q * p.rows(), p.rows()) = p.col(q);
  return out;
}

}  // namespace

CbFactorization cb_factorization(const DualFunctional& f, Index n, Index k) {
  require(n > 0 && k > 0, "cb_factorization: dimensions must be positive");
  require(f.xi.size() == n * k && f.zeta.size() == n * k,
          "cb_factorization: functional lives on the wrong space");
  require(std::abs(f.xi.norm() - 1.0) <= 1e-10 &&
              std::abs(f.zeta.norm() - 1.0) <= 1e-10,
          "cb_factorization: functional vectors must be unit");
  Mat xi_mat(k, n), zeta_mat(k, n);
  for (Index q = 0; q < n; ++q) {
    xi_mat.col(q) = f.xi.segment(q * k, k);
    zeta_mat.col(q) = f.zeta.segment(q * k, k);
  }
  CbFactorization out;
  out.w_right = polar_partial_isometry(xi_mat);
  out.w_left = polar_partial_isometry(zeta_mat);
  out.eta = stack_columns(psd_sqrt(xi_mat.adjoint() * xi_mat));
  out.xi_prime = stack_columns(psd_sqrt(zeta_mat.adjoint() * zeta_mat));
  return out;
}

UcpConstruction ucp_from_vector(const Vec& xi, Index n, Index k) {
  require(n > 0 && k > 0, "ucp_from_vector: dimensions must be positive");
  require(xi.size() == n * k, "ucp_from_vector: vector lives on the wrong space");
  require(std::abs(xi.norm() - 1.0) <= 1e-8, "ucp_from_vector: vector must be unit");
  Vec unit = xi / xi.norm();

  // Column q of t is xi_q (x) e_1 in the (content, multiplicity) stacking.
  Mat t = Mat::Zero(k * n, n);
  for (Index q = 0; q < n; ++q)
    for (Index i = 0; i < k; ++i) t(i * n, q) = unit(q * k + i);

  // One SVD drives both polar factors so the rank cut is consistent between
  // the partial isometry and its completion.
  Svd s = svd(t);
  double cut = static_cast<double>(k * n) *
               std::numeric_limits<double>::epsilon() * s.singular(0);
  Index r = 0;
  while (r < s.singular.size() && s.singular(r) > cut) ++r;
  Mat v = s.left.leftCols(r) * s.right.leftCols(r).adjoint();
  Mat p = s.right * s.singular.cast<cplx>().asDiagonal() * s.right.adjoint();

  if (r < n) {
    // Directions killed by p get deterministic Gram-Schmidt images orthogonal
    // to the realized range.
    Mat range = s.left.leftCols(r);
    Mat basis(k * n, n - r);
    Index filled = 0;
    for (Index cand = 0; cand < k * n && filled < basis.cols(); ++cand) {
      Vec w = Vec::Unit(k * n, cand);
      w -= range * (range.adjoint() * w);
      if (filled > 0)
        w -= basis.leftCols(filled) * (basis.leftCols(filled).adjoint() * w);
      double norm = w.norm();
      if (norm > 1e-6) basis.col(filled++) = w / norm;
    }
    require(filled == basis.cols(), "ucp_from_vector: isometry completion failed");
    v += basis * s.right.rightCols(n - r).adjoint();
  }

  UcpConstruction out;
  out.map = UcpMap{v, k, n};
  out.eta = stack_columns(p);
  double norm = out.eta.norm();
  if (norm > 0.0) out.eta /= norm;  // tr(p^2) = 1 already; rounding only
  return out;
}

FactorizationCertificate orthogonality_factorization(
    const BlockOperator& v, const std::vector<BlockOperator>& w_list) {
  require(v.base != BlockOperator::Base::Functions,
          "orthogonality_factorization: needs a single-matrix realization");
  Index n = v.n;
  Index k = v.entry_dim;
  std::vector<Mat> b_list;
  for (const BlockOperator& w : w_list) {
    require(w.base == v.base && w.n == n && w.entry_dim == k,
            "orthogonality_factorization: shapes differ");
    b_list.push_back(w.data[0]);
  }
  const Mat& a = v.data[0];
  double na = op_norm(a);
  require(na > 0.0, "orthogonality_factorization: zero base point");

  OrthogonalityDecision dec = bj_subspace(a, b_list);
  require(dec.verdict == Verdict::Orthogonal,
          "orthogonality_factorization: base point is not orthogonal to the span");

  FactorizationCertificate out;
  out.rho = *dec.rho;

  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(out.rho.matrix));
  Index top = out.rho.matrix.rows() - 1;
  if (es.eigenvalues()(top) < 1.0 - 1e-6) {
    out.note = "orthogonality density has rank > 1; mixed certificate only";
    return out;
  }

  // Rank-one density: the dominant eigenvector carries a norm-attaining
  // functional that vanishes on the span, and its factorization certifies
  // with the same vector on both sides.
  Vec eta0 = es.eigenvectors().col(top);
  Vec zeta0 = a * eta0;
  double attained = zeta0.norm();
  if (std::abs(attained - na) > 1e-6 * na) {
    out.note = "dominant density direction does not attain the norm";
    return out;
  }
  DualFunctional f{eta0, zeta0 / attained};
  CbFactorization cb = cb_factorization(f, n, k);
  Mat mv = cb.apply_blocks(a, k);
  Vec image = mv * cb.eta;
  double r_norm = std::abs(image.norm() - na);
  double r_pair = 0.0;
  double pair_scale = 1.0;
  for (const Mat& b : b_list) {
    Mat mw = cb.apply_blocks(b, k);
    r_pair = std::max(r_pair, std::abs(image.dot(mw * cb.eta)));
    pair_scale = std::max(pair_scale, na * op_norm(b));
  }
  out.residuals = {r_norm, r_pair};
  if (r_norm <= 1e-6 * std::max(1.0, na) && r_pair <= 1e-6 * pair_scale) {
    out.single_vector = true;
    out.factorization = cb;
  } else {
    out.note = "single-vector extraction failed re-verification";
  }
  return out;
}

SupportReport support_mapping_check(const CompressionMap& phi,
                                    const BlockOperator& v, Index levels,
                                    Index samples, std::uint64_t seed) {
  require(v.base != BlockOperator::Base::Functions,
          "support_mapping_check: needs a single-matrix realization");
  require(phi.domain_dim == v.entry_dim, "support_mapping_check: domain mismatch");
  SupportReport report;
  Mat image = phi.apply_blocks(v.data[0]);
  report.attainment_residual = std::abs(rho_star(image) - matrix_norm(v));

  Rng rng(seed);
  report.worst_margin = -std::numeric_limits<double>::infinity();
  for (Index level = 1; level <= levels; ++level) {
    for (Index s = 0; s < samples; ++s) {
      Mat w = rng.gaussian(level * phi.domain_dim, level * phi.domain_dim);
      Mat img = map_blocks(w, phi.domain_dim,
                           [&phi](const Mat& a) { return phi.apply(a); });
      double margin = rho_star(img) - op_norm(w);
      if (margin > report.worst_margin) {
        report.worst_margin = margin;
        report.worst_level = level;
      }
      ++report.samples_checked;
    }
  }
  report.valid =
      report.attainment_residual <= 1e-8 && report.worst_margin <= 1e-9;
  return report;
}

}  // namespace gateaux
