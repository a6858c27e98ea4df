#include "gateaux/orthogonality.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "gateaux/linalg.hpp"
#include "gateaux/numrange.hpp"
#include "gateaux/random.hpp"

namespace gateaux {

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi,
                  double width) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > width) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

void check_same_square(const Mat& a, const Mat& b, const char* op) {
  require(a.rows() > 0 && a.rows() == a.cols(), std::string(op) + ": matrix not square");
  require(b.rows() == a.rows() && b.cols() == a.cols(),
          std::string(op) + ": dimension mismatch");
  require(all_finite(a) && all_finite(b), std::string(op) + ": non-finite entries");
}

std::vector<cplx> constraint_values(const Mat& sigma, const std::vector<Mat>& c_list) {
  std::vector<cplx> t(c_list.size());
  for (size_t j = 0; j < c_list.size(); ++j) t[j] = (sigma * c_list[j]).trace();
  return t;
}

double objective_of(const std::vector<cplx>& t) {
  double f = 0.0;
  for (cplx v : t) f += std::norm(v);
  return f;
}

// Frobenius projection of sigma onto the affine space {tr(X)=1, tr(X C_j)=0},
// then eigenvalue clipping back to the density cone. Returns the clipped
// candidate; the caller keeps it only if the objective improves.
Mat affine_polish(const Mat& sigma, const std::vector<Mat>& c_list) {
  Index d = sigma.rows();
  std::vector<Mat> normals;
  std::vector<double> targets;
  normals.push_back(Mat::Identity(d, d));
  targets.push_back(1.0);
  for (const Mat& c : c_list) {
    Mat h = re_part(c);
    Mat k = im_part(c);
    if (h.norm() > 1e-14) {
      normals.push_back(h);
      targets.push_back(0.0);
    }
    if (k.norm() > 1e-14) {
      normals.push_back(k);
      targets.push_back(0.0);
    }
  }
  size_t m = normals.size();
  RMat gram(m, m);
  RVec resid(m);
  for (size_t a = 0; a < m; ++a) {
    resid(a) = (sigma * normals[a]).trace().real() - targets[a];
    for (size_t b = 0; b <= a; ++b) {
      double g = (normals[a] * normals[b]).trace().real();
      gram(a, b) = g;
      gram(b, a) = g;
    }
  }
  RVec coef = gram.completeOrthogonalDecomposition().solve(resid);
  Mat x = sigma;
  for (size_t a = 0; a < m; ++a) x -= cplx(coef(a), 0.0) * normals[a];
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(x));
  RVec vals = es.eigenvalues().cwiseMax(0.0);
  double tr = vals.sum();
  if (tr <= 1e-14) return sigma;
  vals /= tr;
  return es.eigenvectors() * vals.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

DensityMatrix DensityMatrix::validated(const Mat& m) {
  require(m.rows() > 0 && m.rows() == m.cols(), "density: matrix not square");
  require(all_finite(m), "density: non-finite entries");
  double dev = (m - m.adjoint()).norm();
  require(dev <= 1e-12 * std::max(1.0, m.norm()), "density: not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(m), Eigen::EigenvaluesOnly);
  require(es.eigenvalues()(0) >= -1e-10, "density: negative eigenvalue");
  require(std::abs(m.trace().real() - 1.0) <= 1e-10, "density: trace not one");
  return DensityMatrix{m};
}

FeasibilityResult density_face_feasibility(const std::vector<Mat>& c_list,
                                           double tol, int max_iters) {
  require(!c_list.empty(), "feasibility: empty constraint list");
  Index d = c_list[0].rows();
  require(d > 0 && c_list[0].cols() == d, "feasibility: constraints not square");
  for (const Mat& c : c_list)
    require(c.rows() == d && c.cols() == d && all_finite(c),
            "feasibility: constraint shape mismatch");
  require(tol > 0.0 && max_iters > 0, "feasibility: bad parameters");

  const double feasible_at = tol * tol;
  const double infeasible_at = std::max(1e-8, 1e4 * tol * tol);

  FeasibilityResult out;
  Mat sigma = Mat::Identity(d, d) / static_cast<double>(d);
  double lower = 0.0;
  double f = 0.0;
  Mat grad;
  int it = 0;
  for (; it < max_iters; ++it) {
    std::vector<cplx> t = constraint_values(sigma, c_list);
    f = objective_of(t);
    if (f <= 0.25 * feasible_at) break;

    Mat acc = Mat::Zero(d, d);
    for (size_t j = 0; j < c_list.size(); ++j) acc += std::conj(t[j]) * c_list[j];
    grad = 2.0 * re_part(acc);
    Eigen::SelfAdjointEigenSolver<Mat> es(grad);
    double lambda_min = es.eigenvalues()(0);
    Vec v = es.eigenvectors().col(0);
    double gap = 2.0 * f - lambda_min;  // tr(sigma G) = 2 f for this objective
    lower = std::max(lower, f - gap);
    if (lower > infeasible_at) break;
    if (gap <= 1e-18) break;

    std::vector<cplx> s(c_list.size());
    for (size_t j = 0; j < c_list.size(); ++j) s[j] = v.dot(c_list[j] * v);
    double den = 0.0;
    double num = 0.0;
    for (size_t j = 0; j < c_list.size(); ++j) {
      cplx dj = s[j] - t[j];
      den += std::norm(dj);
      num += (std::conj(t[j]) * dj).real();
    }
    if (den <= 1e-300) break;
    double gamma = std::clamp(-num / den, 0.0, 1.0);
    if (gamma == 0.0) break;
    sigma = (1.0 - gamma) * sigma + gamma * (v * v.adjoint());

    if ((it + 1) % 25 == 0) {
      Mat polished = affine_polish(sigma, c_list);
      if (objective_of(constraint_values(polished, c_list)) <
          objective_of(constraint_values(sigma, c_list)))
        sigma = polished;
    }
  }

  sigma = re_part(sigma);
  std::vector<cplx> t = constraint_values(sigma, c_list);
  f = objective_of(t);
  if (grad.size() == 0) {
    Mat acc = Mat::Zero(d, d);
    for (size_t j = 0; j < c_list.size(); ++j) acc += std::conj(t[j]) * c_list[j];
    grad = 2.0 * re_part(acc);
  }

  out.sigma = sigma;
  out.objective = f;
  out.lower_bound = lower;
  out.gradient = grad;
  out.iterations = it;
  if (f <= feasible_at)
    out.status = FeasibilityStatus::Feasible;
  else if (lower > infeasible_at)
    out.status = FeasibilityStatus::Infeasible;
  else
    out.status = FeasibilityStatus::Indeterminate;
  return out;
}

namespace {

// Descends c -> ||A - sum c_j B_j|| from c0 by steepest subgradient steps with
// step halving; success is a norm at least `margin` below ||A||.
struct WitnessSearch {
  const Mat& a;
  const std::vector<Mat>& b_list;
  double norm_a;
  double margin;

  Mat combine(const Vec& c) const {
    Mat m = a;
    for (size_t j = 0; j < b_list.size(); ++j) m -= c(j) * b_list[j];
    return m;
  }

  bool attempt(Vec c, double step0, Vec* c_out, double* achieved) const {
    double cur = op_norm(combine(c));
    double step = step0;
    for (int iter = 0; iter < 500; ++iter) {
      if (cur <= norm_a - margin) break;
      Svd s = svd(combine(c));
      Vec u = s.left.col(0);
      Vec v = s.right.col(0);
      Vec p(b_list.size());
      for (size_t j = 0; j < b_list.size(); ++j) p(j) = u.dot(b_list[j] * v);
      double pn = p.norm();
      if (pn <= 1e-15) break;
      Vec cand = c + (step / pn) * p.conjugate();
      double val = op_norm(combine(cand));
      if (val < cur - 1e-15) {
        c = cand;
        cur = val;
        step = std::min(step * 1.5, 4.0 * step0);
      } else {
        step *= 0.5;
        if (step < 1e-14 * step0) break;
      }
    }
    *c_out = c;
    *achieved = cur;
    return cur <= norm_a - margin;
  }
};

}  // namespace

OrthogonalityDecision bj_pair(const Mat& a, const Mat& b, double tol) {
  check_same_square(a, b, "bj_pair");
  require(tol > 0.0, "bj_pair: tolerance must be positive");
  OrthogonalityDecision out;
  double na = op_norm(a);
  double nb = op_norm(b);
  if (na == 0.0) {
    out.verdict = Verdict::Orthogonal;
    out.eta = Vec::Unit(a.rows(), 0);
    out.residuals = {0.0, 0.0};
    out.note = "zero base point is orthogonal to everything";
    return out;
  }
  if (nb == 0.0) {
    Svd s = svd(a);
    out.verdict = Verdict::Orthogonal;
    out.eta = s.right.col(0);
    Vec eta = *out.eta;
    out.residuals = {std::abs((a * eta).dot(b * eta)),
                     std::abs((a * eta).norm() - na)};
    out.note = "zero direction";
    return out;
  }

  double scale = na * nb;
  double tol_n = std::clamp(tol / scale, 1e-13, 1e-6);

  ZeroMembership first;
  for (double rel : {1e-8, 1e-12}) {
    SubspaceBasis k = max_singular_subspace(a, rel);
    Mat cn = (k.columns.adjoint() * (a.adjoint() * b) * k.columns) / scale;
    ZeroMembership zm = contains_zero(cn, 0.5 * tol_n);
    if (rel == 1e-8) first = zm;
    if (!zm.contains_zero) break;  // certificate unreachable on this subspace
    try {
      RangeCertificate rc = range_point_certificate(cn, cplx(0.0, 0.0), tol_n);
      Vec eta = k.columns * rc.vector;
      double r1 = std::abs((a * eta).dot(b * eta));
      double r2 = std::abs((a * eta).norm() - na);
      if (r1 <= tol && r2 <= tol) {
        out.verdict = Verdict::Orthogonal;
        out.eta = eta;
        out.residuals = {r1, r2};
        return out;
      }
    } catch (const SearchFailure&) {
      // fall through to the tighter subspace
    }
  }

  if (first.contains_zero) {
    out.verdict = Verdict::Indeterminate;
    out.note = "zero sits in the compressed range but no certificate met the tolerance";
    return out;
  }

  // Support minimum is negative: descend along the rotated direction.
  double phase = first.witness_angle;
  auto h = [&](double t) { return op_norm(a + (t * std::polar(1.0, phase)) * b); };
  double hi = 2.0 * na / nb;
  double t_star = golden_min(h, 0.0, hi, 1e-9 * hi);
  double achieved = h(t_star);
  if (achieved <= na - 1e-9) {
    out.verdict = Verdict::NotOrthogonal;
    out.lambda = t_star * std::polar(1.0, phase);
    out.achieved_norm = achieved;
    out.residuals = {na - achieved};
    return out;
  }
  out.verdict = Verdict::Indeterminate;
  out.note = "negative support value but no verified norm decrease";
  return out;
}

OrthogonalityDecision bj_subspace(const Mat& a, const std::vector<Mat>& b_list,
                                  double tol, std::uint64_t seed) {
  require(a.rows() > 0 && a.rows() == a.cols(), "bj_subspace: matrix not square");
  require(all_finite(a), "bj_subspace: non-finite entries");
  for (const Mat& b : b_list) check_same_square(a, b, "bj_subspace");
  require(tol > 0.0, "bj_subspace: tolerance must be positive");

  OrthogonalityDecision out;
  Index dim = a.rows();
  double na = op_norm(a);
  if (na == 0.0) {
    out.verdict = Verdict::Orthogonal;
    out.rho = DensityMatrix{Mat(Vec::Unit(dim, 0) * Vec::Unit(dim, 0).adjoint())};
    out.residuals = {0.0, 0.0};
    out.note = "zero base point is orthogonal to everything";
    return out;
  }

  SubspaceBasis k = max_singular_subspace(a, 1e-8);
  std::vector<Mat> c_list;
  std::vector<double> nb(b_list.size());
  for (size_t j = 0; j < b_list.size(); ++j) {
    nb[j] = op_norm(b_list[j]);
    if (nb[j] == 0.0) continue;  // trivially annihilated
    c_list.push_back(Mat(k.columns.adjoint() * (a.adjoint() * b_list[j]) * k.columns) /
                     (na * nb[j]));
  }

  auto lift_and_verify = [&](const Mat& sigma) -> bool {
    Mat rho = k.columns * sigma * k.columns.adjoint();
    double r_norm = std::abs((rho * (a.adjoint() * a)).trace().real() - na * na);
    double worst = 0.0;
    for (size_t j = 0; j < b_list.size(); ++j) {
      if (nb[j] == 0.0) continue;
      worst = std::max(worst,
                       std::abs((rho * (a.adjoint() * b_list[j])).trace()) / (na * nb[j]));
    }
    if (worst > tol || r_norm > tol * na * na) return false;
    out.verdict = Verdict::Orthogonal;
    out.rho = DensityMatrix{rho};
    out.residuals = {worst, r_norm};
    return true;
  };

  if (c_list.empty()) {
    Mat sigma = Mat::Zero(k.dim(), k.dim());
    sigma(0, 0) = 1.0;  // largest singular direction attains the norm exactly
    if (lift_and_verify(sigma)) return out;
  } else {
    FeasibilityResult fw = density_face_feasibility(c_list, tol, 20000);
    if (fw.status == FeasibilityStatus::Feasible && lift_and_verify(fw.sigma))
      return out;
    if (fw.status == FeasibilityStatus::Feasible) {
      out.verdict = Verdict::Indeterminate;
      out.note = "feasible density failed lifted re-verification";
      return out;
    }
  }

  // Feasibility refuted or inconclusive: look for a verified witness.
  double nbmax = 0.0;
  for (double x : nb) nbmax = std::max(nbmax, x);
  if (nbmax == 0.0) {
    out.verdict = Verdict::Indeterminate;
    out.note = "all directions vanish yet norm attainment could not be certified";
    return out;
  }
  WitnessSearch search{a, b_list, na, 1e-9};
  double step0 = 0.5 * na / nbmax;
  Rng rng(seed);
  Vec c_best;
  double achieved = 0.0;
  for (int restart = 0; restart <= 64; ++restart) {
    Vec c0 = Vec::Zero(static_cast<Index>(b_list.size()));
    if (restart > 0)
      for (Index j = 0; j < c0.size(); ++j) c0(j) = step0 * rng.cnormal();
    if (search.attempt(c0, step0, &c_best, &achieved)) {
      Mat w = a - search.combine(c_best);
      out.verdict = Verdict::NotOrthogonal;
      out.witness = w;
      out.coefficients = c_best;
      out.achieved_norm = achieved;
      out.residuals = {na - achieved};
      return out;
    }
  }
  out.verdict = Verdict::Indeterminate;
  out.note = "no annihilating density and no verified norm decrease";
  return out;
}

DensityMatrix state_certificate(const Mat& x, const std::vector<Mat>& b_list) {
  require(x.rows() > 0 && x.rows() == x.cols(), "state_certificate: matrix not square");
  require(std::abs(op_norm(x) - 1.0) <= 1e-8,
          "state_certificate: base point must have unit norm");
  OrthogonalityDecision dec = bj_subspace(x, b_list);
  require(dec.verdict == Verdict::Orthogonal,
          "state_certificate: base point is not orthogonal to the subspace");
  const Mat& rho = dec.rho->matrix;
  double r1 = std::abs((rho * (x.adjoint() * x)).trace().real() - 1.0);
  double worst = 0.0;
  for (const Mat& y : b_list)
    worst = std::max(worst, std::abs((rho * (x.adjoint() * y)).trace()));
  if (r1 > 1e-6 || worst > 1e-6)
    throw VerificationFailure("state_certificate: certificate residuals exceed tolerance");
  return *dec.rho;
}

}  // namespace gateaux
