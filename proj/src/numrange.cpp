#include "gateaux/numrange.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gateaux/linalg.hpp"

namespace gateaux {

namespace {

constexpr double kPi = std::numbers::pi;

void check_square(const Mat& m, const char* op) {
  require(m.rows() > 0 && m.rows() == m.cols(), std::string(op) + ": matrix not square");
  require(all_finite(m), std::string(op) + ": non-finite entries");
}

// Support function of W(M) in the direction e^{-i theta}.
double support(const Mat& m, double theta) {
  Mat h = re_part(std::polar(1.0, theta) * m);
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// Support value plus the attaining boundary point and vector.
struct BoundaryPoint {
  double theta = 0.0;
  double g = 0.0;
  cplx w;
  Vec x;
};

BoundaryPoint support_point(const Mat& m, double theta) {
  Mat h = re_part(std::polar(1.0, theta) * m);
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  Index last = h.rows() - 1;
  BoundaryPoint bp;
  bp.theta = theta;
  bp.g = es.eigenvalues()(last);
  bp.x = es.eigenvectors().col(last);
  bp.w = bp.x.dot(m * bp.x);
  return bp;
}

// Golden-section minimum of f on [lo, hi] down to bracket width `width`.
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

double cross2(cplx a, cplx b) { return std::imag(std::conj(a) * b); }

// Monotone-chain convex hull over indices into pts, counter-clockwise.
std::vector<int> convex_hull(const std::vector<cplx>& pts) {
  std::vector<int> idx(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (pts[a].real() != pts[b].real()) return pts[a].real() < pts[b].real();
    return pts[a].imag() < pts[b].imag();
  });
  idx.erase(std::unique(idx.begin(), idx.end(),
                        [&](int a, int b) { return std::abs(pts[a] - pts[b]) <= 1e-15; }),
            idx.end());
  size_t n = idx.size();
  if (n <= 2) return idx;
  std::vector<int> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross2(pts[hull[k - 1]] - pts[hull[k - 2]],
                            pts[idx[i]] - pts[hull[k - 2]]) <= 0)
      --k;
    hull[k++] = idx[i];
  }
  size_t lower = k + 1;
  for (size_t i = n - 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross2(pts[hull[k - 1]] - pts[hull[k - 2]],
                                pts[idx[i]] - pts[hull[k - 2]]) <= 0)
      --k;
    hull[k++] = idx[i];
  }
  hull.resize(k - 1);
  return hull;
}

cplx project_on_segment(cplx p, cplx a, cplx b, double* t_out = nullptr) {
  cplx d = b - a;
  double dd = std::norm(d);
  double t = dd > 0.0 ? std::clamp((std::conj(d) * (p - a)).real() / dd, 0.0, 1.0) : 0.0;
  if (t_out) *t_out = t;
  return a + t * d;
}

}  // namespace

double rho_star(const Mat& a) {
  check_square(a, "rho_star");
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

std::pair<double, Vec> rho_star_vector(const Mat& a) {
  check_square(a, "rho_star");
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(a));
  Index last = a.rows() - 1;
  return {es.eigenvalues()(last), es.eigenvectors().col(last)};
}

ZeroMembership contains_zero(const Mat& m, double tol) {
  check_square(m, "contains_zero");
  require(tol >= 0.0, "contains_zero: negative tolerance");
  constexpr int kGrid = 720;
  std::vector<double> g(kGrid);
  for (int j = 0; j < kGrid; ++j) g[j] = support(m, 2.0 * kPi * j / kGrid);
  auto eval = [&](double th) { return support(m, th); };
  double best_theta = 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < kGrid; ++j) {
    double prev = g[(j + kGrid - 1) % kGrid];
    double next = g[(j + 1) % kGrid];
    if (g[j] > prev || g[j] > next) continue;  // refine local minima only
    double lo = 2.0 * kPi * (j - 1) / kGrid;
    double hi = 2.0 * kPi * (j + 1) / kGrid;
    double th = golden_min(eval, lo, hi, 1e-10);
    double val = eval(th);
    if (val < best) {
      best = val;
      best_theta = th < 0 ? th + 2.0 * kPi : th;
    }
  }
  return ZeroMembership{best >= -tol, best_theta, best};
}

namespace {

// The constructive search works on N = (M - zI)/s with target 0; every helper
// below lives in those normalized units.
struct RangeSearch {
  const Mat& n;
  double tol;
  int budget = 200;

  cplx value(const Vec& x) const { return x.dot(n * x); }

  // Realize a target on the segment [w1, w2] = [value(x1), value(x2)].
  // The phase of x2 is chosen so the imaginary part of the transformed value
  // vanishes along the whole path; bisection then pins the real part.
  Vec path_realize(const Vec& x1, cplx w1, const Vec& x2, cplx w2, cplx target) const {
    cplx span = w1 - w2;
    if (std::abs(span) <= 1e-15 * (1.0 + std::abs(w1))) return x1;
    double s = std::clamp(((target - w2) / span).real(), 0.0, 1.0);
    Mat b = (n - w2 * Mat::Identity(n.rows(), n.cols())) / span;
    Mat kb = im_part(b);
    cplx c = x1.dot(kb * x2);
    double psi = std::abs(c) < 1e-300 ? 0.0 : kPi / 2.0 - std::arg(c);
    Vec x2a = std::polar(1.0, psi) * x2;
    Vec x2b = -x2a;  // the other admissible root
    if (((x1 + x2b) * 0.5).norm() > ((x1 + x2a) * 0.5).norm()) x2a = x2b;
    auto val_at = [&](double t) {
      Vec y = (1.0 - t) * x1 + t * x2a;
      double ny = y.norm();
      if (ny < 1e-12) return 0.5;  // treated as mid value; never hit in practice
      y /= ny;
      return (y.dot(b * y)).real();
    };
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
      double mid = 0.5 * (lo + hi);
      double gm = val_at(mid);
      if (std::abs(gm - s) <= 1e-15) {
        lo = hi = mid;
        break;
      }
      if (gm >= s)
        lo = mid;
      else
        hi = mid;
    }
    double t = 0.5 * (lo + hi);
    Vec y = (1.0 - t) * x1 + t * x2a;
    return y / y.norm();
  }

  // Closed-form zero of the Rayleigh quotient on the boundary face in
  // direction theta; empty on failure.
  std::optional<Vec> face_realize(double theta) const {
    cplx rot = std::polar(1.0, theta);
    Mat h = re_part(rot * n);
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    Index dim = n.rows();
    double top = es.eigenvalues()(dim - 1);
    double width = std::clamp(0.01 * tol, 1e-12, 1e-7);
    Index first = dim - 1;
    while (first > 0 && es.eigenvalues()(first - 1) >= top - width) --first;
    Mat q = es.eigenvectors().rightCols(dim - first);
    Mat sr = re_part(Mat(q.adjoint() * (im_part(rot * n)) * q));
    Eigen::SelfAdjointEigenSolver<Mat> fs(sr);
    double smin = fs.eigenvalues()(0);
    double smax = fs.eigenvalues()(sr.rows() - 1);
    if (smin > 0.0 || smax < 0.0) return std::nullopt;
    Vec y;
    if (smax - smin <= 0.0) {
      y = q.col(0);
    } else {
      double c2 = std::clamp(-smin / (smax - smin), 0.0, 1.0);
      Vec vmax = fs.eigenvectors().col(sr.rows() - 1);
      Vec vmin = fs.eigenvectors().col(0);
      y = q * (std::sqrt(c2) * vmax + std::sqrt(1.0 - c2) * vmin);
    }
    y /= y.norm();
    if (std::abs(value(y)) > tol) return std::nullopt;
    return y;
  }
};

}  // namespace

RangeCertificate range_point_certificate(const Mat& m, cplx z, double tol) {
  check_square(m, "range_point_certificate");
  require(tol > 0.0, "range_point_certificate: tolerance must be positive");
  Index dim = m.rows();
  double scale = std::max(op_norm(m), std::abs(z));
  auto finish = [&](const Vec& y) {
    cplx got = y.dot(m * y);
    return RangeCertificate{y, z, std::abs(got - z)};
  };
  if (scale == 0.0) return finish(Vec::Unit(dim, 0));

  Mat n = (m - z * Mat::Identity(dim, dim)) / scale;
  double tol_n = tol / scale;
  RangeSearch search{n, tol_n};

  // Diagonal entries are range values; cheap exact hits first.
  for (Index i = 0; i < dim; ++i)
    if (std::abs(n(i, i)) <= 0.5 * tol_n) return finish(Vec::Unit(dim, i));

  // Boundary scan: support minimum decides membership, the sampled boundary
  // points seed the interior search.
  std::vector<BoundaryPoint> pts;
  constexpr int kGrid = 360;
  pts.reserve(kGrid + 64);
  for (int j = 0; j < kGrid; ++j)
    pts.push_back(support_point(n, 2.0 * kPi * j / kGrid));
  double gmin = std::numeric_limits<double>::infinity();
  double theta_min = 0.0;
  for (int j = 0; j < kGrid; ++j) {
    double prev = pts[(j + kGrid - 1) % kGrid].g;
    double next = pts[(j + 1) % kGrid].g;
    if (pts[j].g > prev || pts[j].g > next) continue;
    auto eval = [&](double th) { return support(n, th); };
    double th = golden_min(eval, pts[j].theta - 2.0 * kPi / kGrid,
                           pts[j].theta + 2.0 * kPi / kGrid, 1e-10);
    double val = support(n, th);
    if (val < gmin) {
      gmin = val;
      theta_min = th;
    }
  }
  if (gmin < -tol_n) throw SearchFailure("range_point_certificate: target outside the numerical range");

  for (const auto& bp : pts)
    if (std::abs(bp.w) <= 0.5 * tol_n) return finish(bp.x);

  // Target on (or within tol of) the boundary: zero the tangential component
  // on the supporting face in closed form.
  if (gmin <= 0.6 * tol_n) {
    if (auto y = search.face_realize(theta_min)) return finish(*y);
  }

  // Interior target: find a triangle of sampled boundary points around 0 and
  // realize it with two segment paths.
  while (true) {
    std::vector<cplx> ws(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) ws[i] = pts[i].w;
    std::vector<int> hull = convex_hull(ws);

    if (hull.size() <= 2) {
      const auto& a = pts[hull.front()];
      const auto& b = pts[hull.back()];
      cplx p = project_on_segment(0.0, a.w, b.w);
      if (std::abs(p) <= tol_n) {
        Vec y = search.path_realize(a.x, a.w, b.x, b.w, p);
        RangeCertificate cert = finish(y);
        if (cert.residual <= tol) return cert;
      }
      throw SearchFailure("range_point_certificate: degenerate range, target unreachable");
    }

    size_t h = hull.size();
    bool inside = true;
    for (size_t i = 0; i < h; ++i) {
      cplx va = ws[hull[i]];
      cplx vb = ws[hull[(i + 1) % h]];
      if (cross2(vb - va, -va) < 0.0) {
        inside = false;
        break;
      }
    }

    if (inside) {
      // Fan triangulation from hull[0]; pick the triangle holding 0.
      cplx v0 = ws[hull[0]];
      for (size_t i = 1; i + 1 < h; ++i) {
        cplx v1 = ws[hull[i]];
        cplx v2 = ws[hull[i + 1]];
        double s0 = cross2(v1 - v0, -v0);
        double s1 = cross2(v2 - v1, -v1);
        double s2 = cross2(v0 - v2, -v2);
        if (s0 < -1e-18 || s1 < -1e-18 || s2 < -1e-18) continue;
        const auto& p1 = pts[hull[i]];
        const auto& p2 = pts[hull[i + 1]];
        const auto& p3 = pts[hull[0]];
        // q = exit of the ray p3 -> 0 through the opposite edge [p1, p2].
        Eigen::Matrix2d lhs;
        cplx e = p2.w - p1.w;
        lhs << -p3.w.real(), -e.real(), -p3.w.imag(), -e.imag();
        Eigen::Vector2d rhs(p1.w.real() - p3.w.real(), p1.w.imag() - p3.w.imag());
        Eigen::Vector2d au = lhs.fullPivLu().solve(rhs);
        double u = std::clamp(au(1), 0.0, 1.0);
        cplx q_target = p1.w + u * e;
        Vec eta_q = search.path_realize(p1.x, p1.w, p2.x, p2.w, q_target);
        cplx q_hat = search.value(eta_q);
        cplx t2 = project_on_segment(0.0, p3.w, q_hat);
        Vec y = search.path_realize(p3.x, p3.w, eta_q, q_hat, t2);
        RangeCertificate cert = finish(y);
        if (cert.residual <= tol) return cert;
        // Pinch polish: shrink toward 0 along fresh supporting points.
        for (int round = 0; round < 30 && cert.residual > tol; ++round) {
          cplx v = search.value(y);
          if (std::abs(v) <= tol_n) break;
          BoundaryPoint far = support_point(n, -std::arg(-v));
          cplx t = project_on_segment(0.0, v, far.w);
          y = search.path_realize(y, v, far.x, far.w, t);
          cert = finish(y);
        }
        if (cert.residual <= tol) return cert;
        throw SearchFailure("range_point_certificate: path refinement stalled");
      }
      // Numerical inconsistency between the inclusion test and the fan:
      // fall through to refinement.
    }

    // 0 outside the inscribed polygon: extend it toward 0 or accept a
    // near-boundary projection.
    double dist = std::numeric_limits<double>::infinity();
    cplx nearest = 0.0;
    size_t edge = 0;
    for (size_t i = 0; i < h; ++i) {
      cplx p = project_on_segment(0.0, ws[hull[i]], ws[hull[(i + 1) % h]]);
      if (std::abs(p) < dist) {
        dist = std::abs(p);
        nearest = p;
        edge = i;
      }
    }
    if (dist <= 0.9 * tol_n) {
      const auto& a = pts[hull[edge]];
      const auto& b = pts[hull[(edge + 1) % h]];
      Vec y = search.path_realize(a.x, a.w, b.x, b.w, nearest);
      RangeCertificate cert = finish(y);
      if (cert.residual <= tol) return cert;
    }
    if (search.budget-- <= 0)
      throw SearchFailure("range_point_certificate: refinement budget exhausted");
    double theta_new = -std::arg(-nearest);
    BoundaryPoint fresh = support_point(n, theta_new);
    if (fresh.g < -tol_n)
      throw SearchFailure("range_point_certificate: target outside the numerical range");
    if (fresh.g <= 0.6 * tol_n) {
      if (auto y = search.face_realize(theta_new)) return finish(*y);
    }
    bool novel = true;
    for (const auto& bp : pts)
      if (std::abs(bp.w - fresh.w) <= 1e-15) {
        novel = false;
        break;
      }
    if (!novel)
      throw SearchFailure("range_point_certificate: support refinement stalled");
    pts.push_back(fresh);
  }
}

}  // namespace gateaux
