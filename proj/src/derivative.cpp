#include "gateaux/derivative.hpp"

#include <cmath>

#include "gateaux/linalg.hpp"
#include "gateaux/opspace.hpp"

namespace gateaux {

namespace {

void check_pair(const Mat& a, const Mat& b, const char* op) {
  require(a.rows() > 0 && a.rows() == a.cols(), std::string(op) + ": base point not square");
  require(b.rows() == a.rows() && b.cols() == a.cols(),
          std::string(op) + ": dimension mismatch");
  require(all_finite(a) && all_finite(b), std::string(op) + ": non-finite entries");
}

}  // namespace

DerivativeResult gd_opnorm(const Mat& a, const Mat& b) {
  check_pair(a, b, "gd_opnorm");
  double na = op_norm(a);
  if (na == 0.0) {
    Svd sb = svd(b);
    return DerivativeResult{sb.singular(0), sb.right.col(0), std::nullopt};
  }
  SubspaceBasis k = max_singular_subspace(a);
  Mat compressed = re_part(Mat(k.columns.adjoint() * (a.adjoint() * b) * k.columns));
  HermitianEigen eig = herm_eig(compressed);
  Index top = compressed.rows() - 1;
  Vec eta = k.columns * eig.vectors.col(top);
  return DerivativeResult{eig.values(top) / na, eta, std::nullopt};
}

std::pair<double, QuotientTrace> gd_fd_oracle_fn(
    const std::function<double(double)>& norm_at, double norm0, double tol) {
  require(tol > 0.0, "gd_fd_oracle: tolerance must be positive");
  QuotientTrace trace;
  double prev = 0.0;
  bool have_prev = false;
  for (int j = 10; j <= 40; ++j) {
    double t = std::ldexp(1.0, -j);
    double q = (norm_at(t) - norm0) / t;
    // Convexity makes the exact quotient nonincreasing in j; an increase can
    // only be rounding noise, so stop there without recording it.
    if (have_prev && q > prev) break;
    trace.steps.push_back({t, q});
    if (have_prev && std::abs(q - prev) <= tol) {
      prev = q;
      break;
    }
    prev = q;
    have_prev = true;
  }
  return {prev, trace};
}

std::pair<double, QuotientTrace> gd_fd_oracle(const Mat& a, const Mat& b,
                                              double tol) {
  check_pair(a, b, "gd_fd_oracle");
  double na = op_norm(a);
  return gd_fd_oracle_fn([&](double t) { return op_norm(a + t * b); }, na, tol);
}

double gd_phase(const Mat& a, const Mat& b, double phase) {
  return gd_opnorm(a, std::polar(1.0, phase) * b).value;
}

DerivativeResult gd_blockfun(const BlockOperator& f, const BlockOperator& g) {
  require(f.base == BlockOperator::Base::Functions &&
              g.base == BlockOperator::Base::Functions,
          "gd_blockfun: function-valued operators required");
  require(!f.labels.empty(), "gd_blockfun: empty label set");
  require(f.labels == g.labels, "gd_blockfun: label sets differ");
  require(f.n == g.n, "gd_blockfun: block sizes differ");
  double nf = matrix_norm(f);
  DerivativeResult best;
  bool found = false;
  for (size_t i = 0; i < f.labels.size(); ++i) {
    if (op_norm(f.data[i]) < (1.0 - 1e-8) * nf) continue;
    DerivativeResult at = gd_opnorm(f.data[i], g.data[i]);
    if (!found || at.value > best.value) {
      best = at;
      best.active_label = f.labels[i];
      found = true;
    }
  }
  return best;
}

OpsysVerification gd_opsys_verify(const BlockOperator& s1,
                                  const BlockOperator& s2, const UcpMap& phi,
                                  const Vec& eta, double tol) {
  require(s1.base == BlockOperator::Base::FullMatrix &&
              s2.base == BlockOperator::Base::FullMatrix,
          "gd_opsys_verify: matrix-valued operators required");
  require(s1.n == s2.n && s1.entry_dim == s2.entry_dim,
          "gd_opsys_verify: shapes differ");
  require(phi.domain_dim == s1.entry_dim, "gd_opsys_verify: map domain mismatch");
  require(eta.size() == s1.n * phi.codomain_dim(),
          "gd_opsys_verify: certificate vector has wrong length");

  OpsysVerification out;
  double ns1 = op_norm(s1.data[0]);
  if (ns1 == 0.0) {
    out.violation = "base point has zero norm";
    return out;
  }
  if (std::abs(eta.norm() - 1.0) > 1e-10) {
    out.violation = "certificate vector is not a unit vector";
    return out;
  }
  Mat m1 = phi.apply_blocks(s1.data[0], s1.entry_dim);
  out.norm_residual = std::abs(op_norm(m1) - ns1);
  if (out.norm_residual > tol) {
    out.violation = "map does not preserve the base-point norm";
    return out;
  }
  out.pairing_residual = std::abs((eta.dot(m1 * eta)).real() - ns1);
  if (out.pairing_residual > tol) {
    out.violation = "vector does not attain the norm in the numerical range";
    return out;
  }
  Mat m2 = phi.apply_blocks(s2.data[0], s2.entry_dim);
  out.accepted = true;
  out.value = ((m1 * eta).dot(m2 * eta)).real() / ns1;
  return out;
}

}  // namespace gateaux
