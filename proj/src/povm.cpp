#include "gateaux/povm.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "gateaux/derivative.hpp"
#include "gateaux/linalg.hpp"
#include "gateaux/opspace.hpp"

namespace gateaux {

namespace {

void check_povm_shape(const FinitePovm& nu, const char* op) {
  require(!nu.labels.empty() && nu.labels.size() == nu.effects.size(),
          std::string(op) + ": one effect per label required");
  require(nu.dim > 0, std::string(op) + ": dimension must be positive");
  for (const Mat& e : nu.effects)
    require(e.rows() == nu.dim && e.cols() == nu.dim && all_finite(e),
            std::string(op) + ": effect shape mismatch");
}

}  // namespace

Mat FinitePovm::total() const {
  Mat sum = Mat::Zero(dim, dim);
  for (const Mat& e : effects) sum += e;
  return sum;
}

PovmValidation validate_povm(const FinitePovm& nu) {
  check_povm_shape(nu, "validate_povm");
  PovmValidation out;
  out.valid_povm = true;
  for (size_t i = 0; i < nu.effects.size(); ++i) {
    const Mat& e = nu.effects[i];
    double herm = (e - e.adjoint()).norm();
    if (herm > 1e-12 * std::max(1.0, e.norm())) {
      out.valid_povm = false;
      out.violations.push_back("effect " + nu.labels[i] + " is not Hermitian");
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(re_part(e), Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -1e-10) {
      out.valid_povm = false;
      out.violations.push_back("effect " + nu.labels[i] + " has a negative eigenvalue");
    }
    if (es.eigenvalues()(nu.dim - 1) > 1.0 + 1e-10) {
      out.valid_povm = false;
      out.violations.push_back("effect " + nu.labels[i] + " exceeds the identity");
    }
  }
  Mat sum = nu.total();
  Eigen::SelfAdjointEigenSolver<Mat> es(re_part(sum), Eigen::EigenvaluesOnly);
  out.total_spectrum = es.eigenvalues();
  if (out.total_spectrum(nu.dim - 1) > 1.0 + 1e-10) {
    out.valid_povm = false;
    out.violations.push_back("total effect exceeds the identity");
  }
  out.quantum_probability =
      out.valid_povm && (sum - Mat::Identity(nu.dim, nu.dim)).norm() <= 1e-10;
  return out;
}

Mat integrate_scalar(const std::map<std::string, cplx>& f, const FinitePovm& nu) {
  check_povm_shape(nu, "integrate_scalar");
  Mat out = Mat::Zero(nu.dim, nu.dim);
  for (size_t i = 0; i < nu.labels.size(); ++i) {
    auto it = f.find(nu.labels[i]);
    require(it != f.end(), "integrate_scalar: no value for label " + nu.labels[i]);
    out += it->second * nu.effects[i];
  }
  return out;
}

Mat integrate_block(const BlockOperator& f, const FinitePovm& omega) {
  require(f.base == BlockOperator::Base::Functions,
          "integrate_block: function-valued operator required");
  check_povm_shape(omega, "integrate_block");
  require(f.labels == omega.labels, "integrate_block: label sets differ");
  Index n = f.n;
  Index d = omega.dim;
  Mat out = Mat::Zero(n * d, n * d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      Mat entry = Mat::Zero(d, d);
      for (size_t x = 0; x < omega.labels.size(); ++x)
        entry += f.data[x](i, j) * omega.effects[x];
      out.block(i * d, j * d, d, d) = entry;
    }
  return out;
}

BlockMeasure state_to_block_measure(const FinitePovm& omega) {
  check_povm_shape(omega, "state_to_block_measure");
  Index n = omega.dim;
  BlockMeasure nu;
  nu.labels = omega.labels;
  nu.block_dim = n;
  nu.normalized = false;  // the total is I (x) J, not the identity
  Mat ones = Mat::Ones(n, n);
  for (const Mat& e : omega.effects) nu.blocks.push_back(kron(ones, e));
  return nu;
}

Mat integrate_block_measure(const BlockOperator& f, const BlockMeasure& nu) {
  require(f.base == BlockOperator::Base::Functions,
          "integrate_block_measure: function-valued operator required");
  require(f.labels == nu.labels, "integrate_block_measure: label sets differ");
  Index n = nu.block_dim;
  require(f.n == n, "integrate_block_measure: block size mismatch");
  Mat out = Mat::Zero(n * n, n * n);
  for (size_t x = 0; x < nu.labels.size(); ++x)
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j)
        out.block(i * n, j * n, n, n) +=
            f.data[x](i, j) * nu.blocks[x].block(i * n, j * n, n, n);
  return out;
}

CompressedMeasure compress_measure(const BlockMeasure& nu, const Vec& eta) {
  Index n = nu.block_dim;
  require(n > 0 && eta.size() == n * n, "compress_measure: vector lives on the wrong space");
  require(std::abs(eta.norm() - 1.0) <= 1e-8, "compress_measure: vector must be unit");
  CompressedMeasure out;
  out.w = Mat::Zero(n * n, n);
  out.xi = Vec::Zero(n);
  for (Index i = 0; i < n; ++i) {
    out.w.col(i).segment(i * n, n) = eta.segment(i * n, n);
    if (eta.segment(i * n, n).norm() > 1e-14) out.xi(i) = 1.0;
  }
  out.omega_prime.labels = nu.labels;
  out.omega_prime.dim = n;
  for (const Mat& block : nu.blocks)
    out.omega_prime.effects.push_back(out.w.adjoint() * block * out.w);
  return out;
}

CommutativeDerivative gd_commutative_certificate(const BlockOperator& f,
                                                 const BlockOperator& g) {
  DerivativeResult base = gd_blockfun(f, g);
  require(base.active_label.has_value(),
          "gd_commutative_certificate: no active label");
  CommutativeDerivative out;
  out.value = base.value;
  out.active_label = *base.active_label;

  Index n = f.n;
  FinitePovm point;
  point.dim = n;
  point.labels = f.labels;
  for (const std::string& label : f.labels)
    point.effects.push_back(label == out.active_label
                                ? Mat(Mat::Identity(n, n))
                                : Mat(Mat::Zero(n, n)));
  out.nu = state_to_block_measure(point);

  // The norm-attaining vector at the active point induces eta through the
  // rank-one matrix state construction.
  out.eta = ucp_from_vector(base.certificate, n, 1).eta;

  double nf = matrix_norm(f);
  if (nf == 0.0) {
    out.certificate_valid = false;
    return out;
  }
  Mat int_f = integrate_block_measure(f, out.nu);
  Mat int_g = integrate_block_measure(g, out.nu);
  out.norm_residual = std::abs(op_norm(int_f) - nf);
  double pairing = ((int_f * out.eta).dot(int_g * out.eta)).real() / nf;
  out.pairing_residual = std::abs(pairing - out.value);
  out.certificate_valid = out.norm_residual <= 1e-6 * std::max(1.0, nf) &&
                          out.pairing_residual <= 1e-6 * std::max(1.0, matrix_norm(g));
  return out;
}

}  // namespace gateaux
