#ifndef GATEAUX_POVM_HPP
#define GATEAUX_POVM_HPP

#include <map>
#include <string>
#include <vector>

#include "gateaux/operators.hpp"
#include "gateaux/types.hpp"

namespace gateaux {

// Positive operator-valued measure on a finite label set: one PSD effect per
// label. Finite additivity over subsets is automatic (sum of atoms); the
// measure is a quantum probability measure when the effects sum to identity.
struct FinitePovm {
  std::vector<std::string> labels;
  std::vector<Mat> effects;
  Index dim = 0;

  Mat total() const;  // sum of all effects
};

struct PovmValidation {
  bool valid_povm = false;           // PSD effects with spectrum in [0, 1+tol]
  bool quantum_probability = false;  // total = I within 1e-10
  std::vector<std::string> violations;
  RVec total_spectrum;
};

// Checks each effect (Hermitian, eigenvalues in [0,1]) and the total effect
// (at most identity); violations are reported, never thrown.
PovmValidation validate_povm(const FinitePovm& nu);

// sum_x f(x) effects(x). Every label must have a value; extra keys are fine.
Mat integrate_scalar(const std::map<std::string, cplx>& f, const FinitePovm& nu);

// phi_n(F) for the matrix state phi(f) = sum_x f(x) omega(x): entry block
// (i,j) of the n^2 x n^2 result is sum_x F(x)_ij omega(x).
Mat integrate_block(const BlockOperator& f, const FinitePovm& omega);

// Operator-valued measure with n x n matrix blocks indexed like an n x n
// matrix of set functions; stored as one n^2 x n^2 matrix per label.
struct BlockMeasure {
  std::vector<std::string> labels;
  std::vector<Mat> blocks;
  Index block_dim = 0;  // n
  bool normalized = false;  // true when the total equals the identity
};

// nu(x) with every n x n sub-block equal to omega(x). The total is I (x) J,
// which is not the identity; `normalized` records that honestly. The pairing
// <(integral of F dnu) eta, eta> = <phi_n(F) eta, eta> still holds exactly.
BlockMeasure state_to_block_measure(const FinitePovm& omega);

// integral of F against a block measure: entry block (i,j) of the result is
// sum_x F(x)_ij nu(x)_ij.
Mat integrate_block_measure(const BlockOperator& f, const BlockMeasure& nu);

// Compression of a block measure along eta = sum_i eps_i (x) eta_i: W maps
// e_i to eps_i (x) eta_i, omega'(x) = W* nu(x) W is a POVM, and the diagonal
// measure of xi (the slot indicator) under omega' equals that of eta under nu.
struct CompressedMeasure {
  FinitePovm omega_prime;
  Mat w;   // n^2 x n, norm <= max_i ||eta_i||
  Vec xi;  // slot indicator with W xi = eta
};

CompressedMeasure compress_measure(const BlockMeasure& nu, const Vec& eta);

// Derivative of the sup norm over labels with a measure-theoretic certificate:
// a point-mass block measure at the active label and a unit eta with
// Re<(int G dnu) eta, (int F dnu) eta> / ||F|| equal to the derivative.
struct CommutativeDerivative {
  double value = 0.0;
  BlockMeasure nu;
  Vec eta;
  std::string active_label;
  bool certificate_valid = false;
  double norm_residual = 0.0;     // | ||int F dnu|| - ||F|| |
  double pairing_residual = 0.0;  // |pairing/||F|| - value|
};

CommutativeDerivative gd_commutative_certificate(const BlockOperator& f,
                                                 const BlockOperator& g);

}  // namespace gateaux

#endif
