#ifndef GATEAUX_OPSPACE_HPP
#define GATEAUX_OPSPACE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gateaux/operators.hpp"
#include "gateaux/orthogonality.hpp"
#include "gateaux/types.hpp"

namespace gateaux {

// Norm of an element of M_n(V) through its concrete realization: the operator
// norm of the assembled matrix, or the max over labels for function entries.
double matrix_norm(const BlockOperator& v);

// Norm-attaining functional F(u) = <u xi, zeta> built from a top singular
// pair of the realization: F(v) = ||v|| and |F(u)| <= ||u|| for all u.
DualFunctional hahn_banach_functional(const BlockOperator& v);

// Rewrites a functional on M_n(M_k) as F(u) = <phi_n(u) eta, xi_prime> with
// phi(a) = w_left* a w_right completely contractive; exact in the algebra,
// residual at rounding scale. The reshape reads xi, zeta as n stacked slots
// of length k.
CbFactorization cb_factorization(const DualFunctional& f, Index n, Index k);

// Certificate that v is norm-orthogonal to span(w_list): a completely
// contractive phi and unit eta with ||phi_n(v) eta|| = ||v|| and
// <phi_n(v) eta, phi_n(w) eta> = 0. The single-vector form exists when the
// orthogonality density is rank-one; otherwise only the mixed density
// certificate is reported and `single_vector` stays false.
struct FactorizationCertificate {
  bool single_vector = false;
  std::optional<CbFactorization> factorization;
  DensityMatrix rho;
  std::vector<double> residuals;  // norm attainment, worst pairing
  std::string note;
};

FactorizationCertificate orthogonality_factorization(
    const BlockOperator& v, const std::vector<BlockOperator>& w_list);

// Matrix state built from a unit vector xi on C^{kn}: the Stinespring
// isometry extends the polar factor of e_q -> xi_q (x) e_1, and eta is the
// stacked square root of the slot Gram matrix. The pairing identity
// <phi_n(s) eta, eta> = <s xi, xi> holds for every s in M_n(M_k).
struct UcpConstruction {
  UcpMap map;
  Vec eta;  // unit, C^{n^2}
};

UcpConstruction ucp_from_vector(const Vec& xi, Index n, Index k);

// Support-mapping report: attainment rho*(phi_n(v)) = ||v||_n at the base
// point and contractivity rho*(phi_m(w)) <= ||w||_m on sampled w up to the
// requested level.
struct SupportReport {
  bool valid = false;
  double attainment_residual = 0.0;  // |rho*(phi_n(v)) - ||v||_n|
  double worst_margin = 0.0;         // max over samples of rho* - ||w||
  Index worst_level = 0;
  Index samples_checked = 0;
};

SupportReport support_mapping_check(const CompressionMap& phi,
                                    const BlockOperator& v, Index levels = 3,
                                    Index samples = 20,
                                    std::uint64_t seed = 20260819);

}  // namespace gateaux

#endif
