#pragma once

#include "qpe/linalg.hpp"

namespace qpe {

struct RenyiOrder {
  double alpha;
  explicit RenyiOrder(double a);
  static RenyiOrder from_beta(double beta) { return RenyiOrder(1.0 + beta); }
  double beta() const { return alpha - 1.0; }
};

enum class RenyiKind { sandwiched, petz };

// S_α(ρ|σ). Sandwiched: tr((σ^{-β/2α} ρ σ^{-β/2α})^α); Petz: tr(ρ^α σ^{-β}).
// Throws DomainError when ρ is not supported on σ (tolerance `support_tol`,
// relative to ‖ρ‖_F) or when Petz is requested with α > 2.
double renyi_power(const HermitianOperator& rho, const HermitianOperator& sigma, RenyiOrder ord,
                   RenyiKind kind = RenyiKind::sandwiched, double support_tol = kSupportTol);

// Normalized power S_α(ρ|σ)/tr(ρ).
double renyi_power_normalized(const HermitianOperator& rho, const HermitianOperator& sigma,
                              RenyiOrder ord, RenyiKind kind = RenyiKind::sandwiched);

// ‖K_σ ρ‖_F / ‖ρ‖_F where K_σ projects onto the kernel of σ.
double support_violation(const HermitianOperator& rho, const HermitianOperator& sigma);

}  // namespace qpe
