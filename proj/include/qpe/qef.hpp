#pragma once

#include "qpe/cq.hpp"
#include "qpe/models.hpp"
#include "qpe/renyi.hpp"
#include "qpe/trial_function.hpp"

#include <utility>
#include <vector>

namespace qpe {

// Σ_cz μ(z) F(cz) tr(P_{c|z;θ} τ^{1/α} P_{c|z;θ})^α with α = 1 + F.beta.
double q_alpha(const TrialFunction& F, const BellConfig& config, const HermitianOperator& tau);

// tr ρ − Σ_cz F(cz) S_α(ρ(cz)|ρ(z)); non-negative iff the defining inequality
// holds at ρ.
double qef_inequality_check(const TrialFunction& F, const CqDistribution& rho,
                            RenyiKind kind = RenyiKind::sandwiched);

struct ChainResult {
  double log_total = 0.0;  // nats
  bool hit_zero = false;
  long long trials = 0;
};

using Record = std::pair<int, int>;  // (c, z)

// Σ_i log F_i(c_i, z_i). A single function is reused for every record.
ChainResult chain(const std::vector<TrialFunction>& fs, const std::vector<Record>& records);

// F^γ with power γβ.
TrialFunction power_reduce(const TrialFunction& F, double gamma);

}  // namespace qpe
