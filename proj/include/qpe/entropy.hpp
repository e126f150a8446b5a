#pragma once

#include "qpe/cq.hpp"

namespace qpe {

HermitianOperator positive_part(const HermitianOperator& a);

// ½ Σ_u tr|ρ(u) − σ(u)|.
double tv_distance(const CqDistribution& a, const CqDistribution& b);
// Σ_u tr|√ρ(u) √σ(u)|.
double fidelity(const CqDistribution& a, const CqDistribution& b);
// sqrt(1 − F²); `a` must be normalized, `b` may be sub-normalized.
double purified_distance(const CqDistribution& a, const CqDistribution& b);

// H(C|Z E) in nats.
double conditional_entropy(const CqDistribution& rho);

enum class MaxProbMode { diagonal_exact, helstrom_binary, pgm_lower };

// Guessing probability of C given Z and the quantum system.
double max_prob(const CqDistribution& rho, MaxProbMode mode);

}  // namespace qpe
