#pragma once

#include "qpe/trial_function.hpp"

#include <vector>

namespace qpe {

// Positive root of 2 coth(x) = x.
double iota0();
// max(ι₀, x).
double ceil_iota(double x);

// K(cz) = log F(cz) / β for a QEF F with power β. Entries where F vanishes
// become −∞; `has_neg_inf` reports them.
TrialFunction ee_from_qef(const TrialFunction& F, bool* has_neg_inf = nullptr);

struct QefpConstant {
  double beta = 0.0;
  double c_value = 0.0;
  bool tight = false;
  std::vector<double> k_max;   // per z
  std::vector<double> w0_bar;  // per z
  std::vector<double> wb_bar;  // per z
  std::vector<double> per_z;   // per-z contribution before weighting by ν(z)
};

// Closed-form constant c(β, ν(Z)) for the estimator K. With `tight` the
// per-z three-term expressions at a ∈ {k_min(z), k_max(z)} are used instead
// of the simplified bound; they never exceed it.
QefpConstant qefp_constant(const TrialFunction& K, const std::vector<double>& nu_z, double beta,
                           bool tight = false);

// e^{βK} / (1 + c β²/2) with power β.
TrialFunction qefp_from_ee(const TrialFunction& K, const QefpConstant& c);

// K(cz) = −log b̄ + 1 − B(cz)/b̄.
TrialFunction ee_from_maxprob(const TrialFunction& B, double b_bar, bool conditional = false);

struct SpotCheckScheme {
  double r = 0.0;
  int z0 = 0;
  double b_bar = 0.0;
  double q = 0.0;  // 1/|Rng(Z)|
  TrialFunction B;
  TrialFunction B_r;  // over (C, Z, T)
  TrialFunction K_r;  // over (C, Z, T)
  // μ_r(z, t).
  double input_prob(int z, int t) const;
  // Shannon entropy of μ_r in nats.
  double input_entropy() const;
};

SpotCheckScheme spot_check_scheme(const TrialFunction& B, double r, int z0, double b_bar);

// Expectations under ν_r(czt) = μ_r(z,t) ν(c|z) for a trial distribution
// given as probs[z * num_c + c].
double spot_check_expectation(const SpotCheckScheme& s, const TrialFunction& G,
                              const std::vector<double>& nu);

struct ExpansionRate {
  double g_lower = 0.0;  // nats per trial
  double d = 0.0;
  double d_prime = 0.0;
};

ExpansionRate expansion_rate(const SpotCheckScheme& s, double beta);

// Constants for r_n = c′/n and β_n = c r_n, for which the expected net
// log-prob is at least n g₀/3 with g₀ = −log b̄.
struct ExpansionSchedule {
  double c = 0.0;
  double c_prime = 0.0;
  double g0 = 0.0;
};
ExpansionSchedule expansion_schedule(const SpotCheckScheme& s, double log_inv_eps);

struct BinaryModelResult {
  double f = 0.0;
  double logprob_rate = 0.0;  // nats per trial
  double rate_limit = 0.0;    // (q/p) H(p)
};

// Two-outcome model with outcome-1 probability p and observed frequency q,
// evaluated at the optimal m = 1.
BinaryModelResult binary_model(double p, double q, double beta);
// Log-prob rate q log f(m) / β as a function of m for the same model.
double binary_model_rate(double p, double q, double beta, double m);
// Maximizer of binary_model_rate over m ∈ [1, m_max]: golden-section search
// on log m, compared against the endpoint m = 1.
double binary_model_optimal_m(double p, double q, double beta, double m_max = 1e6);

}  // namespace qpe
