#pragma once

#include <functional>
#include <ostream>
#include <vector>

namespace qpe {

struct ErrorBudget {
  double epsilon = 1e-6;    // total soundness error
  double epsilon_x = 0.0;   // extractor share
  double kappa = 1.0;       // protected success probability
  double kappa_bar = 1.0;   // used by net log-prob when β > 1

  double epsilon_h() const { return epsilon - epsilon_x; }
  // δ = ε_h² / 2.
  double delta() const { return epsilon_h() * epsilon_h() / 2.0; }
  void validate() const;
};

struct EntropyCertificate {
  double beta = 0.0;
  double log_qef_total = 0.0;         // nats
  double log_f_min = 0.0;             // nats
  double smooth_minentropy_bits = 0.0;
  double smoothness = 0.0;            // purified distance
  bool threshold_met = false;
};

EntropyCertificate minentropy_bound(double log_qef, double beta, const ErrorBudget& budget);

// n E(log F)/β + log(ε² κ̄^{(β−1)[β>1]}/2)/β in nats, for rate g = E(log F)/β.
double net_logprob(double g, double n, double beta, const ErrorBudget& budget);
// net_logprob / n; for β ≤ 1 this is g − 2r/β − log(2)/(nβ) with r = |log ε|/n.
double net_logprob_rate(double g, double n, double beta, const ErrorBudget& budget);

// |log₂(ε² κ^α / 2)| / (g β) with g in bits per trial.
double n_min_qef(double g_bits, double beta, const ErrorBudget& budget);
// (4/g²)(log₂(1+2N) + ⌈k∞⌉)² (1 − 2 log₂(ε κ)) with g in bits per trial.
double n_min_eat_from_ee(double g_bits, double k_inf, int N, const ErrorBudget& budget);

// Second-order bound n h − √2 √c̃(β̄) √(|log(ε²κ²/2)|) √n in nats, with
// β̄ = √(2|log(ε²κ²/2)|)/√(n c̃(0)); throws when β̄ > beta_max.
double eat_from_qef_bound(double h, const std::function<double(double)>& tilde_c, double n,
                          const ErrorBudget& budget, double beta_max = 0.49);
// n h − 2√(log₂e)(log(1+2N) + ⌈k∞⌉)√(|log(ε²κ²/2)|)√n in nats.
double eat_reference_bound(double h, double k_inf, int N, double n, const ErrorBudget& budget);

// c̃(β) for the comparison with the reference bound at given N and k∞:
// w′_γ = max(ι₀, (1−γ)(log N + k∞) + log 2) entering the two-term constant,
// evaluated at β̄ = √(2 r / c̃(0)).
double tilde_c_reference(int N, double k_inf, double r);
// Constant c̃ as a function of β for the same recipe.
double tilde_c_at(int N, double k_inf, double beta);

// Minimum entropy rates at error-exponent rate r = |log(ε²κ²/2)|/n.
double h_min_qef(int N, double k_inf, double r);
double h_min_eat(int N, double k_inf, double r);

// Largest r with h_min(r) ≤ h, by bisection on [0, h].
double r_max_qef(int N, double k_inf, double h);
double r_max_eat(int N, double k_inf, double h);

struct CurvePoint {
  double h;
  double r_eat;
  double r_qef;
};

// Points at h = 0.01, 0.06, ... up to log N.
std::vector<CurvePoint> comparison_curve(int N, double k_inf);
void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts);

// Ratio of the √n deficit coefficients of the reference bound and the
// QEF-derived bound at n trials; tends to √(2 log₂ e) when log N + k∞ is large.
double prefactor_ratio(int N, double k_inf, double n, const ErrorBudget& budget);

}  // namespace qpe
