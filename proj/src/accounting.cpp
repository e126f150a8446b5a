#include "qpe/accounting.hpp"

#include "qpe/estimators.hpp"
#include "qpe/linalg.hpp"
#include "qpe/optim.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

namespace qpe {

namespace {

constexpr double kLog2e = std::numbers::log2e;

double coth(double x) { return 1.0 / std::tanh(x); }

double cosh_term(double w) {
  const double v = ceil_iota(w);
  return v * (v + 2.0 * coth(v));
}

double error_exponent(const ErrorBudget& b) {
  return std::abs(std::log(b.epsilon * b.epsilon * b.kappa * b.kappa / 2.0));
}

}  // namespace

void ErrorBudget::validate() const {
  if (!(epsilon > 0.0 && epsilon <= 1.0)) throw DomainError("ErrorBudget: epsilon must lie in (0, 1]");
  if (!(epsilon_x >= 0.0 && epsilon_x < epsilon)) throw DomainError("ErrorBudget: epsilon_x must lie in [0, epsilon)");
  if (!(kappa > 0.0 && kappa <= 1.0)) throw DomainError("ErrorBudget: kappa must lie in (0, 1]");
  if (!(kappa_bar > 0.0 && kappa_bar <= 1.0)) throw DomainError("ErrorBudget: kappa_bar must lie in (0, 1]");
}

EntropyCertificate minentropy_bound(double log_qef, double beta, const ErrorBudget& budget) {
  if (!(beta > 0.0)) throw DomainError("minentropy_bound: beta must be positive");
  budget.validate();
  const double delta = budget.delta();
  EntropyCertificate cert;
  cert.beta = beta;
  cert.log_qef_total = log_qef;
  const double neg_log_p = log_qef / beta + std::log(delta) / beta;
  cert.smooth_minentropy_bits = neg_log_p * kLog2e + ((1.0 + beta) / beta) * std::log2(budget.kappa);
  // Threshold for a positive certificate: p = 1, i.e. f_min = 1/δ.
  cert.log_f_min = -std::log(delta);
  cert.threshold_met = cert.smooth_minentropy_bits > 0.0;
  cert.smoothness = std::sqrt(2.0 * delta);
  return cert;
}

double net_logprob(double g, double n, double beta, const ErrorBudget& budget) {
  if (!(beta > 0.0)) throw DomainError("net_logprob: beta must be positive");
  if (budget.kappa_bar < budget.epsilon) throw DomainError("net_logprob: kappa_bar below epsilon");
  const double kb = beta > 1.0 ? std::pow(budget.kappa_bar, beta - 1.0) : 1.0;
  return n * g + std::log(budget.epsilon * budget.epsilon * kb / 2.0) / beta;
}

double net_logprob_rate(double g, double n, double beta, const ErrorBudget& budget) {
  if (!(n > 0.0)) throw DomainError("net_logprob_rate: n must be positive");
  return net_logprob(g, n, beta, budget) / n;
}

double n_min_qef(double g_bits, double beta, const ErrorBudget& budget) {
  if (!(g_bits > 0.0)) throw DomainError("n_min_qef: rate must be positive");
  if (!(beta > 0.0)) throw DomainError("n_min_qef: beta must be positive");
  const double alpha = 1.0 + beta;
  const double e = budget.epsilon;
  return std::abs(std::log2(e * e * std::pow(budget.kappa, alpha) / 2.0)) / (g_bits * beta);
}

double n_min_eat_from_ee(double g_bits, double k_inf, int N, const ErrorBudget& budget) {
  if (!(g_bits > 0.0)) throw DomainError("n_min_eat_from_ee: rate must be positive");
  const double a = std::log2(1.0 + 2.0 * N) + std::ceil(k_inf);
  return 4.0 / (g_bits * g_bits) * a * a * (1.0 - 2.0 * std::log2(budget.epsilon * budget.kappa));
}

double eat_from_qef_bound(double h, const std::function<double(double)>& tilde_c, double n,
                          const ErrorBudget& budget, double beta_max) {
  const double l = error_exponent(budget);
  const double c0 = tilde_c(0.0);
  if (!(c0 > 0.0)) throw DomainError("eat_from_qef_bound: c~(0) must be positive");
  const double bbar = std::sqrt(2.0 * l) / std::sqrt(n * c0);
  if (bbar > beta_max) throw DomainError("eat_from_qef_bound: optimal power exceeds beta_max");
  return n * h - std::sqrt(2.0) * std::sqrt(tilde_c(bbar)) * std::sqrt(l) * std::sqrt(n);
}

double eat_reference_bound(double h, double k_inf, int N, double n, const ErrorBudget& budget) {
  const double l = error_exponent(budget);
  return n * h -
         2.0 * std::sqrt(kLog2e) * (std::log(1.0 + 2.0 * N) + std::ceil(k_inf)) * std::sqrt(l) * std::sqrt(n);
}

double tilde_c_at(int N, double k_inf, double beta) {
  const double s = std::log(static_cast<double>(N)) + k_inf;
  const double c0 = cosh_term(s + std::log(2.0));
  const double cb = cosh_term((1.0 - beta) * s + std::log(2.0));
  return (2.0 / 3.0) * c0 + (1.0 / 3.0) * cb * std::exp(k_inf * beta) / ((1.0 - beta) * (1.0 - beta));
}

double tilde_c_reference(int N, double k_inf, double r) {
  const double c0 = tilde_c_at(N, k_inf, 0.0);
  return tilde_c_at(N, k_inf, std::sqrt(2.0 * r / c0));
}

double h_min_qef(int N, double k_inf, double r) { return std::sqrt(2.0 * tilde_c_reference(N, k_inf, r) * r); }

double h_min_eat(int N, double k_inf, double r) {
  const double a = std::log(1.0 + 2.0 * N) + k_inf;
  return std::sqrt(4.0 * kLog2e * a * a * r);
}

namespace {

double invert(const std::function<double(double)>& hmin, double h) {
  if (hmin(h) <= h) return h;
  return optim::bisect([&](double r) { return hmin(r) - h; }, 0.0, h, 1e-15);
}

}  // namespace

double r_max_qef(int N, double k_inf, double h) {
  return invert([&](double r) { return h_min_qef(N, k_inf, r); }, h);
}

double r_max_eat(int N, double k_inf, double h) {
  return invert([&](double r) { return h_min_eat(N, k_inf, r); }, h);
}

std::vector<CurvePoint> comparison_curve(int N, double k_inf) {
  std::vector<CurvePoint> out;
  const double top = std::log(static_cast<double>(N));
  for (int i = 0;; ++i) {
    const double h = 0.01 + 0.05 * i;
    if (h > top + 1e-12) break;
    out.push_back({h, r_max_eat(N, k_inf, h), r_max_qef(N, k_inf, h)});
  }
  return out;
}

void write_curve_csv(std::ostream& os, const std::vector<CurvePoint>& pts) {
  os << "h_nats,r_eat,r_qef\n";
  os << std::setprecision(12);
  for (const auto& p : pts) os << p.h << ',' << p.r_eat << ',' << p.r_qef << '\n';
}

double prefactor_ratio(int N, double k_inf, double n, const ErrorBudget& budget) {
  auto tc = [&](double b) { return tilde_c_at(N, k_inf, b); };
  const double eat_deficit = -eat_reference_bound(0.0, k_inf, N, n, budget);
  const double qef_deficit = -eat_from_qef_bound(0.0, tc, n, budget);
  return eat_deficit / qef_deficit;
}

}  // namespace qpe
