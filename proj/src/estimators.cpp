#include "qpe/estimators.hpp"

#include "qpe/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qpe {

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }
double csch(double x) { return 1.0 / std::sinh(x); }

// ⌈⌈w⌉⌉(⌈⌈w⌉⌉ + 2 coth ⌈⌈w⌉⌉)
double cosh_term(double w) {
  const double v = ceil_iota(w);
  return v * (v + 2.0 * coth(v));
}

// Exact w_γ(a): e^w is the larger root of x + 1/x = e^l with
// l = log(N^{1−2γ} e^{−(1−γ)a} + e^{(1−γ)a}).
double w_exact(double n, double gamma, double a) {
  const double l = std::log(std::pow(n, 1.0 - 2.0 * gamma) * std::exp(-(1.0 - gamma) * a) +
                            std::exp((1.0 - gamma) * a));
  const double el = std::exp(l);
  const double disc = std::max(el * el - 4.0, 0.0);
  return std::log((el + std::sqrt(disc)) / 2.0);
}

double lambda0(double w, double gamma) {
  const double v = ceil_iota(w);
  return v * (v - 2.0 * coth(v)) / ((1.0 - gamma) * (1.0 - gamma));
}

double lambda1(double w, double gamma) {
  const double v = ceil_iota(w);
  return v * csch(v) / ((1.0 - gamma) * (1.0 - gamma));
}

}  // namespace

double iota0() {
  static const double value = optim::bisect([](double x) { return 2.0 * coth(x) - x; }, 2.0, 2.1, 1e-15);
  return value;
}

double ceil_iota(double x) { return std::max(iota0(), x); }

TrialFunction ee_from_qef(const TrialFunction& F, bool* has_neg_inf) {
  if (!(F.beta > 0.0)) throw DomainError("ee_from_qef: power must be positive");
  if (!F.valid_factor()) throw DomainError("ee_from_qef: trial function must be non-negative");
  TrialFunction K = F;
  K.role = TrialRole::estimator;
  bool neg = false;
  for (auto& v : K.values) {
    if (v == 0.0) {
      v = -std::numeric_limits<double>::infinity();
      neg = true;
    } else {
      v = std::log(v) / F.beta;
    }
  }
  if (has_neg_inf) *has_neg_inf = neg;
  return K;
}

QefpConstant qefp_constant(const TrialFunction& K, const std::vector<double>& nu_z, double beta, bool tight) {
  if (!(beta > 0.0 && beta < 0.5)) throw DomainError("qefp_constant: beta must lie in (0, 1/2)");
  if (static_cast<int>(nu_z.size()) != K.num_z()) throw DomainError("qefp_constant: input distribution size mismatch");
  if (K.has_t) throw DomainError("qefp_constant: estimator must be over (C, Z)");
  for (double v : K.values)
    if (!std::isfinite(v)) throw DomainError("qefp_constant: estimator must be finite");
  const double n = K.num_c();
  const double logn = std::log(n);
  QefpConstant out;
  out.beta = beta;
  out.tight = tight;
  for (int z = 0; z < K.num_z(); ++z) {
    double kmax = -std::numeric_limits<double>::infinity();
    double kmin = std::numeric_limits<double>::infinity();
    double spread = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < K.num_c(); ++c) {
      const double k = K(c, z);
      kmax = std::max(kmax, k);
      kmin = std::min(kmin, k);
      spread = std::max(spread, std::max(logn - k, k));
    }
    const double w0 = spread + std::log(2.0);
    const double wb = (1.0 - beta) * spread + std::log(2.0);
    out.k_max.push_back(kmax);
    out.w0_bar.push_back(w0);
    out.wb_bar.push_back(wb);
    double term;
    if (!tight) {
      term = (2.0 * cosh_term(w0) + std::exp(kmax * beta) / ((1.0 - beta) * (1.0 - beta)) * cosh_term(wb)) / 3.0;
    } else {
      double t1 = 0.0, t2 = 0.0, t3 = 0.0;
      for (double a : {kmin, kmax}) {
        const double w0a = w_exact(n, 0.0, a), wba = w_exact(n, beta, a);
        const double l10 = lambda1(w0a, 0.0), l1b = lambda1(wba, beta);
        const double l00 = lambda0(w0a, 0.0), l0b = lambda0(wba, beta);
        t1 = std::max(t1, 2.0 * n * std::exp(-a) * l10 / 3.0);
        t2 = std::max(t2, std::pow(n, 1.0 - 2.0 * beta) * l1b * std::exp(-a * (1.0 - 2.0 * beta)) / 3.0);
        t3 = std::max(t3, (2.0 * l00 + l0b * std::exp(a * beta) + (2.0 * l10 + l1b) * std::exp(a)) / 3.0);
      }
      term = t1 + t2 + t3;
    }
    out.per_z.push_back(term);
    out.c_value += nu_z[static_cast<size_t>(z)] * term;
  }
  return out;
}

TrialFunction qefp_from_ee(const TrialFunction& K, const QefpConstant& c) {
  TrialFunction F = K;
  F.beta = c.beta;
  F.role = TrialRole::qefp;
  const double den = 1.0 + c.c_value * c.beta * c.beta / 2.0;
  for (auto& v : F.values) v = std::exp(c.beta * v) / den;
  return F;
}

TrialFunction ee_from_maxprob(const TrialFunction& B, double b_bar, bool conditional) {
  (void)conditional;  // same affine form in both settings
  if (!(b_bar > 0.0 && b_bar <= 1.0)) throw DomainError("ee_from_maxprob: b_bar must lie in (0, 1]");
  TrialFunction K = B;
  K.role = TrialRole::estimator;
  K.beta = 0.0;
  for (auto& v : K.values) v = -std::log(b_bar) + 1.0 - v / b_bar;
  return K;
}

double SpotCheckScheme::input_prob(int z, int t) const {
  if (t == 1) return r * q;
  return z == z0 ? 1.0 - r : 0.0;
}

double SpotCheckScheme::input_entropy() const {
  // H(r) + r log(1/q): the test branch is uniform over 1/q settings.
  return -(1.0 - r) * std::log1p(-r) - r * std::log(r) + r * std::log(1.0 / q);
}

SpotCheckScheme spot_check_scheme(const TrialFunction& B, double r, int z0, double b_bar) {
  if (!(r > 0.0 && r < 0.5)) throw DomainError("spot_check_scheme: r must lie in (0, 1/2)");
  if (!(b_bar > 0.0 && b_bar < 1.0)) throw DomainError("spot_check_scheme: b_bar must lie in (0, 1)");
  if (B.has_t) throw DomainError("spot_check_scheme: base estimator must be over (C, Z)");
  if (z0 < 0 || z0 >= B.num_z()) throw DomainError("spot_check_scheme: z0 out of range");
  SpotCheckScheme s;
  s.r = r;
  s.z0 = z0;
  s.b_bar = b_bar;
  s.q = 1.0 / B.num_z();
  s.B = B;
  std::vector<double> br(static_cast<size_t>(2 * B.num_c() * B.num_z()));
  s.B_r = TrialFunction(B.c_bits, B.z_bits, 0.0, br, TrialRole::estimator, true);
  for (int z = 0; z < B.num_z(); ++z)
    for (int c = 0; c < B.num_c(); ++c) {
      s.B_r.at(c, z, 0) = 1.0;
      s.B_r.at(c, z, 1) = 1.0 + (B(c, z) - 1.0) / r;
    }
  s.K_r = ee_from_maxprob(s.B_r, b_bar, true);
  return s;
}

double spot_check_expectation(const SpotCheckScheme& s, const TrialFunction& G, const std::vector<double>& nu) {
  const int nc = s.B.num_c(), nz = s.B.num_z();
  if (static_cast<int>(nu.size()) != nc * nz) throw DomainError("spot_check_expectation: distribution size mismatch");
  double acc = 0.0;
  for (int z = 0; z < nz; ++z) {
    double pz = 0.0;
    for (int c = 0; c < nc; ++c) pz += nu[static_cast<size_t>(z * nc + c)];
    if (pz <= 0.0) continue;
    for (int t = 0; t < 2; ++t) {
      const double mu = s.input_prob(z, t);
      if (mu == 0.0) continue;
      for (int c = 0; c < nc; ++c) acc += mu * nu[static_cast<size_t>(z * nc + c)] / pz * G(c, z, t);
    }
  }
  return acc;
}

ExpansionRate expansion_rate(const SpotCheckScheme& s, double beta) {
  double m = 0.0;
  const double lb = -std::log(s.b_bar);
  for (double b : s.B.values) m = std::max(m, lb + 1.0 + (std::abs(b) + 1.0) / s.b_bar);
  ExpansionRate out;
  out.d = 1.0 / (2.0 * m);
  const double v = 1.0 / (2.0 * out.d) + std::log(2.0 * s.B.num_c()) + 2.0 * iota0();
  out.d_prime = 10.0 * v * v / 3.0;
  if (!(beta > 0.0) || beta > out.d * s.r) throw DomainError("expansion_rate: beta must lie in (0, d r]");
  out.g_lower = lb - out.d_prime * beta / s.r;
  return out;
}

ExpansionSchedule expansion_schedule(const SpotCheckScheme& s, double log_inv_eps) {
  if (!(log_inv_eps > 0.0)) throw DomainError("expansion_schedule: error exponent must be positive");
  const ExpansionRate e = expansion_rate(s, 1e-300);
  ExpansionSchedule out;
  out.g0 = -std::log(s.b_bar);
  out.c = std::min(e.d, out.g0 / (3.0 * e.d_prime));
  out.c_prime = 3.0 * log_inv_eps / (out.c * out.g0);
  return out;
}

double binary_model_rate(double p, double q, double beta, double m) {
  if (!(p > 0.0 && p < 1.0) || !(q >= 0.0 && q <= p)) throw DomainError("binary_model: need 0 <= q <= p < 1");
  if (!(beta > 0.0)) throw DomainError("binary_model: beta must be positive");
  if (!(m >= 1.0)) throw DomainError("binary_model: m must be at least 1");
  const double alpha = 1.0 + beta;
  const double tail = std::exp(alpha * std::log1p(-p));
  const double f = (m - tail) / std::pow(p, alpha);
  return (q * std::log(f) - std::log(m)) / beta;
}

double binary_model_optimal_m(double p, double q, double beta, double m_max) {
  if (!(m_max >= 1.0)) throw DomainError("binary_model: m_max must be at least 1");
  auto rate = [&](double lm) { return binary_model_rate(p, q, beta, std::exp(lm)); };
  const double lm = optim::golden_section_max(rate, 0.0, std::log(m_max), 100);
  const double r1 = rate(0.0);
  // Gains at rounding level do not count as moving off m = 1.
  return rate(lm) > r1 + 1e-12 * std::max(1.0, std::abs(r1)) ? std::exp(lm) : 1.0;
}

BinaryModelResult binary_model(double p, double q, double beta) {
  if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q <= p)) throw DomainError("binary_model: need 0 < q <= p < 1");
  if (!(beta > 0.0)) throw DomainError("binary_model: beta must be positive");
  const double alpha = 1.0 + beta;
  BinaryModelResult out;
  // 1 − (1−p)^α without cancellation.
  const double head = -std::expm1(alpha * std::log1p(-p));
  out.f = head / std::pow(p, alpha);
  out.logprob_rate = q * (std::log(head) - alpha * std::log(p)) / beta;
  out.rate_limit = (q / p) * (-(1.0 - p) * std::log1p(-p) - p * std::log(p));
  return out;
}

}  // namespace qpe
