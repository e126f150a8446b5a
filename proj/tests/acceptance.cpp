// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if
// any criterion fails.

#include "qpe/accounting.hpp"
#include "qpe/certify.hpp"
#include "qpe/estimators.hpp"
#include "qpe/inner_max.hpp"
#include "qpe/interval.hpp"
#include "qpe/mintrials.hpp"
#include "qpe/pef.hpp"
#include "qpe/protocols.hpp"
#include "qpe/qef.hpp"
#include "qpe/renyi.hpp"
#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

using namespace qpe;
using qpe::testing::random_density;
using qpe::testing::random_psd;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(const std::string& name, bool ok) {
  std::printf("[%s] %s\n", ok ? "PASS" : "FAIL", name.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

void note(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void note(const char* fmt, ...) {
  std::printf("    ");
  va_list ap;
  va_start(ap, fmt);
  std::vprintf(fmt, ap);
  va_end(ap);
  std::printf("\n");
  std::fflush(stdout);
}

std::vector<double> uniform_mu(int k) { return std::vector<double>(static_cast<size_t>(1 << k), 1.0 / (1 << k)); }

// ---------------------------------------------------------------------------
void criterion_iota0() {
  const auto t0 = Clock::now();
  const double x = iota0();
  const double dt = seconds_since(t0);
  const double resid = 2.0 / std::tanh(x) - x;
  note("iota0 = %.12f, residual %.2e, %.1f us", x, resid, dt * 1e6);
  report("iota0_bracket", x > 2.065338 && x < 2.065339 && std::abs(resid) <= 1e-10 && dt < 1e-3);
}

// ---------------------------------------------------------------------------
void criterion_fmax_near_one() {
  const auto nu = family_member(Family::E, std::numbers::pi / 4).nu;
  bool ok = true;
  double worst = 0.0;
  double total = 0.0;
  for (double beta : {0.005, 0.01, 0.02, 0.05, 0.1}) {
    const auto t0 = Clock::now();
    const auto pef = optimize_pef_polytope(nu, beta);
    CertifyOptions co;
    co.gap_target = 1e-4;
    co.threads = 1;
    const auto cert = certify_fmax(pef.F, BellConfig::uniform(2), co);
    const double dt = seconds_since(t0);
    total += dt;
    note("beta %.3f: rate %.6f bits, f_lower %.10f, f_upper %.10f, regions %lld, %.2f s", beta, pef.rate_bits,
         cert.f_lower, cert.f_upper, cert.regions, dt);
    worst = std::max(worst, cert.f_upper - 1.0);
    ok = ok && !cert.gap_flag && cert.f_upper - 1.0 <= 1e-4 && dt <= 600.0;
  }
  note("max f_upper - 1 = %.3e, total %.2f s", worst, total);
  report("pef_fmax_certified_near_one", ok);
}

// ---------------------------------------------------------------------------
struct Tally {
  long long cases = 0;
  long long violations = 0;
  double worst = 0.0;  // largest excess over the bound
  void check(double lhs, double rhs, double slack = 1e-9) {
    ++cases;
    const double excess = lhs - rhs;
    worst = std::max(worst, excess);
    if (excess > slack * std::max(1.0, std::abs(rhs))) ++violations;
  }
};

void criterion_renyi_properties() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim_d(2, 8);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const int n = 1000;
  auto draw_alpha = [&](bool petz) { return 1.0 + (petz ? 1.0 : 2.0) * (0.01 + 0.99 * u01(rng)); };
  // Sometimes rank-deficient σ with ρ inside its support.
  auto draw_pair = [&](int d, HermitianOperator& rho, HermitianOperator& sigma) {
    if (u01(rng) < 0.3 && d > 2) {
      const int r = std::max(1, d - 1 - static_cast<int>(u01(rng) * (d - 2)));
      const CMat basis = qpe::testing::ginibre(d, r, rng);
      Eigen::HouseholderQR<CMat> qr(basis);
      const CMat q = qr.householderQ() * CMat::Identity(d, r);
      sigma = random_psd(r, rng).congruence(q);
      rho = random_psd(r, rng, -1, 0.2 + u01(rng)).congruence(q);
    } else {
      sigma = random_density(d, rng);
      rho = random_psd(d, rng, 1 + static_cast<int>(u01(rng) * d), 0.2 + u01(rng));
    }
  };

  Tally alt, dom, sum, dpi, logconv, mono, classical, commuting;
  for (int i = 0; i < n; ++i) {
    const int d = dim_d(rng);
    HermitianOperator rho, sigma;
    draw_pair(d, rho, sigma);
    const RenyiOrder ap(draw_alpha(true));
    alt.check(renyi_power(rho, sigma, ap, RenyiKind::sandwiched), renyi_power(rho, sigma, ap, RenyiKind::petz));
  }
  for (int i = 0; i < n; ++i) {
    const int d = dim_d(rng);
    HermitianOperator rho, sigma;
    draw_pair(d, rho, sigma);
    const HermitianOperator sigma2 = sigma + random_psd(d, rng, 1 + static_cast<int>(u01(rng) * d), u01(rng));
    const bool petz = i % 2 == 1;
    const RenyiKind kind = petz ? RenyiKind::petz : RenyiKind::sandwiched;
    const RenyiOrder a(draw_alpha(petz));
    dom.check(renyi_power(rho, sigma2, a, kind), renyi_power(rho, sigma, a, kind));
  }
  for (int i = 0; i < n; ++i) {
    const int d = dim_d(rng);
    const int parts = 2 + static_cast<int>(u01(rng) * 4);
    std::vector<HermitianOperator> rs;
    HermitianOperator tot = HermitianOperator::zero(d);
    for (int j = 0; j < parts; ++j) {
      rs.push_back(random_psd(d, rng, 1 + static_cast<int>(u01(rng) * d), u01(rng) + 0.01));
      tot = tot + rs.back();
    }
    const bool petz = i % 2 == 1;
    const RenyiKind kind = petz ? RenyiKind::petz : RenyiKind::sandwiched;
    const RenyiOrder a(draw_alpha(petz));
    double acc = 0.0;
    for (const auto& r : rs) acc += renyi_power(r, tot, a, kind);
    sum.check(acc, tot.trace());
  }
  double kraus_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const int d = dim_d(rng);
    const int dout = dim_d(rng);
    const int count = 1 + static_cast<int>(u01(rng) * 4);
    const auto ks = qpe::testing::random_kraus(d, dout, count, rng);
    CMat id = CMat::Zero(d, d);
    for (const auto& k : ks) id += k.adjoint() * k;
    kraus_err = std::max(kraus_err, (id - CMat::Identity(d, d)).cwiseAbs().maxCoeff());
    HermitianOperator rho, sigma;
    draw_pair(d, rho, sigma);
    const bool petz = i % 2 == 1;
    const RenyiKind kind = petz ? RenyiKind::petz : RenyiKind::sandwiched;
    const RenyiOrder a(draw_alpha(petz));
    const auto erho = qpe::testing::apply_channel(ks, rho);
    const auto esig = qpe::testing::apply_channel(ks, sigma);
    dpi.check(renyi_power(erho, esig, a, kind, 1e-6), renyi_power(rho, sigma, a, kind));
  }
  for (int i = 0; i < n; ++i) {
    const int d = dim_d(rng);
    HermitianOperator rho, sigma;
    draw_pair(d, rho, sigma);
    const bool petz = i % 2 == 1;
    const RenyiKind kind = petz ? RenyiKind::petz : RenyiKind::sandwiched;
    const double amax = petz ? 2.0 : 3.0;
    const int steps = 12;
    std::vector<double> logs, roots;
    for (int j = 0; j <= steps; ++j) {
      const double alpha = 1.0 + (amax - 1.0) * (0.02 + 0.98 * j / steps);
      logs.push_back(std::log(renyi_power(rho, sigma, RenyiOrder(alpha), kind)));
      roots.push_back(std::log(renyi_power_normalized(rho, sigma, RenyiOrder(alpha), kind)) / (alpha - 1.0));
    }
    for (int j = 1; j < steps; ++j) logconv.check(logs[static_cast<size_t>(j)], 0.5 * (logs[static_cast<size_t>(j) - 1] + logs[static_cast<size_t>(j) + 1]));
    for (int j = 1; j <= steps; ++j) mono.check(roots[static_cast<size_t>(j) - 1], roots[static_cast<size_t>(j)]);
  }
  double classical_err = 0.0, commuting_err = 0.0;
  for (int i = 0; i < n; ++i) {
    // Classical blocks with trivial side information.
    const int nc = 2 + static_cast<int>(u01(rng) * 3);
    std::vector<double> p(static_cast<size_t>(nc));
    double tot = 0.0;
    for (auto& x : p) tot += (x = u01(rng) + 1e-3);
    const double alpha = draw_alpha(false);
    const HermitianOperator rz = HermitianOperator::diagonal(RVec::Constant(1, tot));
    for (int c = 0; c < nc; ++c) {
      const HermitianOperator rc = HermitianOperator::diagonal(RVec::Constant(1, p[static_cast<size_t>(c)]));
      const double got = renyi_power_normalized(rc, rz, RenyiOrder(alpha));
      const double want = std::pow(p[static_cast<size_t>(c)] / tot, alpha - 1.0);
      classical_err = std::max(classical_err, std::abs(got - want));
      classical.check(std::abs(got - want), 0.0, 1e-10);
    }
    // Commuting pair in a random basis against the scalar formula.
    const int d = dim_d(rng);
    const CMat g = qpe::testing::ginibre(d, d, rng);
    Eigen::HouseholderQR<CMat> qr(g);
    const CMat q = qr.householderQ();
    RVec r(d), s(d);
    for (int j = 0; j < d; ++j) {
      r(j) = u01(rng);
      s(j) = u01(rng) + 0.05;
    }
    const HermitianOperator rho(CMat(q * r.asDiagonal() * q.adjoint()));
    const HermitianOperator sig(CMat(q * s.asDiagonal() * q.adjoint()));
    for (RenyiKind kind : {RenyiKind::sandwiched, RenyiKind::petz}) {
      const double a = kind == RenyiKind::petz ? std::min(alpha, 2.0) : alpha;
      double w = 0.0;
      for (int j = 0; j < d; ++j) w += std::pow(r(j), a) * std::pow(s(j), 1.0 - a);
      const double got = renyi_power(rho, sig, RenyiOrder(a), kind);
      commuting_err = std::max(commuting_err, std::abs(got - w) / std::max(1.0, w));
      commuting.check(std::abs(got - w) / std::max(1.0, w), 0.0, 1e-10);
    }
  }
  auto line = [](const char* name, const Tally& t) {
    note("%-22s %5lld cases, %lld violations, worst excess %.2e", name, t.cases, t.violations, t.worst);
  };
  line("petz >= sandwiched", alt);
  line("dominance", dom);
  line("sum inequality", sum);
  line("data processing", dpi);
  line("log-convexity", logconv);
  line("monotonicity", mono);
  line("classical reduction", classical);
  line("commuting oracle", commuting);
  note("max Kraus completeness error %.2e; classical err %.2e; commuting err %.2e", kraus_err, classical_err,
       commuting_err);
  const bool ok = alt.violations == 0 && dom.violations == 0 && sum.violations == 0 && dpi.violations == 0 &&
                  logconv.violations == 0 && mono.violations == 0 && classical.violations == 0 &&
                  commuting.violations == 0 && kraus_err <= 1e-12 && alt.cases >= 1000 && dom.cases >= 1000 &&
                  sum.cases >= 1000 && dpi.cases >= 1000;
  report("renyi_power_properties", ok);
}

// ---------------------------------------------------------------------------
void criterion_gradient() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> dim_d(2, 8);
  double worst_rel = 0.0;
  int triples = 0;
  while (triples < 100) {
    const int d = dim_d(rng);
    const double alpha = 1.0 + 0.01 + 1.99 * u01(rng);
    // Non-degenerate τ: eigenvalues well separated and away from zero.
    RVec lam(d);
    for (int j = 0; j < d; ++j) lam(j) = 0.05 + u01(rng);
    lam /= lam.sum();
    std::vector<double> sorted(lam.data(), lam.data() + d);
    std::sort(sorted.begin(), sorted.end());
    bool separated = true;
    for (int j = 1; j < d; ++j) separated = separated && sorted[static_cast<size_t>(j)] - sorted[static_cast<size_t>(j) - 1] > 1e-3;
    if (!separated) continue;
    Eigen::HouseholderQR<RMat> qr(qpe::testing::ginibre(d, d, rng, true).real());
    const RMat q = qr.householderQ();
    const RMat tau = q * lam.asDiagonal() * q.transpose();
    RVec v = qpe::testing::ginibre(d, 1, rng, true).real();
    v.normalize();
    const ConcaveProblem p(alpha, {v}, {1.0});
    RMat grad;
    p.value_and_gradient(tau, grad);
    RMat fd(d, d);
    const double h = 1e-5;
    for (int a = 0; a < d; ++a)
      for (int b = a; b < d; ++b) {
        RMat e = RMat::Zero(d, d);
        e(a, b) = 1.0;
        e(b, a) = 1.0;
        const double df = (p.value(tau + h * e) - p.value(tau - h * e)) / (2.0 * h);
        // ⟨grad, e⟩ is 2 grad(a,b) off the diagonal and grad(a,a) on it.
        fd(a, b) = fd(b, a) = a == b ? df : df / 2.0;
      }
    worst_rel = std::max(worst_rel, (fd - grad).norm() / grad.norm());
    ++triples;
  }
  note("finite differences: %d triples, worst relative error %.2e", triples, worst_rel);

  long long iterates = 0, bad = 0;
  double worst_gap = 0.0;
  int sampled_bad = 0;
  for (int i = 0; i < 100; ++i) {
    const auto F = qpe::testing::random_trial_function(2, 0.01 + 0.49 * u01(rng), rng);
    const auto cfg = BellConfig::uniform(2, qpe::testing::random_angles(2, rng));
    InnerMaxOptions o;
    o.tol = 1e-9;
    o.observer = [&](double g, double lam1) {
      ++iterates;
      worst_gap = std::max(worst_gap, g - lam1);
      if (lam1 < g - 1e-12 * std::max(1.0, g)) ++bad;
    };
    const auto r = inner_max_tau(F, cfg, o);
    const auto prob = ConcaveProblem::from_trial_function(F, cfg);
    for (int s = 0; s < 20; ++s) {
      const RMat t = random_density(4, rng, -1, true).matrix().real();
      if (prob.value(t) > r.upper_bound * (1.0 + 1e-12)) ++sampled_bad;
    }
  }
  note("upper bound: %lld iterates, %lld with lambda1 < g (worst g - lambda1 = %.2e), %d sampled states above it",
       iterates, bad, worst_gap, sampled_bad);
  report("gradient_and_upper_bound", worst_rel <= 1e-6 && bad == 0 && sampled_bad == 0);
}

// ---------------------------------------------------------------------------
struct CertifiedQef {
  TrialFunction F;
  CqDistribution witness;  // canonical state attaining f_lower
};

CertifiedQef certified_qef(Family fam, double param, double beta) {
  const auto nu = family_member(fam, param).nu;
  const auto pef = optimize_pef_polytope(nu, beta);
  CertifyOptions co;
  co.gap_target = 1e-6;
  const auto cert = certify_fmax(pef.F, BellConfig::uniform(2), co);
  auto F = pef.F.scaled(1.0 / cert.f_upper);
  F.role = TrialRole::qef;
  note("QEF from %s(%.4f) at beta %.3f: f_upper %.10f, rate %.6f bits", family_name(fam).c_str(), param, beta,
       cert.f_upper, pef.rate_bits - std::log2(cert.f_upper) / beta);
  const CanonicalState w{HermitianOperator(cert.witness_tau), BellConfig::uniform(2, cert.witness_theta)};
  return {F, canonical_cq_state(w)};
}

void criterion_qefp_bound() {
  std::mt19937_64 rng(5150);
  const std::vector<CertifiedQef> qefs = {certified_qef(Family::E, std::numbers::pi / 4, 0.01),
                                         certified_qef(Family::W, 0.9, 0.05)};
  std::vector<CqDistribution> states;
  for (int i = 0; i < 1000; ++i)
    states.push_back(qpe::testing::random_diagonal_model_state(2, 1 + i % 4, rng));
  for (int i = 0; i < 1000; ++i) states.push_back(canonical_cq_state(qpe::testing::random_canonical(2, rng, 1 + i % 4)));
  for (const auto& q : qefs) states.push_back(q.witness);
  const std::vector<double> nu_z = uniform_mu(2);
  double worst = -1.0;
  long long checks = 0, bad = 0;
  for (const auto& q : qefs) {
    const auto K = ee_from_qef(q.F);
    for (double beta : {0.05, 0.2, 0.45}) {
      for (bool tight : {false, true}) {
        const auto c = qefp_constant(K, nu_z, beta, tight);
        const auto G = qefp_from_ee(K, c);
        const RenyiOrder ord(1.0 + beta);
        for (const auto& rho : states) {
          double acc = 0.0;
          for (int z = 0; z < 4; ++z)
            for (int cc = 0; cc < 4; ++cc) {
              const auto& blk = rho.block(cc, z);
              if (blk.trace() <= 0.0) continue;
              acc += G(cc, z) * renyi_power(blk, rho.marginal(z), ord, RenyiKind::petz, 1e-6);
            }
          worst = std::max(worst, acc);
          ++checks;
          if (acc > 1.0 + 1e-9) ++bad;
        }
      }
    }
  }
  note("%lld evaluations over %zu states, max sum %.12f, %lld above 1 + 1e-9", checks, states.size(), worst, bad);
  report("qefp_from_entropy_estimator_bound", bad == 0);
}

// ---------------------------------------------------------------------------
void criterion_binary_model() {
  bool ok = true;
  for (auto [p, q] : {std::pair{0.5, 0.5}, std::pair{0.1, 0.05}, std::pair{0.01, 0.01}}) {
    const double beta = 1e-4;
    const auto r = binary_model(p, q, beta);
    const double m = binary_model_optimal_m(p, q, beta);
    bool grid_ok = true;
    for (double mm : {1.0 + 1e-9, 1.001, 1.1, 2.0, 10.0, 1e3})
      grid_ok = grid_ok && binary_model_rate(p, q, beta, mm) <= binary_model_rate(p, q, beta, 1.0);
    const double diff = std::abs(r.logprob_rate - r.rate_limit);
    note("p %.2f q %.2f: rate %.8f limit %.8f diff %.2e, optimal m %.6f", p, q, r.logprob_rate, r.rate_limit, diff, m);
    ok = ok && diff <= 1e-3 && std::abs(m - 1.0) <= 1e-9 && grid_ok &&
         std::abs(binary_model_rate(p, q, beta, 1.0) - r.logprob_rate) <= 1e-9 * std::max(1.0, r.logprob_rate);
  }
  report("binary_model_limit", ok);
}

// ---------------------------------------------------------------------------
void criterion_interval_bound() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  long long checks = 0, bad = 0;
  double worst_ratio = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double beta = 0.01 + 0.99 * u01(rng);
    const auto F = qpe::testing::random_trial_function(2, beta, rng);
    const double phi = (0.02 + 0.98 * u01(rng)) * std::numbers::pi / 2;
    const int axis = static_cast<int>(u01(rng) * 2);
    auto th = qpe::testing::random_angles(2, rng);
    th[static_cast<size_t>(axis)] = u01(rng) * (std::numbers::pi - phi);
    const auto base = BellConfig::uniform(2);
    auto at = [&](double offset) {
      auto t = th;
      t[static_cast<size_t>(axis)] += offset;
      return base.with_angles(t);
    };
    const double f = inner_max_tau(F, at(0.0), 1e-10).upper_bound;
    const double fp = inner_max_tau(F, at(phi), 1e-10).upper_bound;
    const double bound = interval_bound(f, fp, phi, RenyiOrder(1.0 + beta));
    for (int j = 0; j < 5; ++j) {
      const double inner = inner_max_tau(F, at(phi * (0.01 + 0.98 * u01(rng))), 1e-10).value;
      ++checks;
      worst_ratio = std::max(worst_ratio, inner / bound);
      if (inner > bound * (1.0 + 1e-9)) ++bad;
    }
  }
  note("soundness: %lld interior points, %lld above the bound, max value/bound %.9f", checks, bad, worst_ratio);
  long long bad2 = 0;
  double worst2 = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double f = u01(rng) * 3.0, fp = u01(rng) * 3.0;
    const double phi = (1e-3 + (1.0 - 1e-3) * u01(rng)) * std::numbers::pi / 2;
    const double alpha = 1.0 + 1e-3 + (2.0 - 1e-3) * u01(rng);
    const double b = interval_bound(f, fp, phi, RenyiOrder(alpha));
    const double cap = std::pow(phi / std::sin(phi), alpha) * std::max(f, fp);
    worst2 = std::max(worst2, b / cap);
    if (b > cap * (1.0 + 1e-12)) ++bad2;
  }
  note("cap: 1000 random (f, f', phi, alpha), %lld above (phi/sin phi)^alpha max(f, f'), max ratio %.9f", bad2, worst2);
  report("interval_bound_soundness", bad == 0 && bad2 == 0);
}

// ---------------------------------------------------------------------------
void criterion_accounting_curves() {
  const auto t0 = Clock::now();
  bool above = true;
  for (int N : {2, 4, 8})
    for (double k : {1.0, std::log(static_cast<double>(N))}) {
      const auto pts = comparison_curve(N, k);
      double min_gap = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) {
        min_gap = std::min(min_gap, p.r_qef - p.r_eat);
        above = above && p.r_qef > p.r_eat;
      }
      note("N %d k_inf %.4f: %zu points, min r_qef - r_eat %.3e", N, k, pts.size(), min_gap);
    }
  const double target = std::sqrt(2.0 * std::numbers::log2e);
  ErrorBudget b;
  for (auto [N, k] : {std::pair{2, 1.0}, std::pair{8, std::log(8.0)}, std::pair{8, 100.0}})
    note("prefactor ratio at N %d k_inf %.3f, n 1e10: %.6f", N, k, prefactor_ratio(N, k, 1e10, b));
  const double ratio = prefactor_ratio(8, 1000.0, 1e10, b);
  const double dt = seconds_since(t0);
  note("prefactor ratio at N 8 k_inf 1000, n 1e10: %.6f (limit %.6f, rel dev %.2e); %.3f s", ratio, target,
       std::abs(ratio / target - 1.0), dt);
  report("accounting_curves_qef_above_eat", above && std::abs(ratio / target - 1.0) <= 0.01 && dt < 1.0);
}

// ---------------------------------------------------------------------------
void criterion_mintrials() {
  MintrialsOptions mo;
  mo.budget.epsilon = 1e-6;
  mo.budget.kappa = 1.0;
  bool ok = true;
  for (Family fam : {Family::W, Family::E, Family::P}) {
    const auto t0 = Clock::now();
    const auto params = family_grid(fam, 6, 2.01, family_max_chsh(fam));
    const auto rows = mintrials_table(fam, params, mo);
    bool monotone = true;
    double min_ratio = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rows.size(); ++i) {
      const auto& r = rows[i];
      note("%s param %.6f I_hat %.5f beta %.4f n_qef %.6g n_eat_F %.6g ratio %.2f f_upper %.8f", r.family.c_str(),
           r.param, r.i_hat, r.beta, r.n_qef, r.n_eat_F, r.ratio(), r.f_upper);
      min_ratio = std::min(min_ratio, r.ratio());
      if (i > 0) monotone = monotone && r.n_qef < rows[i - 1].n_qef;
    }
    note("%s: n_qef decreasing %s, min ratio %.2f, %.1f s", family_name(fam).c_str(), monotone ? "yes" : "no",
         min_ratio, seconds_since(t0));
    ok = ok && monotone;
    if (fam == Family::W) ok = ok && min_ratio >= 30.0;
  }
  report("mintrials_werner_ratio_and_monotone", ok);
}

// ---------------------------------------------------------------------------
void criterion_protocols() {
  const auto t0 = Clock::now();
  const auto nu = family_member(Family::E, std::numbers::pi / 4).nu;
  const auto lr = family_member(Family::E, 0.0).nu;
  const double beta = 0.01;
  const auto pef = optimize_pef_polytope(nu, beta);
  CertifyOptions co;
  co.gap_target = 1e-5;
  const auto cert = certify_fmax(pef.F, BellConfig::uniform(2), co);
  auto F = pef.F.scaled(1.0 / cert.f_upper);
  F.role = TrialRole::qef;

  ProtocolParams pp;
  pp.k_o = 32;
  pp.epsilon = 1e-6;
  pp.epsilon_x = 5e-7;
  pp.beta = beta;
  pp.k_i = std::ceil(ProtocolParams::min_k_i(pp.k_o, pp.epsilon_x));
  double mean = 0.0;
  for (int z = 0; z < 4; ++z)
    for (int c = 0; c < 4; ++c) mean += nu.prob(c, z) * std::log(F(c, z));
  const double threshold = protocol_log_f_min(pp, 0.0) / mean;
  pp.n = static_cast<long long>(std::ceil(1.2 * threshold));
  note("log f_min %.4f nats, E log F %.6e, expected crossing %.0f trials, n %lld", protocol_log_f_min(pp, 0.0), mean,
       threshold, pp.n);

  const long long seed_len = protocol_seed_length(ProtocolRunner::Kind::one, pp);
  int ok_q = 0, ok_lr = 0, ok_p2 = 0, p2_runs = 0, identical = 0;
  for (int run = 0; run < 100; ++run) {
    std::mt19937_64 rng(1000 + static_cast<unsigned long long>(run));
    const auto seed = random_bits(seed_len, rng);
    const auto rq = simulate_records(nu, pp.n, rng);
    const auto rl = simulate_records(lr, pp.n, rng);
    const auto r1 = run_protocol1(rq, {F}, pp, seed);
    const auto r1l = run_protocol1(rl, {F}, pp, seed);
    ok_q += r1.success;
    ok_lr += r1l.success;
    const auto r3 = run_protocol3(rq, {F}, pp, seed);
    identical += r3.success == r1.success && r3.output == r1.output && r3.log_qef == r1.log_qef;
    const auto seed2 = random_bits(protocol_seed_length(ProtocolRunner::Kind::two, pp), rng);
    const auto bank = random_bits(pp.k_o, rng);
    for (const auto* recs : {&rq, &rl}) {
      const auto r2 = run_protocol2(*recs, {F}, pp, seed2, bank);
      ++p2_runs;
      ok_p2 += r2.success && static_cast<long long>(r2.output.size()) == pp.k_o;
    }
  }
  // Protocol 2 on a stream that carries no evidence at all.
  {
    std::mt19937_64 rng(4242);
    const auto seed2 = random_bits(protocol_seed_length(ProtocolRunner::Kind::two, pp), rng);
    const auto bank = random_bits(pp.k_o, rng);
    const auto r2 = run_protocol2({}, {F}, pp, seed2, bank);
    ++p2_runs;
    ok_p2 += r2.success && static_cast<long long>(r2.output.size()) == pp.k_o;
  }
  const double dt = seconds_since(t0);
  note("protocol 1: %d/100 at the quantum distribution, %d/100 at a local distribution", ok_q, ok_lr);
  note("protocol 2: %d/%d succeeded; protocol 3 with k_z = 0 identical to protocol 1 in %d/100 runs; %.1f s", ok_p2,
       p2_runs, identical, dt);
  report("protocols_end_to_end", ok_q >= 95 && ok_lr <= 1 && ok_p2 == p2_runs && identical == 100 && dt <= 300.0);
}

}  // namespace

int main(int argc, char** argv) {
  // Optional filter: run only criteria whose name contains argv[1].
  const std::string filter = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<void()>>> all = {
      {"iota0", criterion_iota0},
      {"fmax", criterion_fmax_near_one},
      {"renyi", criterion_renyi_properties},
      {"gradient", criterion_gradient},
      {"qefp", criterion_qefp_bound},
      {"binary", criterion_binary_model},
      {"interval", criterion_interval_bound},
      {"accounting", criterion_accounting_curves},
      {"mintrials", criterion_mintrials},
      {"protocols", criterion_protocols},
  };
  for (const auto& [name, fn] : all) {
    if (!filter.empty() && name.find(filter) == std::string::npos) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      std::printf("    exception: %s\n", e.what());
      report(name, false);
    }
  }
  return failures == 0 ? 0 : 1;
}
