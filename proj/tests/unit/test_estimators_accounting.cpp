#include "qpe/accounting.hpp"
#include "qpe/certify.hpp"
#include "qpe/entropy.hpp"
#include "qpe/estimators.hpp"
#include "qpe/pef.hpp"
#include "../support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace qpe;
using doctest::Approx;

TEST_CASE("iota0 root") {
  CHECK(iota0() == Approx(2.065338138974705).epsilon(1e-14));
  CHECK(ceil_iota(1.0) == iota0());
  CHECK(ceil_iota(3.0) == 3.0);
}

TEST_CASE("entropy estimator from a certified QEF lower-bounds conditional entropy") {
  const auto nu = family_member(Family::E, std::numbers::pi / 4).nu;
  const auto pef = optimize_pef_polytope(nu, 0.02);
  CertifyOptions co;
  co.gap_target = 1e-4;
  const auto cert = certify_fmax(pef.F, BellConfig::uniform(2), co);
  const auto F = pef.F.scaled(1.0 / cert.f_upper);
  bool neg = true;
  const auto K = ee_from_qef(F, &neg);
  CHECK_FALSE(neg);
  std::mt19937_64 rng(17);
  for (int i = 0; i < 200; ++i) {
    const auto rho = canonical_cq_state(testing::random_canonical(2, rng, 1 + i % 4));
    double ek = 0.0;
    for (int z = 0; z < 4; ++z)
      for (int c = 0; c < 4; ++c) ek += rho.prob(c, z) * K(c, z);
    CHECK(ek <= conditional_entropy(rho) + 1e-9);
  }
  const TrialFunction Z(1, 1, 0.1, {0.0, 1.0, 1.0, 1.0});
  ee_from_qef(Z, &neg);
  CHECK(neg);
}

TEST_CASE("qefp constant") {
  const TrialFunction K(2, 2, 0.0, std::vector<double>(16, 0.3));
  const std::vector<double> mu(4, 0.25);
  const auto simple = qefp_constant(K, mu, 0.2);
  const auto tight = qefp_constant(K, mu, 0.2, true);
  CHECK(simple.c_value > 0.0);
  CHECK(tight.c_value <= simple.c_value);
  CHECK(simple.per_z.size() == 4);
  CHECK_THROWS_AS(qefp_constant(K, mu, 0.5), DomainError);
  CHECK_THROWS_AS(qefp_constant(K, {0.5, 0.5}, 0.2), DomainError);
  const auto G = qefp_from_ee(K, simple);
  CHECK(G(0, 0) == Approx(std::exp(0.2 * 0.3) / (1.0 + simple.c_value * 0.04 / 2.0)));
}

TEST_CASE("max-prob estimator and spot checking") {
  const TrialFunction B(1, 1, 0.0, {0.9, 0.2, 0.6, 0.4});
  const auto K = ee_from_maxprob(B, 0.6);
  CHECK(K(0, 0) == Approx(-std::log(0.6) + 1.0 - 0.9 / 0.6));
  CHECK_THROWS_AS(ee_from_maxprob(B, 0.0), DomainError);

  const auto s = spot_check_scheme(B, 0.1, 0, 0.6);
  CHECK(s.B_r(1, 1, 0) == 1.0);
  CHECK(s.B_r(1, 1, 1) == Approx(1.0 + (0.4 - 1.0) / 0.1));
  CHECK(s.input_prob(0, 0) == Approx(0.9));
  CHECK(s.input_prob(1, 0) == 0.0);
  CHECK(s.input_prob(1, 1) == Approx(0.05));
  double tot = 0.0;
  for (int z = 0; z < 2; ++z)
    for (int t = 0; t < 2; ++t) tot += s.input_prob(z, t);
  CHECK(tot == Approx(1.0));
  // E B_r under the spot-checking distribution equals E B under uniform inputs.
  const std::vector<double> nu = {0.3, 0.2, 0.1, 0.4};
  const double eb = spot_check_expectation(s, s.B_r, nu);
  const double want = 0.5 * (0.6 * 0.9 + 0.4 * 0.2) + 0.5 * (0.2 * 0.6 + 0.8 * 0.4);
  CHECK(eb == Approx(want));
  CHECK_THROWS_AS(spot_check_scheme(B, 0.7, 0, 0.6), DomainError);
}

TEST_CASE("expansion rate and schedule") {
  const TrialFunction B(1, 1, 0.0, {0.9, 0.2, 0.6, 0.4});
  const auto s = spot_check_scheme(B, 0.01, 0, 0.6);
  const auto probe = expansion_rate(s, 1e-12);
  CHECK(probe.g_lower == Approx(-std::log(0.6)).epsilon(1e-6));
  const double beta = probe.d * s.r;
  const auto e = expansion_rate(s, beta);
  CHECK(e.g_lower == Approx(-std::log(0.6) - e.d_prime * beta / s.r));
  CHECK_THROWS_AS(expansion_rate(s, 2.0 * beta), DomainError);
  const double l = std::log(2.0 / 1e-12);
  const auto sch = expansion_schedule(s, l);
  CHECK(sch.g0 == Approx(-std::log(0.6)));
  CHECK(sch.c <= probe.d);
  CHECK(sch.c <= sch.g0 / (3.0 * probe.d_prime) * (1.0 + 1e-12));
  // Net log-prob n(g0 − d′β/r) − l/β is at least n g0/3 for n = c′/r.
  for (double r : {0.01, 0.001}) {
    const double n = sch.c_prime / r, b = sch.c * r;
    CHECK(n * (sch.g0 - probe.d_prime * b / r) - l / b >= n * sch.g0 / 3.0 - 1e-6 * n);
  }
}

TEST_CASE("binary model") {
  const auto r = binary_model(0.5, 0.5, 1e-4);
  CHECK(r.rate_limit == Approx(std::log(2.0)));
  CHECK(r.logprob_rate == Approx(r.rate_limit).epsilon(1e-3));
  CHECK(binary_model_optimal_m(0.1, 0.05, 0.01) == 1.0);
  CHECK(binary_model_rate(0.1, 0.05, 0.01, 1.0) > binary_model_rate(0.1, 0.05, 0.01, 1.5));
  CHECK_THROWS_AS(binary_model(0.1, 0.2, 0.01), DomainError);
}

TEST_CASE("trial-count formulas") {
  ErrorBudget b;
  CHECK(n_min_qef(0.5, 0.01, b) == Approx(8172.62742773).epsilon(1e-10));
  CHECK(n_min_eat_from_ee(0.5, 3.2, 4, b) == Approx(33610.9597379).epsilon(1e-10));
  ErrorBudget bk;
  bk.kappa = 0.5;
  CHECK(n_min_qef(0.3, 0.2, bk) == Approx(701.052285644).epsilon(1e-10));
  CHECK_THROWS_AS(n_min_qef(0.0, 0.1, b), DomainError);
}

TEST_CASE("min-entropy certificate") {
  ErrorBudget b;
  const auto c = minentropy_bound(50.0, 0.05, b);
  CHECK(c.smooth_minentropy_bits == Approx(625.432298116).epsilon(1e-10));
  CHECK(c.threshold_met);
  CHECK(minentropy_bound(1.0, 0.05, b).smooth_minentropy_bits < 0.0);
  ErrorBudget bad;
  bad.epsilon = 0.0;
  CHECK_THROWS_AS(minentropy_bound(1.0, 0.05, bad), DomainError);
}

TEST_CASE("net log-prob") {
  ErrorBudget b;
  const double g = 0.3, n = 1e5, beta = 0.05;
  CHECK(net_logprob(g, n, beta, b) == Approx(n * g + std::log(1e-12 / 2.0) / beta));
  const double r = std::abs(std::log(b.epsilon)) / n;
  CHECK(net_logprob_rate(g, n, beta, b) == Approx(g - 2.0 * r / beta - std::log(2.0) / (n * beta)));
}

TEST_CASE("rate curves") {
  for (int N : {2, 4}) {
    const auto pts = comparison_curve(N, 1.0);
    REQUIRE(!pts.empty());
    CHECK(pts.front().h == Approx(0.01));
    CHECK(pts.back().h <= std::log(static_cast<double>(N)) + 1e-12);
    for (const auto& p : pts) {
      CHECK(p.r_qef > p.r_eat);
      CHECK(p.r_eat >= 0.0);
      CHECK(p.r_qef <= p.h);
    }
  }
  CHECK(h_min_qef(2, 1.0, r_max_qef(2, 1.0, 0.3)) == Approx(0.3).epsilon(1e-6));
  std::ostringstream os;
  write_curve_csv(os, comparison_curve(2, 1.0));
  CHECK(os.str().rfind("h_nats,r_eat,r_qef\n", 0) == 0);
}

TEST_CASE("second-order bounds grow linearly with n") {
  ErrorBudget b;
  const double h = 0.5;
  const auto tc = [](double beta) { return tilde_c_at(4, 1.0, beta); };
  const double q1 = eat_from_qef_bound(h, tc, 1e8, b), q2 = eat_from_qef_bound(h, tc, 4e8, b);
  CHECK(q2 > 3.9 * q1);
  CHECK(eat_reference_bound(h, 1.0, 4, 1e8, b) < q1);
}
