#include "qpe/certify.hpp"
#include "qpe/inner_max.hpp"
#include "qpe/interval.hpp"
#include "qpe/models.hpp"
#include "qpe/qef.hpp"
#include "../support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace qpe;
using doctest::Approx;

TEST_CASE("qubit povm completeness and orientation") {
  for (double phi : {0.0, 0.3, std::numbers::pi / 2, std::numbers::pi}) {
    const auto sum = qubit_povm(0, 1, phi) + qubit_povm(1, 1, phi);
    CHECK((sum.matrix() - CMat::Identity(2, 2)).norm() < 1e-14);
  }
  CHECK(qubit_povm(0, 0, 0.7)(0, 0).real() == Approx(1.0));
  const auto q = qubit_povm(0, 1, std::numbers::pi / 2);
  CHECK(q(0, 1).real() == Approx(0.5));
}

TEST_CASE("povm tensor is a complete projective measurement") {
  std::mt19937_64 rng(1);
  for (int k = 1; k <= 3; ++k) {
    const auto cfg = BellConfig::uniform(k, testing::random_angles(k, rng));
    for (int z = 0; z < cfg.num_values(); ++z) {
      CMat sum = CMat::Zero(cfg.dim(), cfg.dim());
      for (int c = 0; c < cfg.num_values(); ++c) sum += povm_tensor(cfg, c, z).matrix();
      CHECK((sum - CMat::Identity(cfg.dim(), cfg.dim())).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(BellConfig::uniform(2, {0.1, 4.0}), DomainError);
}

TEST_CASE("family CHSH values") {
  CHECK(family_member(Family::W, 1.0).chsh == Approx(2.0 * std::numbers::sqrt2).epsilon(1e-6));
  CHECK(family_member(Family::E, 0.0).chsh == Approx(2.0).epsilon(1e-6));
  for (double th : {0.1, 0.3, 0.6}) {
    const double s = std::sin(2.0 * th);
    CHECK(family_member(Family::E, th).chsh == Approx(2.0 * std::sqrt(1.0 + s * s)).epsilon(1e-6));
  }
  for (double p : {0.75, 0.9}) CHECK(family_member(Family::W, p).chsh == Approx(2.0 * std::numbers::sqrt2 * p).epsilon(1e-6));
  CHECK(family_member(Family::P, 1.0).chsh > 2.0);
  CHECK_THROWS_AS(family_member(Family::W, 1.5), DomainError);
}

TEST_CASE("family distributions are non-signaling and normalized") {
  for (auto [f, p] : {std::pair{Family::E, 0.4}, std::pair{Family::W, 0.8}, std::pair{Family::P, 0.9}}) {
    const auto nu = family_member(f, p).nu;
    CHECK_NOTHROW(nu.validate());
    CHECK(nu.signaling_violation() < 1e-10);
  }
}

TEST_CASE("local deterministic vertices satisfy CHSH <= 2") {
  const auto vs = local_deterministic_vertices(std::vector<double>(4, 0.25));
  CHECK(vs.size() == 16);
  for (const auto& v : vs) CHECK(std::abs(chsh_value(v)) <= 2.0 + 1e-12);
}

TEST_CASE("q_alpha equals the Renyi-power sum of the canonical state") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const double beta = 0.05 + 0.9 * (i % 10) / 10.0;
    const auto F = testing::random_trial_function(2, beta, rng);
    const auto s = testing::random_canonical(2, rng);
    const auto rho = canonical_cq_state(s);
    const double direct = q_alpha(F, s.config, s.tau);
    const double via_renyi = rho.trace_total() - qef_inequality_check(F, rho);
    CHECK(direct == Approx(via_renyi).epsilon(1e-9));
  }
}

TEST_CASE("chain and power reduction") {
  const TrialFunction F(1, 1, 0.1, {2.0, 0.5, 1.0, 4.0});
  const auto r = chain({F}, {{0, 0}, {1, 1}, {1, 0}});
  CHECK(r.log_total == Approx(std::log(2.0 * 4.0 * 0.5)));
  CHECK(r.trials == 3);
  const TrialFunction Z(1, 1, 0.1, {0.0, 1.0, 1.0, 1.0});
  CHECK(chain({Z}, {{0, 0}, {1, 0}}).hit_zero);
  const auto G = power_reduce(F, 0.5);
  CHECK(G.beta == Approx(0.05));
  CHECK(G(0, 0) == Approx(std::sqrt(2.0)));
  CHECK_THROWS_AS(power_reduce(F, 1.5), DomainError);
  const TrialFunction H(1, 1, 0.2, {1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(chain({F, H}, {{0, 0}, {0, 0}}), DomainError);
}

TEST_CASE("constant one is a QEF: f_max of the unit function is 1") {
  const auto F = TrialFunction::constant(2, 2, 0.1, 1.0);
  std::mt19937_64 rng(6);
  for (int i = 0; i < 10; ++i) {
    const auto cfg = BellConfig::uniform(2, testing::random_angles(2, rng));
    const auto r = inner_max_tau(F, cfg, 1e-10);
    CHECK(r.value <= 1.0 + 1e-9);
    CHECK(r.upper_bound >= r.value);
  }
}

TEST_CASE("inner maximization agrees with random search and warm starts") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    const auto F = testing::random_trial_function(2, 0.2, rng);
    const auto cfg = BellConfig::uniform(2, testing::random_angles(2, rng));
    const auto r = inner_max_tau(F, cfg, 1e-10);
    CHECK(r.upper_bound - r.value <= 1e-10 + 1e-12);
    const double at = q_alpha(F, cfg, HermitianOperator(r.tau));
    CHECK(at == Approx(r.value).epsilon(1e-9));
    for (int s = 0; s < 50; ++s) CHECK(q_alpha(F, cfg, testing::random_density(4, rng)) <= r.upper_bound + 1e-12);
    InnerMaxOptions o;
    o.tol = 1e-10;
    o.warm_start = &r.tau;
    const auto w = inner_max_tau(F, cfg, o);
    CHECK(w.value == Approx(r.value).epsilon(1e-9));
  }
}

TEST_CASE("invariant blocks split decoupled problems") {
  RVec a = RVec::Zero(4), b = RVec::Zero(4);
  a(0) = 1.0;
  b(2) = 1.0;
  const ConcaveProblem p(1.5, {a, b}, {1.0, 2.0});
  CHECK(invariant_blocks(p).size() == 2);
  const auto r = inner_max_tau(p);
  CHECK(r.value == Approx(2.0).epsilon(1e-9));
}

TEST_CASE("interval bound") {
  const RenyiOrder ord(1.3);
  CHECK(interval_bound(1.0, 1.0, 0.5, ord) >= 1.0);
  CHECK(interval_bound(0.0, 0.0, 0.5, ord) == 0.0);
  CHECK_THROWS_AS(interval_bound(1.0, 1.0, 2.0, ord), DomainError);
  CHECK_THROWS_AS(interval_bound(-1.0, 1.0, 1.0, ord), DomainError);
  // The maximum of u over [0, φ] by dense sampling.
  for (auto [f, fp, phi] : {std::tuple{1.0, 0.7, 0.9}, std::tuple{0.3, 1.2, 1.5}, std::tuple{2.0, 2.0, 0.1}}) {
    double best = 0.0;
    for (int i = 0; i <= 20000; ++i) best = std::max(best, interval_u(f, fp, phi, phi * i / 20000.0, ord));
    CHECK(interval_bound(f, fp, phi, ord) == Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("region bound reduces to the interval bound in one dimension") {
  const double b = region_upper_bound({0.8, 1.1}, {0.4}, 1.2);
  CHECK(b == Approx(interval_bound(0.8, 1.1, 0.4, RenyiOrder(1.2))));
  CHECK_THROWS_AS(region_upper_bound({1.0, 1.0, 1.0}, {0.4}, 1.2), DomainError);
}

TEST_CASE("certify_fmax brackets sampled values and is thread-count independent") {
  std::mt19937_64 rng(21);
  const auto F = testing::random_trial_function(1, 0.3, rng);
  CertifyOptions co;
  co.gap_target = 1e-5;
  const auto one = certify_fmax(F, BellConfig::uniform(1), co);
  co.threads = 3;
  const auto three = certify_fmax(F, BellConfig::uniform(1), co);
  CHECK(one.f_upper == three.f_upper);
  CHECK(one.f_lower == three.f_lower);
  CHECK(one.gap() <= 1e-5);
  for (int i = 0; i < 200; ++i) {
    const auto cfg = BellConfig::uniform(1, testing::random_angles(1, rng));
    CHECK(q_alpha(F, cfg, testing::random_density(2, rng)) <= one.f_upper);
  }
  const auto w = BellConfig::uniform(1, one.witness_theta);
  CHECK(q_alpha(F, w, HermitianOperator(one.witness_tau)) == Approx(one.f_lower).epsilon(1e-9));
}

TEST_CASE("certify_fmax budget exhaustion raises the gap flag") {
  std::mt19937_64 rng(22);
  const auto F = testing::random_trial_function(2, 0.2, rng);
  CertifyOptions co;
  co.gap_target = 1e-12;
  co.budget = 40;
  const auto r = certify_fmax(F, BellConfig::uniform(2), co);
  CHECK(r.gap_flag);
  CHECK(r.f_upper >= r.f_lower);
}
