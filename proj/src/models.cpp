#include "qpe/models.hpp"

#include "qpe/optim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>

namespace qpe {

using std::numbers::pi;

BellConfig::BellConfig(int k_, std::vector<double> mu, std::vector<double> theta)
    : k(k_), input_dist(std::move(mu)), angles(std::move(theta)) {
  validate();
}

BellConfig BellConfig::uniform(int k, std::vector<double> theta) {
  if (theta.empty()) theta.assign(static_cast<size_t>(k), 0.0);
  return BellConfig(k, std::vector<double>(static_cast<size_t>(1 << k), 1.0 / (1 << k)), std::move(theta));
}

BellConfig BellConfig::with_angles(std::vector<double> theta) const {
  return BellConfig(k, input_dist, std::move(theta));
}

void BellConfig::validate() const {
  if (k < 1 || k > 3) throw DomainError("BellConfig: k must be in 1..3");
  if (static_cast<int>(input_dist.size()) != (1 << k)) throw DomainError("BellConfig: input distribution size");
  if (static_cast<int>(angles.size()) != k) throw DomainError("BellConfig: angle vector size");
  double s = 0.0;
  for (double m : input_dist) {
    if (!(m >= 0.0)) throw DomainError("BellConfig: negative input probability");
    s += m;
  }
  if (std::abs(s - 1.0) > 1e-12) throw DomainError("BellConfig: input distribution not normalized");
  for (double t : angles)
    if (!(t >= 0.0 && t <= pi)) throw DomainError("BellConfig: angles must lie in [0, pi]");
}

Eigen::Vector2d qubit_povm_vector(int c, int z, double phi) {
  if ((c != 0 && c != 1) || (z != 0 && z != 1)) throw DomainError("qubit_povm: bits must be 0 or 1");
  if (z == 0) return c == 0 ? Eigen::Vector2d(1.0, 0.0) : Eigen::Vector2d(0.0, 1.0);
  const double h = 0.5 * phi;
  return c == 0 ? Eigen::Vector2d(std::cos(h), std::sin(h)) : Eigen::Vector2d(-std::sin(h), std::cos(h));
}

HermitianOperator qubit_povm(int c, int z, double phi) {
  if (!(phi > -pi - 1e-15 && phi <= pi + 1e-15)) throw DomainError("qubit_povm: phi out of range");
  const Eigen::Vector2d v = qubit_povm_vector(c, z, phi);
  return HermitianOperator(RMat(v * v.transpose()));
}

RVec povm_tensor_vector(const BellConfig& config, int c, int z) {
  if (c < 0 || c >= config.num_values() || z < 0 || z >= config.num_values())
    throw DomainError("povm_tensor: string out of range");
  RVec v = RVec::Ones(1);
  for (int i = 0; i < config.k; ++i) {
    const Eigen::Vector2d q = qubit_povm_vector((c >> i) & 1, (z >> i) & 1, config.angles[static_cast<size_t>(i)]);
    RVec next(v.size() * 2);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      next(2 * j) = v(j) * q(0);
      next(2 * j + 1) = v(j) * q(1);
    }
    v = next;
  }
  return v;
}

HermitianOperator povm_tensor(const BellConfig& config, int c, int z) {
  const RVec v = povm_tensor_vector(config, c, z);
  return HermitianOperator(RMat(v * v.transpose()));
}

CqDistribution canonical_cq_state(const CanonicalState& s) {
  const auto& cfg = s.config;
  if (s.tau.dim() != cfg.dim()) throw DomainError("canonical_cq_state: tau dimension mismatch");
  if (!s.tau.is_psd() || std::abs(s.tau.trace() - 1.0) > 1e-12)
    throw DomainError("canonical_cq_state: tau must be a density operator");
  const CMat r = s.tau.sqrt().matrix();
  std::vector<HermitianOperator> blocks;
  blocks.reserve(static_cast<size_t>(cfg.num_values() * cfg.num_values()));
  for (int z = 0; z < cfg.num_values(); ++z)
    for (int c = 0; c < cfg.num_values(); ++c) {
      const CVec v = povm_tensor_vector(cfg, c, z).cast<cplx>();
      const CVec w = r * v;
      blocks.push_back(HermitianOperator(CMat(cfg.input_dist[static_cast<size_t>(z)] * w * w.adjoint())));
    }
  return CqDistribution(cfg.num_values(), cfg.num_values(), std::move(blocks));
}

TrialDistribution::TrialDistribution(int cb, int zb, std::vector<double> p, std::string t)
    : c_bits(cb), z_bits(zb), probs(std::move(p)), tag(std::move(t)) {
  if (static_cast<int>(probs.size()) != num_c() * num_z()) throw DomainError("TrialDistribution: size mismatch");
}

double TrialDistribution::input_prob(int z) const {
  double s = 0.0;
  for (int c = 0; c < num_c(); ++c) s += prob(c, z);
  return s;
}

double TrialDistribution::conditional(int c, int z) const {
  const double m = input_prob(z);
  return m > 0.0 ? prob(c, z) / m : 0.0;
}

double TrialDistribution::signaling_violation() const {
  if (c_bits != z_bits) return 0.0;
  const int k = c_bits;
  double worst = 0.0;
  // Marginal of station i for outcome bit a at input z must not depend on the
  // other stations' settings.
  for (int i = 0; i < k; ++i)
    for (int z = 0; z < num_z(); ++z)
      for (int z2 = 0; z2 < num_z(); ++z2) {
        if (((z >> i) & 1) != ((z2 >> i) & 1)) continue;
        if (input_prob(z) <= 0.0 || input_prob(z2) <= 0.0) continue;
        for (int a = 0; a < 2; ++a) {
          double m1 = 0.0, m2 = 0.0;
          for (int c = 0; c < num_c(); ++c)
            if (((c >> i) & 1) == a) {
              m1 += conditional(c, z);
              m2 += conditional(c, z2);
            }
          worst = std::max(worst, std::abs(m1 - m2));
        }
      }
  return worst;
}

void TrialDistribution::validate(double tol) const {
  double s = 0.0;
  for (double p : probs) {
    if (!(p >= -tol)) throw DomainError("TrialDistribution: negative probability");
    s += p;
  }
  if (std::abs(s - 1.0) > tol) throw DomainError("TrialDistribution: not normalized");
}

TrialDistribution two_station_distribution(const RMat& rho, const std::vector<double>& angles, double eta) {
  if (rho.rows() != 4 || angles.size() != 4) throw DomainError("two_station_distribution: shape");
  auto povm = [eta](int c, double phi) {
    const Eigen::Vector2d v = qubit_povm_vector(c, 1, phi);
    Eigen::Matrix2d e = eta * v * v.transpose();
    if (c == 1) e += (1.0 - eta) * Eigen::Matrix2d::Identity();
    return e;
  };
  std::vector<double> p(16);
  for (int z = 0; z < 4; ++z)
    for (int c = 0; c < 4; ++c) {
      const Eigen::Matrix2d ea = povm(c & 1, angles[static_cast<size_t>(z & 1)]);
      const Eigen::Matrix2d eb = povm((c >> 1) & 1, angles[static_cast<size_t>(2 + ((z >> 1) & 1))]);
      RMat e(4, 4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) e.block(2 * i, 2 * j, 2, 2) = ea(i, j) * eb;
      p[static_cast<size_t>(z * 4 + c)] = 0.25 * std::max(0.0, (rho.cwiseProduct(e.transpose())).sum());
    }
  double s = 0.0;
  for (double x : p) s += x;
  for (double& x : p) x /= s;
  return TrialDistribution(2, 2, std::move(p));
}

TrialDistribution distribution_from_canonical(const CanonicalState& s) {
  const auto& cfg = s.config;
  const int n = cfg.num_values();
  std::vector<double> p(static_cast<size_t>(n * n));
  for (int z = 0; z < n; ++z)
    for (int c = 0; c < n; ++c) {
      const CVec v = povm_tensor_vector(cfg, c, z).cast<cplx>();
      p[static_cast<size_t>(z * n + c)] =
          cfg.input_dist[static_cast<size_t>(z)] * std::max(0.0, (v.adjoint() * s.tau.matrix() * v)(0, 0).real());
    }
  return TrialDistribution(cfg.k, cfg.k, std::move(p));
}

double chsh_value(const TrialDistribution& nu) {
  if (nu.c_bits != 2 || nu.z_bits != 2) throw DomainError("chsh_value: needs two stations");
  for (int z = 0; z < 4; ++z)
    if (std::abs(nu.input_prob(z) - 0.25) > 1e-9) throw DomainError("chsh_value: needs uniform inputs");
  double acc = 0.0;
  for (int z = 0; z < 4; ++z) {
    const int x = z & 1, y = (z >> 1) & 1;
    for (int c = 0; c < 4; ++c) {
      const int a = c & 1, b = (c >> 1) & 1;
      acc += 4.0 * (1 - 2 * x * y) * ((a + b) % 2 ? -1.0 : 1.0) * nu.prob(c, z);
    }
  }
  return acc;
}

Family parse_family(const std::string& name) {
  if (name == "E" || name == "e") return Family::E;
  if (name == "W" || name == "w") return Family::W;
  if (name == "P" || name == "p") return Family::P;
  throw DomainError("unknown family '" + name + "'");
}

std::string family_name(Family f) {
  switch (f) {
    case Family::E: return "E";
    case Family::W: return "W";
    case Family::P: return "P";
  }
  return "?";
}

RMat bell_state_density(double theta) {
  Eigen::Vector4d v(std::cos(theta), 0.0, 0.0, std::sin(theta));
  return v * v.transpose();
}

RMat werner_density(double p) { return p * bell_state_density(pi / 4) + (1.0 - p) * RMat::Identity(4, 4) / 4.0; }

std::vector<TrialDistribution> local_deterministic_vertices(const std::vector<double>& input_dist) {
  std::vector<TrialDistribution> out;
  for (int s = 0; s < 16; ++s) {
    const int a0 = s & 1, a1 = (s >> 1) & 1, b0 = (s >> 2) & 1, b1 = (s >> 3) & 1;
    std::vector<double> p(16, 0.0);
    for (int z = 0; z < 4; ++z) {
      const int a = (z & 1) ? a1 : a0;
      const int b = (z & 2) ? b1 : b0;
      p[static_cast<size_t>(z * 4 + a + 2 * b)] = input_dist[static_cast<size_t>(z)];
    }
    out.emplace_back(2, 2, std::move(p), "LD" + std::to_string(s));
  }
  return out;
}

double kl_to_local(const TrialDistribution& nu, int iters, double tol) {
  std::vector<double> mu(4);
  for (int z = 0; z < 4; ++z) mu[static_cast<size_t>(z)] = nu.input_prob(z);
  const auto verts = local_deterministic_vertices(mu);
  const int nv = static_cast<int>(verts.size());
  // Each vertex puts its conditional mass on a single outcome per input.
  std::vector<std::array<int, 4>> pick(static_cast<size_t>(nv));
  for (int v = 0; v < nv; ++v)
    for (int z = 0; z < 4; ++z)
      for (int c = 0; c < 4; ++c)
        if (verts[static_cast<size_t>(v)].prob(c, z) > 0.0) pick[static_cast<size_t>(v)][static_cast<size_t>(z)] = c;

  std::vector<double> lam(static_cast<size_t>(nv), 1.0 / nv), m(16), next(static_cast<size_t>(nv));
  auto objective = [&]() {
    std::fill(m.begin(), m.end(), 0.0);
    for (int v = 0; v < nv; ++v)
      for (int z = 0; z < 4; ++z) m[static_cast<size_t>(z * 4 + pick[static_cast<size_t>(v)][static_cast<size_t>(z)])] += lam[static_cast<size_t>(v)];
    double d = 0.0;
    for (int z = 0; z < 4; ++z)
      for (int c = 0; c < 4; ++c) {
        const double p = nu.prob(c, z);
        if (p > 0.0) d += p * std::log(nu.conditional(c, z) / m[static_cast<size_t>(z * 4 + c)]);
      }
    return d;
  };
  double prev = objective();
  for (int it = 0; it < iters; ++it) {
    for (int v = 0; v < nv; ++v) {
      double s = 0.0;
      for (int z = 0; z < 4; ++z) {
        const int c = pick[static_cast<size_t>(v)][static_cast<size_t>(z)];
        const double mm = m[static_cast<size_t>(z * 4 + c)];
        if (mm > 0.0) s += nu.prob(c, z) / mm;
      }
      next[static_cast<size_t>(v)] = lam[static_cast<size_t>(v)] * s;
    }
    double tot = 0.0;
    for (double x : next) tot += x;
    for (int v = 0; v < nv; ++v) lam[static_cast<size_t>(v)] = next[static_cast<size_t>(v)] / tot;
    const double cur = objective();
    if (std::abs(prev - cur) <= tol) {
      prev = cur;
      break;
    }
    prev = cur;
  }
  return std::max(prev, 0.0);
}

namespace {

std::vector<double> random_angles(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * pi);
  std::vector<double> a(static_cast<size_t>(n));
  for (auto& x : a) x = u(rng);
  return a;
}

// Multistart maximization of `score` over `dim` parameters.
Eigen::VectorXd multistart_max(const std::function<double(const Eigen::VectorXd&)>& score, int dim,
                               unsigned long long seed, int starts, int evals) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd best;
  double best_val = -std::numeric_limits<double>::infinity();
  auto neg = [&](const Eigen::VectorXd& x) { return -score(x); };
  for (int s = 0; s < starts; ++s) {
    const auto a = random_angles(rng, dim);
    Eigen::VectorXd x0 = Eigen::Map<const Eigen::VectorXd>(a.data(), dim);
    auto r = optim::nelder_mead(neg, x0, 0.4, evals, 1e-15);
    if (-r.value > best_val) {
      best_val = -r.value;
      best = r.x;
    }
  }
  for (int polish = 0; polish < 2; ++polish) {
    auto r = optim::nelder_mead(neg, best, 1e-3, evals, 1e-16);
    if (-r.value >= best_val) {
      best_val = -r.value;
      best = r.x;
    }
  }
  return best;
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * pi);
  if (a <= -pi) a += 2.0 * pi;
  if (a > pi) a -= 2.0 * pi;
  return a;
}

}  // namespace

FamilyMember family_member(Family family, double param, unsigned long long seed) {
  constexpr int kStarts = 20;
  FamilyMember out;
  switch (family) {
    case Family::E:
    case Family::W: {
      if (family == Family::E && !(param >= 0.0 && param <= pi / 4 + 1e-15))
        throw DomainError("family E: theta must lie in [0, pi/4]");
      if (family == Family::W && !(param > 1.0 / std::sqrt(2.0) && param <= 1.0))
        throw DomainError("family W: p must lie in (1/sqrt(2), 1]");
      out.state = family == Family::E ? bell_state_density(param) : werner_density(param);
      auto score = [&](const Eigen::VectorXd& x) {
        return chsh_value(two_station_distribution(out.state, {x(0), x(1), x(2), x(3)}));
      };
      const Eigen::VectorXd best = multistart_max(score, 4, seed, kStarts, 3000);
      out.angles = {wrap_angle(best(0)), wrap_angle(best(1)), wrap_angle(best(2)), wrap_angle(best(3))};
      out.nu = two_station_distribution(out.state, out.angles);
      break;
    }
    case Family::P: {
      if (!(param > 2.0 / 3.0 && param <= 1.0)) throw DomainError("family P: eta must lie in (2/3, 1]");
      auto params_to = [&](const Eigen::VectorXd& x) {
        return two_station_distribution(bell_state_density(x(0)), {x(1), x(2), x(3), x(4)}, param);
      };
      auto score = [&](const Eigen::VectorXd& x) { return kl_to_local(params_to(x), 600, 1e-13); };
      const Eigen::VectorXd best = multistart_max(score, 5, seed, kStarts, 800);
      out.state = bell_state_density(best(0));
      // Input swaps leave the divergence unchanged; at η = 1 so does the
      // outcome flip φ → φ + π on station A. Keep the copy that favors the
      // standard CHSH orientation.
      double best_chsh = -std::numeric_limits<double>::infinity();
      for (int t = 0; t < (param == 1.0 ? 8 : 4); ++t) {
        std::vector<double> a = {best(1), best(2), best(3), best(4)};
        if (t & 1) std::swap(a[0], a[1]);
        if (t & 2) std::swap(a[2], a[3]);
        if (t & 4) a[0] += pi, a[1] += pi;
        for (auto& x : a) x = wrap_angle(x);
        const auto nu = two_station_distribution(out.state, a, param);
        const double v = chsh_value(nu);
        if (v > best_chsh + 1e-12) {
          best_chsh = v;
          out.angles = a;
          out.nu = nu;
        }
      }
      break;
    }
  }
  out.nu.tag = family_name(family) + ":" + std::to_string(param);
  out.chsh = chsh_value(out.nu);
  return out;
}

}  // namespace qpe
