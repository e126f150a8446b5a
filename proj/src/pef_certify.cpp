#include "qpe/pef.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

namespace qpe {

namespace {

constexpr int kAxes = 5;  // φ₁, φ₂, φ₃, θ₀, θ₁
using Key = std::array<long long, kAxes>;

struct Cell {
  double bound;
  Key lower;
  int depth;
  long long id;
};

struct CellOrder {
  bool operator()(const Cell& a, const Cell& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

}  // namespace

CertificationResult certify_pef_fmax(const TrialFunction& F, const BellConfig& config, const PefCertifyOptions& opts) {
  if (config.k != 2) throw DomainError("certify_pef_fmax: only two stations are supported");
  if (opts.m_state < 2 || opts.m_theta < 2) throw DomainError("certify_pef_fmax: initial grids need m >= 2");
  if (!F.valid_factor()) throw DomainError("certify_pef_fmax: trial function must be non-negative");
  const double pi = std::numbers::pi;
  const double alpha = 1.0 + F.beta;
  const long long unit = 1LL << opts.max_depth;
  // Grid step per unit on each axis.
  const double state_step = pi / (2.0 * opts.m_state) / static_cast<double>(unit);
  const double theta_step = pi / opts.m_theta / static_cast<double>(unit);
  const std::array<long long, kAxes> extent = {opts.m_state, 2LL * opts.m_state, 4LL * opts.m_state, opts.m_theta,
                                               opts.m_theta};

  auto angles_of = [&](const Key& k) {
    std::array<double, kAxes> a{};
    for (int i = 0; i < 3; ++i) a[static_cast<size_t>(i)] = state_step * static_cast<double>(k[static_cast<size_t>(i)]);
    for (int i = 3; i < 5; ++i) a[static_cast<size_t>(i)] = theta_step * static_cast<double>(k[static_cast<size_t>(i)]);
    return a;
  };

  CertificationResult res;
  res.beta = F.beta;
  res.f_lower = 0.0;
  std::map<Key, double> values;
  auto value = [&](const Key& k) {
    auto it = values.find(k);
    if (it != values.end()) return it->second;
    const auto a = angles_of(k);
    const BellConfig cfg = config.with_angles({a[3], a[4]});
    const RVec x = s3_point(a[0], a[1], a[2]);
    const double v = q_alpha_pure(F, cfg, x);
    values.emplace(k, v);
    ++res.vertices;
    if (v > res.f_lower) {
      res.f_lower = v;
      res.witness_theta = {a[3], a[4]};
      res.witness_tau = x * x.transpose();
    }
    return v;
  };

  auto corner = [](const Key& lower, long long side, int bits) {
    Key k = lower;
    for (int i = 0; i < kAxes; ++i)
      if ((bits >> i) & 1) k[static_cast<size_t>(i)] += side;
    return k;
  };

  std::priority_queue<Cell, std::vector<Cell>, CellOrder> queue;
  long long next_id = 0;
  auto push = [&](const Key& lower, int depth, double parent) {
    const long long side = unit >> depth;
    const auto a0 = angles_of(lower);
    const auto a1 = angles_of(corner(lower, side, (1 << kAxes) - 1));
    // Overlap of the eight state corners.
    std::vector<RVec> xs;
    for (int b = 0; b < 8; ++b)
      xs.push_back(s3_point((b & 1) ? a1[0] : a0[0], (b & 2) ? a1[1] : a0[1], (b & 4) ? a1[2] : a0[2]));
    const FacetCone cone(xs);
    double bound = std::numeric_limits<double>::infinity();
    if (cone.min_overlap() > 0.0) {
      const double inflate = std::pow(cone.min_overlap(), -alpha);
      std::vector<double> theta_corner(4);
      for (int t = 0; t < 4; ++t) {
        double q = 0.0;
        for (int b = 0; b < 8; ++b) q = std::max(q, value(corner(lower, side, b | (t << 3))));
        theta_corner[static_cast<size_t>(t)] = q * inflate;
      }
      const double phi = theta_step * static_cast<double>(side);
      bound = region_upper_bound(theta_corner, {phi, phi}, alpha);
    }
    bound = std::min(bound, parent);
    queue.push(Cell{bound, lower, depth, next_id++});
    ++res.regions;
  };

  {
    Key idx{};
    long long total = 1;
    for (auto e : extent) total *= e;
    for (long long n = 0; n < total; ++n) {
      long long r = n;
      for (int i = 0; i < kAxes; ++i) {
        idx[static_cast<size_t>(i)] = (r % extent[static_cast<size_t>(i)]) * unit;
        r /= extent[static_cast<size_t>(i)];
      }
      push(idx, 0, std::numeric_limits<double>::infinity());
    }
  }

  while (true) {
    const double up = queue.top().bound + opts.slack;
    if (up - res.f_lower <= opts.gap_target) break;
    const Cell top = queue.top();
    if (res.regions >= opts.budget || top.depth >= opts.max_depth) {
      res.gap_flag = true;
      break;
    }
    queue.pop();
    const long long half = (unit >> top.depth) / 2;
    for (int b = 0; b < (1 << kAxes); ++b) push(corner(top.lower, half, b), top.depth + 1, top.bound);
  }
  res.f_upper = std::max(queue.top().bound + opts.slack, res.f_lower);
  return res;
}

}  // namespace qpe
