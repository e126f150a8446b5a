#include "qpe/certify.hpp"

#include "qpe/interval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <map>
#include <numbers>
#include <queue>

namespace qpe {

double region_upper_bound(const std::vector<double>& corner_values, const std::vector<double>& sides,
                          double alpha) {
  const RenyiOrder ord(alpha);
  std::vector<double> v = corner_values;
  const size_t k = sides.size();
  if (v.size() != (size_t{1} << k)) throw DomainError("region_upper_bound: corner count mismatch");
  for (size_t l = 0; l < k; ++l) {
    // Remaining corners are indexed by the bits of axes l..k-1; axis l is bit 0.
    std::vector<double> next(v.size() / 2);
    for (size_t j = 0; j < next.size(); ++j) next[j] = interval_bound(v[2 * j], v[2 * j + 1], sides[l], ord);
    v = std::move(next);
  }
  return v.front();
}

namespace {

using Key = std::vector<long long>;

struct Vertex {
  double value;
  double upper;
  RMat tau;
};

struct Region {
  double bound;
  Key lower;
  int depth;
  long long id;
};

struct RegionOrder {
  bool operator()(const Region& a, const Region& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;  // earlier (smaller) id first among ties
  }
};

}  // namespace

CertificationResult certify_fmax(const TrialFunction& F, const BellConfig& config, const CertifyOptions& opts) {
  const int k = config.k;
  if (k < 1 || k > 3) throw DomainError("certify_fmax: k must be in 1..3");
  if (opts.m < 2) throw DomainError("certify_fmax: initial grid needs m >= 2");
  if (!(opts.gap_target > 0.0)) throw DomainError("certify_fmax: gap_target must be positive");
  const double alpha = 1.0 + F.beta;
  const long long unit = 1LL << opts.max_depth;  // grid units per initial interval
  const long long full = unit * opts.m;          // grid units for [0, π]
  const double pi = std::numbers::pi;
  auto angle = [&](long long i) { return pi * static_cast<double>(i) / static_cast<double>(full); };

  InnerMaxOptions inner;
  inner.tol = opts.inner_tol > 0.0 ? opts.inner_tol : opts.gap_target / 100.0;

  std::map<Key, Vertex> verts;
  CertificationResult res;
  res.beta = F.beta;
  res.f_lower = -1.0;

  auto evaluate = [&](const Key& key, const RMat* warm) {
    std::vector<double> th(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) th[static_cast<size_t>(i)] = angle(key[static_cast<size_t>(i)]);
    InnerMaxOptions o = inner;
    o.warm_start = warm;
    const auto r = inner_max_tau(F, config.with_angles(th), o);
    return Vertex{r.value, r.upper_bound, r.tau};
  };

  // Evaluates missing vertices (in parallel when requested) and merges them in
  // key order, so results do not depend on the worker count.
  auto evaluate_batch = [&](const std::vector<std::pair<Key, const RMat*>>& todo) {
    std::vector<Vertex> out(todo.size());
    const int workers = std::max(1, opts.threads);
    if (workers == 1 || todo.size() < 2) {
      for (size_t i = 0; i < todo.size(); ++i) out[i] = evaluate(todo[i].first, todo[i].second);
    } else {
      std::vector<std::future<void>> fs;
      for (int w = 0; w < workers; ++w)
        fs.push_back(std::async(std::launch::async, [&, w] {
          for (size_t i = static_cast<size_t>(w); i < todo.size(); i += static_cast<size_t>(workers))
            out[i] = evaluate(todo[i].first, todo[i].second);
        }));
      for (auto& f : fs) f.get();
    }
    for (size_t i = 0; i < todo.size(); ++i) {
      const auto& v = out[i];
      if (v.value > res.f_lower) {
        res.f_lower = v.value;
        res.witness_tau = v.tau;
        res.witness_theta.clear();
        for (int a = 0; a < k; ++a) res.witness_theta.push_back(angle(todo[i].first[static_cast<size_t>(a)]));
      }
      verts.emplace(todo[i].first, v);
    }
    res.vertices += static_cast<long long>(todo.size());
  };

  auto corner_key = [&](const Key& lower, long long side, int corner) {
    Key key = lower;
    for (int a = 0; a < k; ++a)
      if ((corner >> a) & 1) key[static_cast<size_t>(a)] += side;
    return key;
  };

  std::priority_queue<Region, std::vector<Region>, RegionOrder> queue;
  long long next_id = 0;
  auto push_region = [&](const Key& lower, int depth, double parent_bound) {
    const long long side = unit >> depth;
    std::vector<double> cv(static_cast<size_t>(1 << k));
    for (int c = 0; c < (1 << k); ++c) cv[static_cast<size_t>(c)] = verts.at(corner_key(lower, side, c)).upper;
    const double phi = pi * static_cast<double>(side) / static_cast<double>(full);
    const std::vector<double> sides(static_cast<size_t>(k), phi);
    const double b = std::min(region_upper_bound(cv, sides, alpha), parent_bound);
    if (opts.region_observer) {
      std::vector<double> lo(static_cast<size_t>(k));
      for (int a = 0; a < k; ++a) lo[static_cast<size_t>(a)] = angle(lower[static_cast<size_t>(a)]);
      opts.region_observer(lo, sides, b);
    }
    queue.push(Region{b, lower, depth, next_id++});
    ++res.regions;
  };

  // Initial grid.
  {
    std::vector<std::pair<Key, const RMat*>> todo;
    Key idx(static_cast<size_t>(k), 0);
    const long long pts = opts.m + 1;
    long long total = 1;
    for (int a = 0; a < k; ++a) total *= pts;
    for (long long n = 0; n < total; ++n) {
      long long r = n;
      for (int a = 0; a < k; ++a) {
        idx[static_cast<size_t>(a)] = (r % pts) * unit;
        r /= pts;
      }
      todo.emplace_back(idx, nullptr);
    }
    evaluate_batch(todo);
    total = 1;
    for (int a = 0; a < k; ++a) total *= opts.m;
    for (long long n = 0; n < total; ++n) {
      long long r = n;
      for (int a = 0; a < k; ++a) {
        idx[static_cast<size_t>(a)] = (r % opts.m) * unit;
        r /= opts.m;
      }
      push_region(idx, 0, std::numeric_limits<double>::infinity());
    }
  }

  auto current_upper = [&] { return queue.top().bound + opts.slack; };
  while (true) {
    const double up = current_upper();
    if (opts.record_trace) res.upper_trace.push_back(up);
    if (up - res.f_lower <= opts.gap_target) break;
    if (res.regions >= opts.budget) {
      res.gap_flag = true;
      break;
    }
    const Region top = queue.top();
    if (top.depth >= opts.max_depth) {
      res.gap_flag = true;
      break;
    }
    queue.pop();
    const int depth = top.depth + 1;
    const long long side = unit >> depth;
    // New vertices of the 3^k refined grid, warm-started from the nearest
    // parent corner.
    std::vector<std::pair<Key, const RMat*>> todo;
    long long n3 = 1;
    for (int a = 0; a < k; ++a) n3 *= 3;
    for (long long n = 0; n < n3; ++n) {
      Key key = top.lower;
      int parent_corner = 0;
      long long r = n;
      for (int a = 0; a < k; ++a) {
        const long long d = r % 3;
        r /= 3;
        key[static_cast<size_t>(a)] += d * side;
        if (d == 2) parent_corner |= 1 << a;
      }
      if (verts.count(key)) continue;
      const Key pk = corner_key(top.lower, 2 * side, parent_corner);
      todo.emplace_back(key, &verts.at(pk).tau);
    }
    evaluate_batch(todo);
    for (int c = 0; c < (1 << k); ++c) push_region(corner_key(top.lower, side, c), depth, top.bound);
  }
  res.f_upper = std::max(current_upper(), res.f_lower);
  return res;
}

}  // namespace qpe
