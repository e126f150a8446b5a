#include "qpe/inner_max.hpp"

#include "qpe/optim.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace qpe {

namespace {

const double kCollapse = std::sqrt(std::numeric_limits<double>::epsilon());

struct Eig {
  RVec values;  // ascending, clipped at 0
  RMat vectors;
};

Eig eig_sym(const RMat& m) {
  Eigen::SelfAdjointEigenSolver<RMat> es(0.5 * (m + m.transpose()));
  Eig out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.values(i) = std::max(out.values(i), 0.0);
  return out;
}

// Merges eigenvalues whose 1/α-th powers differ by at most sqrt(machine ε),
// then renormalizes to unit trace.
void collapse(RVec& lam, double alpha) {
  const Eigen::Index n = lam.size();
  Eigen::Index start = 0;
  while (start < n) {
    const double s0 = std::pow(lam(start), 1.0 / alpha);
    Eigen::Index end = start + 1;
    while (end < n && std::pow(lam(end), 1.0 / alpha) - s0 <= kCollapse) ++end;
    if (end - start > 1) {
      const double mean = lam.segment(start, end - start).mean();
      lam.segment(start, end - start).setConstant(mean);
    }
    start = end;
  }
  const double tr = lam.sum();
  if (tr > 0.0) lam /= tr;
}

}  // namespace

ConcaveProblem::ConcaveProblem(double alpha, std::vector<RVec> vectors, std::vector<double> weights)
    : alpha_(alpha), dim_(0), vecs_(), w_() {
  if (!(alpha > 1.0)) throw DomainError("ConcaveProblem: alpha must exceed 1");
  if (vectors.size() != weights.size()) throw DomainError("ConcaveProblem: size mismatch");
  if (vectors.empty()) throw DomainError("ConcaveProblem: no terms");
  dim_ = static_cast<int>(vectors.front().size());
  for (size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != dim_) throw DomainError("ConcaveProblem: vector dimension mismatch");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) throw DomainError("ConcaveProblem: bad weight");
    if (weights[i] == 0.0) continue;
    vecs_.push_back(vectors[i]);
    w_.push_back(weights[i]);
  }
}

ConcaveProblem ConcaveProblem::from_trial_function(const TrialFunction& F, const BellConfig& config) {
  if (F.num_c() != config.num_values() || F.num_z() != config.num_values() || F.has_t)
    throw DomainError("inner_max_tau: trial function does not match the configuration");
  if (!F.valid_factor()) throw DomainError("inner_max_tau: trial function must be non-negative");
  std::vector<RVec> vs;
  std::vector<double> ws;
  for (int z = 0; z < F.num_z(); ++z)
    for (int c = 0; c < F.num_c(); ++c) {
      vs.push_back(povm_tensor_vector(config, c, z));
      ws.push_back(config.input_dist[static_cast<size_t>(z)] * F(c, z));
    }
  return ConcaveProblem(1.0 + F.beta, std::move(vs), std::move(ws));
}

double ConcaveProblem::value(const RMat& tau) const {
  const Eig e = eig_sym(tau);
  RVec s(e.values.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s(i) = std::pow(e.values(i), 1.0 / alpha_);
  double acc = 0.0;
  for (size_t i = 0; i < vecs_.size(); ++i) {
    const RVec y = e.vectors.transpose() * vecs_[i];
    const double t = s.dot(y.cwiseAbs2());
    acc += w_[i] * std::pow(std::max(t, 0.0), alpha_);
  }
  return acc;
}

double ConcaveProblem::value_and_gradient(const RMat& tau, RMat& grad, RMat* collapsed) const {
  Eig e = eig_sym(tau);
  collapse(e.values, alpha_);
  const Eigen::Index n = e.values.size();
  const double beta = alpha_ - 1.0;
  RVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s(i) = std::pow(e.values(i), 1.0 / alpha_);

  RMat d(n, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) {
      const double lk = e.values(k), ll = e.values(l);
      if (lk == ll)
        d(k, l) = lk > 0.0 ? std::pow(lk, -beta / alpha_) / alpha_ : std::numeric_limits<double>::infinity();
      else
        d(k, l) = (s(k) - s(l)) / (lk - ll);
    }

  RMat m = RMat::Zero(n, n);
  double g = 0.0;
  for (size_t i = 0; i < vecs_.size(); ++i) {
    const RVec y = e.vectors.transpose() * vecs_[i];
    const double t = std::max(s.dot(y.cwiseAbs2()), 0.0);
    g += w_[i] * std::pow(t, alpha_);
    m.noalias() += (w_[i] * alpha_ * std::pow(t, beta)) * (y * y.transpose());
  }
  const RMat gp = d.cwiseProduct(m);
  grad = e.vectors * gp * e.vectors.transpose();
  grad = 0.5 * (grad + grad.transpose());
  if (collapsed) *collapsed = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
  return g;
}

ConcaveProblem ConcaveProblem::restricted(const RMat& basis) const {
  std::vector<RVec> vs;
  std::vector<double> ws;
  for (size_t i = 0; i < vecs_.size(); ++i) {
    RVec y = basis.transpose() * vecs_[i];
    if (y.squaredNorm() == 0.0) continue;
    vs.push_back(std::move(y));
    ws.push_back(w_[i]);
  }
  if (vs.empty()) {
    vs.push_back(RVec::Zero(basis.cols()));
    ws.push_back(0.0);
  }
  return ConcaveProblem(alpha_, std::move(vs), std::move(ws));
}

std::vector<RMat> invariant_blocks(const ConcaveProblem& p, unsigned long long seed) {
  const int n = p.dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  RMat a = RMat::Zero(n, n);
  for (const auto& v : p.vectors()) a.noalias() += u(rng) * (v * v.transpose());
  Eigen::SelfAdjointEigenSolver<RMat> es(a);
  const RMat basis = es.eigenvectors();

  // Entries of each term in the eigenbasis; edges where any is non-negligible.
  std::vector<RVec> ys;
  double scale = 0.0;
  for (const auto& v : p.vectors()) {
    ys.push_back(basis.transpose() * v);
    scale = std::max(scale, ys.back().cwiseAbs2().maxCoeff());
  }
  const double thr = 1e-10 * std::max(scale, 1e-300);
  std::vector<int> parent(static_cast<size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[static_cast<size_t>(x)] == x ? x : parent[static_cast<size_t>(x)] = find(parent[static_cast<size_t>(x)]); };
  std::vector<bool> active(static_cast<size_t>(n), false);
  for (const auto& y : ys)
    for (int j = 0; j < n; ++j) {
      if (y(j) * y(j) <= thr) continue;
      active[static_cast<size_t>(j)] = true;
      for (int l = j + 1; l < n; ++l)
        if (std::abs(y(j) * y(l)) > thr) parent[static_cast<size_t>(find(j))] = find(l);
    }
  std::vector<std::vector<int>> groups(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j)
    if (active[static_cast<size_t>(j)]) groups[static_cast<size_t>(find(j))].push_back(j);
  std::vector<RMat> out;
  for (const auto& g : groups) {
    if (g.empty()) continue;
    RMat b(n, static_cast<Eigen::Index>(g.size()));
    for (size_t i = 0; i < g.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = basis.col(g[i]);
    out.push_back(std::move(b));
  }
  return out;
}

namespace {

// Quasi-Newton ascent on τ = AAᵀ / tr(AAᵀ). Uses ∇_A = (2/t)(∇g(τ) − g(τ)I)A,
// valid because g is positively homogeneous of degree one. Tracks the best
// value and the smallest λ1(∇g) seen; returns the best iterate.
RMat quasi_newton_phase(const ConcaveProblem& p, const RMat& tau0, const InnerMaxOptions& opts, double& best_val,
                        double& best_ub, int& iters) {
  const int n = p.dim();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  Eigen::SelfAdjointEigenSolver<RMat> es0(tau0);
  RMat a = es0.eigenvectors() * es0.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
           es0.eigenvectors().transpose();
  RMat best_tau = tau0;

  // Negated objective and gradient in A; also reports λ1(∇g) and the collapsed τ.
  auto eval = [&](const RMat& am, RVec& grad, double& lam1, RMat& tau_c) {
    const double t = (am * am.transpose()).trace();
    RMat g_op;
    const double g = p.value_and_gradient(am * am.transpose() / t, g_op, &tau_c);
    Eigen::SelfAdjointEigenSolver<RMat> es(g_op, Eigen::EigenvaluesOnly);
    lam1 = es.eigenvalues()(n - 1);
    const RMat ga = (2.0 / t) * (g_op - g * RMat::Identity(n, n)) * am;
    grad = -Eigen::Map<const RVec>(ga.data(), nn);
    return -g;
  };

  RVec x = Eigen::Map<const RVec>(a.data(), nn);
  RVec gx;
  double lam1 = 0.0;
  RMat tau_c;
  auto record = [&](double fval) {
    const double g = -fval;
    if (opts.observer) opts.observer(g, lam1);
    if (std::isfinite(lam1)) best_ub = std::min(best_ub, lam1);
    if (g > best_val) {
      best_val = g;
      best_tau = tau_c;
    }
    ++iters;
  };
  double fx = eval(Eigen::Map<const RMat>(x.data(), n, n), gx, lam1, tau_c);
  record(fx);
  if (!std::isfinite(fx) || !gx.allFinite()) return best_tau;

  const int mem = 8;
  std::vector<RVec> ss, ys;
  std::vector<double> rhos;
  const int cap = std::min(opts.max_iters, 400);
  for (int it = 0; it < cap; ++it) {
    if (best_ub - best_val <= opts.tol) break;
    // Two-loop recursion.
    RVec q = gx;
    std::vector<double> al(ss.size());
    for (int i = static_cast<int>(ss.size()) - 1; i >= 0; --i) {
      al[static_cast<size_t>(i)] = rhos[static_cast<size_t>(i)] * ss[static_cast<size_t>(i)].dot(q);
      q -= al[static_cast<size_t>(i)] * ys[static_cast<size_t>(i)];
    }
    if (!ss.empty()) q *= ss.back().dot(ys.back()) / ys.back().squaredNorm();
    else q *= 0.1 * x.norm() / std::max(gx.norm(), 1e-300);
    for (size_t i = 0; i < ss.size(); ++i) {
      const double b = rhos[i] * ys[i].dot(q);
      q += (al[i] - b) * ss[i];
    }
    RVec d = -q;
    double slope = gx.dot(d);
    if (!(slope < 0.0)) {
      ss.clear();
      ys.clear();
      rhos.clear();
      d = -gx * (0.1 * x.norm() / std::max(gx.norm(), 1e-300));
      slope = gx.dot(d);
      if (!(slope < 0.0)) break;
    }
    // Backtracking Armijo search.
    double step = 1.0;
    RVec xn, gn;
    double fn = 0.0, lam_n = 0.0;
    RMat tau_n;
    bool ok = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * d;
      fn = eval(Eigen::Map<const RMat>(xn.data(), n, n), gn, lam_n, tau_n);
      if (!std::isfinite(fn) || !gn.allFinite()) {
        step *= 0.5;
        continue;
      }
      // Value differences at rounding level: fall back to gradient decrease.
      const bool flat = std::abs(fn - fx) <= 1e-14 * std::max(1.0, std::abs(fx));
      if (fn <= fx + 1e-4 * step * slope || (flat && gn.norm() < gx.norm())) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok) break;
    const RVec s = xn - x, y = gn - gx;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (static_cast<int>(ss.size()) == mem) {
        ss.erase(ss.begin());
        ys.erase(ys.begin());
        rhos.erase(rhos.begin());
      }
      ss.push_back(s);
      ys.push_back(y);
      rhos.push_back(1.0 / sy);
    }
    // Keep A well scaled; the objective is invariant under A → cA.
    const double nx = xn.norm();
    x = xn / nx;
    gx = gn * nx;
    for (auto& v : ss) v /= nx;
    for (auto& v : ys) v *= nx;
    fx = fn;
    lam1 = lam_n;
    tau_c = tau_n;
    record(fx);
  }
  return best_tau;
}

InnerMaxResult maximize_block(const ConcaveProblem& p, const InnerMaxOptions& opts, const RMat* warm) {
  const int n = p.dim();
  InnerMaxResult res;
  if (n == 1) {
    RMat tau = RMat::Ones(1, 1);
    res.value = p.value(tau);
    res.upper_bound = res.value;
    res.tau = tau;
    res.converged = true;
    return res;
  }
  RMat tau = RMat::Identity(n, n) / n;
  if (warm) {
    const double tr = warm->trace();
    if (tr > 0.0) tau = 0.999 * (*warm / tr) + 0.001 * RMat::Identity(n, n) / n;
  }
  RMat grad, collapsed;
  double best_ub = std::numeric_limits<double>::infinity();
  double best_val = -1.0;
  int qn_iters = 0;
  tau = quasi_newton_phase(p, tau, opts, best_val, best_ub, qn_iters);
  RMat best_tau = tau;
  res.iterations = qn_iters;
  if (best_ub - best_val <= opts.tol) {
    res.value = best_val;
    res.tau = best_tau;
    res.upper_bound = std::max(best_ub, best_val);
    res.converged = true;
    return res;
  }
  for (int it = 0; it < opts.max_iters; ++it) {
    const double g = p.value_and_gradient(tau, grad, &collapsed);
    tau = collapsed;
    Eigen::SelfAdjointEigenSolver<RMat> es(grad);
    const double lam1 = es.eigenvalues()(n - 1);
    if (opts.observer) opts.observer(g, lam1);
    if (g > best_val) {
      best_val = g;
      best_tau = tau;
    }
    best_ub = std::min(best_ub, lam1);
    res.iterations = qn_iters + it + 1;
    if (best_ub - best_val <= opts.tol) {
      res.converged = true;
      break;
    }
    // Direction: normalized projector onto the top eigenspace of the gradient.
    RMat delta = RMat::Zero(n, n);
    int mult = 0;
    for (int j = n - 1; j >= 0; --j) {
      if (lam1 - es.eigenvalues()(j) > 1e-12 * std::max(std::abs(lam1), 1.0)) break;
      delta.noalias() += es.eigenvectors().col(j) * es.eigenvectors().col(j).transpose();
      ++mult;
    }
    delta /= mult;
    auto h = [&](double eps) { return p.value((1.0 - eps) * tau + eps * delta); };
    const double eps = optim::golden_section_max(h, 0.0, 1.0, opts.line_search_iters);
    const double hv = h(eps);
    if (!(hv > g)) break;
    tau = (1.0 - eps) * tau + eps * delta;
  }
  res.value = best_val;
  res.tau = best_tau;
  res.upper_bound = std::max(best_ub, best_val);
  return res;
}

}  // namespace

InnerMaxResult inner_max_tau(const ConcaveProblem& p, const InnerMaxOptions& opts) {
  const auto blocks = invariant_blocks(p);
  InnerMaxResult best;
  best.tau = RMat::Identity(p.dim(), p.dim()) / p.dim();
  best.value = p.weights().empty() ? 0.0 : -1.0;
  best.converged = true;
  best.blocks = static_cast<int>(blocks.size());
  if (blocks.empty()) return best;
  double ub = 0.0;
  bool all_converged = true;
  int iters = 0;
  for (const auto& b : blocks) {
    const ConcaveProblem sub = p.restricted(b);
    RMat warm;
    const RMat* wp = nullptr;
    if (opts.warm_start) {
      warm = b.transpose() * (*opts.warm_start) * b;
      if (warm.trace() > 1e-9) wp = &warm;
    }
    const InnerMaxResult r = maximize_block(sub, opts, wp);
    ub = std::max(ub, r.upper_bound);
    all_converged = all_converged && r.converged;
    iters += r.iterations;
    if (r.value > best.value) {
      best.value = r.value;
      best.tau = b * r.tau * b.transpose();
    }
  }
  best.upper_bound = ub;
  best.converged = all_converged;
  best.iterations = iters;
  return best;
}

InnerMaxResult inner_max_tau(const TrialFunction& F, const BellConfig& config, const InnerMaxOptions& opts) {
  return inner_max_tau(ConcaveProblem::from_trial_function(F, config), opts);
}

}  // namespace qpe
