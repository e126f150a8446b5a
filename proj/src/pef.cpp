#include "qpe/pef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace qpe {

namespace {

int pr_sign(int i, int x, int y) {
  const int u = i & 1, v = (i >> 1) & 1, w = (i >> 2) & 1;
  return ((x & y) ^ (u & x) ^ (v & y) ^ w) ? -1 : 1;
}

}  // namespace

std::vector<TrialDistribution> pr_boxes(const std::vector<double>& input_dist) {
  if (input_dist.size() != 4) throw DomainError("pr_boxes: two stations required");
  std::vector<TrialDistribution> out;
  for (int i = 0; i < 8; ++i) {
    std::vector<double> p(16, 0.0);
    for (int z = 0; z < 4; ++z) {
      const int x = z & 1, y = (z >> 1) & 1;
      const int parity = pr_sign(i, x, y) > 0 ? 0 : 1;  // required a ⊕ b
      for (int c = 0; c < 4; ++c) {
        const int a = c & 1, b = (c >> 1) & 1;
        if ((a ^ b) == parity) p[static_cast<size_t>(z * 4 + c)] = 0.5 * input_dist[static_cast<size_t>(z)];
      }
    }
    out.emplace_back(2, 2, std::move(p), "PR" + std::to_string(i));
  }
  return out;
}

double chsh_variant(const TrialDistribution& nu, int i) {
  if (nu.c_bits != 2 || nu.z_bits != 2) throw DomainError("chsh_variant: two stations required");
  double s = 0.0;
  for (int z = 0; z < 4; ++z) {
    const int x = z & 1, y = (z >> 1) & 1;
    double e = 0.0;
    for (int c = 0; c < 4; ++c) {
      const int a = c & 1, b = (c >> 1) & 1;
      e += (a == b ? 1.0 : -1.0) * nu.conditional(c, z);
    }
    s += pr_sign(i, x, y) * e;
  }
  return s;
}

std::vector<TrialDistribution> tsirelson_cut_vertices(const std::vector<double>& input_dist) {
  auto out = local_deterministic_vertices(input_dist);
  const auto prs = pr_boxes(input_dist);
  std::vector<TrialDistribution> extreme = out;
  extreme.insert(extreme.end(), prs.begin(), prs.end());
  const double cut = 2.0 * std::numbers::sqrt2;
  for (int i = 0; i < 8; ++i) {
    const auto& pr = prs[static_cast<size_t>(i)];
    for (const auto& v : extreme) {
      if (&v == &extreme[16 + static_cast<size_t>(i)]) continue;
      const double sv = chsh_variant(v, i);
      if (sv >= cut) continue;
      const double t = (cut - sv) / (4.0 - sv);
      std::vector<double> p(16);
      for (size_t j = 0; j < 16; ++j) p[j] = (1.0 - t) * v.probs[j] + t * pr.probs[j];
      out.emplace_back(2, 2, std::move(p), pr.tag + "|" + v.tag);
    }
  }
  return out;
}

namespace {

std::vector<std::vector<double>> vertex_weights(const std::vector<TrialDistribution>& vertices, int nc, int nz,
                                                double alpha) {
  std::vector<std::vector<double>> a;
  for (const auto& v : vertices) {
    if (v.num_c() != nc || v.num_z() != nz) throw DomainError("pef: vertex shape mismatch");
    std::vector<double> row(static_cast<size_t>(nc * nz));
    for (int z = 0; z < nz; ++z)
      for (int c = 0; c < nc; ++c) {
        const double cond = v.conditional(c, z);
        row[static_cast<size_t>(z * nc + c)] = v.input_prob(z) * (cond > 0.0 ? std::pow(cond, alpha) : 0.0);
      }
    a.push_back(std::move(row));
  }
  return a;
}

}  // namespace

PefResult optimize_pef_polytope(const TrialDistribution& nu, double beta, const std::vector<TrialDistribution>& vertices,
                                const PefOptions& opts) {
  if (!(beta > 0.0)) throw DomainError("optimize_pef_polytope: beta must be positive");
  if (vertices.empty()) throw DomainError("optimize_pef_polytope: no vertices");
  nu.validate(1e-9);
  const int nc = nu.num_c(), nz = nu.num_z();
  const auto rows = vertex_weights(vertices, nc, nz, 1.0 + beta);
  const int nv = static_cast<int>(rows.size());

  // Entries with ν = 0 get F = 0; the rest are the free variables.
  std::vector<int> live;
  for (int j = 0; j < nc * nz; ++j)
    if (nu.probs[static_cast<size_t>(j)] > 0.0) live.push_back(j);
  const int n = static_cast<int>(live.size());
  Eigen::MatrixXd a(nv, n);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) {
    p(i) = nu.probs[static_cast<size_t>(live[static_cast<size_t>(i)])];
    for (int v = 0; v < nv; ++v) a(v, i) = rows[static_cast<size_t>(v)][static_cast<size_t>(live[static_cast<size_t>(i)])];
    if (!(a.col(i).maxCoeff() > 0.0))
      throw DomainError("optimize_pef_polytope: distribution outside the vertex support");
  }
  const double plogp = (p.array() * p.array().log()).sum();

  // Certificates. Primal: F scaled to meet the largest constraint with
  // equality. Dual: Σ p log(p / Aᵀλ) for λ on the simplex.
  Eigen::VectorXd best_f;
  double best_primal = -std::numeric_limits<double>::infinity();
  double best_dual = std::numeric_limits<double>::infinity();
  auto offer_primal = [&](const Eigen::VectorXd& f) {
    const double scale = (a * f).maxCoeff();
    if (!(scale > 0.0) || !(f.minCoeff() > 0.0)) return;
    const double val = (p.array() * f.array().log()).sum() - std::log(scale);
    if (val > best_primal) {
      best_primal = val;
      best_f = f / scale;
    }
  };
  auto offer_dual = [&](const Eigen::VectorXd& lam) {
    const Eigen::VectorXd m = a.transpose() * lam;
    if (!(m.minCoeff() > 0.0)) return;
    best_dual = std::min(best_dual, plogp - (p.array() * m.array().log()).sum());
  };
  auto done = [&] { return (best_dual - best_primal) / beta <= opts.rate_tol; };

  // Log-barrier Newton on t Σ p log F + Σ_v log(1 − a_v·F). Slacks are
  // updated incrementally and barrier differences use log1p, so progress is
  // resolved well below the size of the barrier value itself.
  Eigen::VectorXd f = Eigen::VectorXd::Constant(n, 0.5 / a.rowwise().sum().maxCoeff());
  Eigen::VectorXd sl = Eigen::VectorXd::Ones(nv) - a * f;
  Eigen::VectorXd lam = Eigen::VectorXd::Constant(nv, 1.0 / nv);
  int it = 0;
  for (double t = 1.0; t < 1e20 && !done() && it < opts.max_iters; t *= 8.0) {
    bool centered = false;
    for (int k = 0; k < 100 && it < opts.max_iters; ++k, ++it) {
      const Eigen::VectorXd inv_s = sl.cwiseInverse();
      const Eigen::VectorXd g = t * p.cwiseQuotient(f) - a.transpose() * inv_s;
      // The Hessian is BᵀB with B = [S⁻¹A; diag(√(tp)/F)] and g = Bᵀr; solving
      // the least-squares problem avoids squaring B's condition number.
      Eigen::MatrixXd b(nv + n, n);
      b.topRows(nv) = inv_s.asDiagonal() * a;
      b.bottomRows(n) = (t * p).cwiseSqrt().cwiseQuotient(f).asDiagonal();
      Eigen::VectorXd r(nv + n);
      r.head(nv).setConstant(-1.0);
      r.tail(n) = (t * p).cwiseSqrt();
      const Eigen::VectorXd d = b.colPivHouseholderQr().solve(r);
      const double dec = g.dot(d);
      if (!std::isfinite(dec)) break;
      if (dec <= 1e-8) {
        centered = true;
        break;
      }
      const Eigen::VectorXd ad = a * d;
      const Eigen::VectorXd rel_f = d.cwiseQuotient(f), rel_s = ad.cwiseQuotient(sl);
      double step = 1.0;
      for (int i = 0; i < n; ++i)
        if (rel_f(i) < 0.0) step = std::min(step, -0.99 / rel_f(i));
      for (int v = 0; v < nv; ++v)
        if (rel_s(v) > 0.0) step = std::min(step, 0.99 / rel_s(v));
      auto gain = [&](double h) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += t * p(i) * std::log1p(h * rel_f(i));
        for (int v = 0; v < nv; ++v) acc += std::log1p(-h * rel_s(v));
        return acc;
      };
      bool moved = false;
      for (int ls = 0; ls < 50; ++ls, step *= 0.5) {
        if (gain(step) >= 0.25 * step * dec) {
          f += step * d;
          sl -= step * ad;
          moved = true;
          break;
        }
      }
      if (!moved) {
        centered = true;  // at the resolution limit
        break;
      }
    }
    if (sl.minCoeff() > 0.0) {
      lam = sl.cwiseInverse() / sl.cwiseInverse().sum();
      offer_dual(lam);
    }
    offer_primal(f);
    if (!centered) break;
  }

  // Multiplicative dual updates from the barrier's multipliers close any
  // remaining gap.
  for (; it < opts.max_iters && !done(); ++it) {
    const Eigen::VectorXd m = a.transpose() * lam;
    const Eigen::VectorXd ratio = p.cwiseQuotient(m);
    offer_dual(lam);
    offer_primal(ratio);
    lam = lam.cwiseProduct(a * ratio);
    lam /= lam.sum();
  }

  PefResult res;
  std::vector<double> vals(static_cast<size_t>(nc * nz), 0.0);
  for (int i = 0; i < n; ++i) vals[static_cast<size_t>(live[static_cast<size_t>(i)])] = best_f(i);
  res.F = TrialFunction(nu.c_bits, nu.z_bits, beta, std::move(vals), TrialRole::pef);
  res.rate = best_primal / beta;
  res.rate_bits = res.rate * std::numbers::log2e;
  res.gap = std::max(0.0, best_dual - best_primal) / beta;
  res.iterations = it;
  return res;
}

PefResult optimize_pef_polytope(const TrialDistribution& nu, double beta, const PefOptions& opts) {
  std::vector<double> mu(static_cast<size_t>(nu.num_z()));
  for (int z = 0; z < nu.num_z(); ++z) mu[static_cast<size_t>(z)] = nu.input_prob(z);
  return optimize_pef_polytope(nu, beta, tsirelson_cut_vertices(mu), opts);
}

double pef_polytope_max(const TrialFunction& F, const std::vector<TrialDistribution>& vertices) {
  const auto a = vertex_weights(vertices, F.num_c(), F.num_z(), 1.0 + F.beta);
  double best = 0.0;
  for (const auto& row : a) {
    double t = 0.0;
    for (int z = 0; z < F.num_z(); ++z)
      for (int c = 0; c < F.num_c(); ++c) t += row[static_cast<size_t>(z * F.num_c() + c)] * F(c, z);
    best = std::max(best, t);
  }
  return best;
}

double q_alpha_pure(const TrialFunction& F, const BellConfig& config, const RVec& y) {
  if (F.num_c() != config.num_values() || F.num_z() != config.num_values())
    throw DomainError("q_alpha_pure: trial function does not match the configuration");
  if (y.size() != config.dim()) throw DomainError("q_alpha_pure: state dimension mismatch");
  const double alpha = 1.0 + F.beta;
  double acc = 0.0;
  for (int z = 0; z < F.num_z(); ++z) {
    const double mu = config.input_dist[static_cast<size_t>(z)];
    if (mu == 0.0) continue;
    for (int c = 0; c < F.num_c(); ++c) {
      const double f = F(c, z);
      if (f == 0.0) continue;
      const double o = povm_tensor_vector(config, c, z).dot(y);
      acc += mu * f * std::pow(o * o, alpha);
    }
  }
  return acc;
}

FacetCone::FacetCone(std::vector<RVec> v) : vertices(std::move(v)) {
  if (vertices.empty()) throw DomainError("FacetCone: no vertices");
  double mn = 1.0;
  for (size_t i = 0; i < vertices.size(); ++i)
    for (size_t j = i + 1; j < vertices.size(); ++j) mn = std::min(mn, vertices[i].dot(vertices[j]));
  eps = std::max(0.0, 1.0 - mn);
}

double facet_bound(const TrialFunction& F, const BellConfig& config, const FacetCone& facet) {
  if (!(facet.min_overlap() > 0.0)) throw DomainError("facet_bound: cone vertices must overlap positively");
  double q = 0.0;
  for (const auto& x : facet.vertices) q = std::max(q, q_alpha_pure(F, config, x));
  return q / std::pow(facet.min_overlap(), 1.0 + F.beta);
}

RMat cone_witness(const FacetCone& facet, const std::vector<double>& lambda, RVec* y_out) {
  if (lambda.size() != facet.vertices.size()) throw DomainError("cone_witness: weight count mismatch");
  const Eigen::Index d = facet.vertices.front().size();
  RVec y = RVec::Zero(d);
  for (size_t i = 0; i < lambda.size(); ++i) y += lambda[i] * facet.vertices[i];
  const double norm = y.norm();
  if (!(norm > 0.0)) throw DomainError("cone_witness: degenerate combination");
  y /= norm;
  RMat rho = RMat::Zero(d, d);
  for (size_t i = 0; i < lambda.size(); ++i) {
    const RVec& x = facet.vertices[i];
    rho += (lambda[i] / norm) * (x * x.transpose()) / x.dot(y);
  }
  if (y_out) *y_out = y;
  return rho;
}

RVec s3_point(double phi1, double phi2, double phi3) {
  RVec x(4);
  x << std::sin(phi1) * std::sin(phi2), std::sin(phi1) * std::cos(phi2), std::cos(phi1) * std::sin(phi3),
      std::cos(phi1) * std::cos(phi3);
  return x;
}

}  // namespace qpe
