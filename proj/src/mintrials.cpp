#include "qpe/mintrials.hpp"

#include "qpe/optim.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>

namespace qpe {

namespace {

std::vector<double> input_marginal(const TrialDistribution& nu) {
  std::vector<double> mu(static_cast<size_t>(nu.num_z()));
  for (int z = 0; z < nu.num_z(); ++z) mu[static_cast<size_t>(z)] = nu.input_prob(z);
  return mu;
}

std::pair<double, double> family_domain(Family f) {
  switch (f) {
    case Family::E:
      return {0.0, std::numbers::pi / 4.0};
    case Family::W:
      return {1.0 / std::numbers::sqrt2 + 1e-9, 1.0};
    case Family::P:
      return {2.0 / 3.0 + 1e-6, 1.0};
  }
  return {0.0, 1.0};
}

}  // namespace

MintrialsRow mintrials_for(const TrialDistribution& nu, const MintrialsOptions& opts) {
  opts.budget.validate();
  const auto vertices = tsirelson_cut_vertices(input_marginal(nu));
  const double inf = std::numeric_limits<double>::infinity();
  auto n_at = [&](double beta) {
    const PefResult r = optimize_pef_polytope(nu, beta, vertices, opts.pef);
    if (!(r.rate_bits > 0.0)) return inf;
    return n_min_qef(r.rate_bits, beta, opts.budget);
  };

  const double l0 = std::log(opts.beta_min), l1 = std::log(opts.beta_max);
  const int m = std::max(3, opts.beta_grid);
  std::vector<double> grid(static_cast<size_t>(m)), vals(static_cast<size_t>(m));
  size_t best = 0;
  for (int i = 0; i < m; ++i) {
    grid[static_cast<size_t>(i)] = l0 + (l1 - l0) * i / (m - 1);
    vals[static_cast<size_t>(i)] = n_at(std::exp(grid[static_cast<size_t>(i)]));
    if (vals[static_cast<size_t>(i)] < vals[best]) best = static_cast<size_t>(i);
  }
  double beta = std::exp(grid[best]);
  if (std::isfinite(vals[best])) {
    const double a = grid[best == 0 ? 0 : best - 1];
    const double b = grid[std::min(best + 1, grid.size() - 1)];
    const double lb = optim::golden_section_max([&](double x) { return -n_at(std::exp(x)); }, a, b, 40);
    if (n_at(std::exp(lb)) < vals[best]) beta = std::exp(lb);
    // Smallest β on the plateau of n_qef.
    const double target = n_at(beta) * (1.0 + opts.plateau_tol);
    double lo = l0, hi = std::log(beta);
    if (n_at(std::exp(lo)) <= target) {
      hi = lo;
    } else {
      for (int i = 0; i < 50; ++i) {
        const double mid = 0.5 * (lo + hi);
        (n_at(std::exp(mid)) <= target ? hi : lo) = mid;
      }
    }
    beta = std::exp(hi);
  }

  MintrialsRow row;
  row.i_hat = chsh_value(nu);
  row.beta = beta;
  const PefResult pef = optimize_pef_polytope(nu, beta, vertices, opts.pef);
  TrialFunction F = pef.F;
  if (opts.certify) {
    CertifyOptions co;
    co.gap_target = std::max(1e-9, opts.certify_loss * beta * pef.rate);
    co.budget = opts.certify_budget;
    co.threads = opts.threads;
    const auto cert = certify_fmax(F, BellConfig(2, input_marginal(nu), {0.0, 0.0}), co);
    row.f_upper = cert.f_upper;
    F = F.scaled(1.0 / cert.f_upper);
  }
  F.role = TrialRole::qef;
  double g = 0.0, kinf = 0.0;
  for (int z = 0; z < nu.num_z(); ++z)
    for (int c = 0; c < nu.num_c(); ++c) {
      const double f = F(c, z);
      if (f <= 0.0) {
        kinf = inf;
        continue;
      }
      kinf = std::max(kinf, std::abs(std::log2(f)) / beta);
      if (nu.prob(c, z) > 0.0) g += nu.prob(c, z) * std::log2(f);
    }
  row.g_bits = g / beta;
  row.k_inf = kinf;
  row.n_qef = row.g_bits > 0.0 ? n_min_qef(row.g_bits, beta, opts.budget) : inf;
  row.n_eat_F = row.g_bits > 0.0 && std::isfinite(kinf) ? n_min_eat_from_ee(row.g_bits, kinf, nu.num_c(), opts.budget)
                                                          : inf;
  return row;
}

double family_max_chsh(Family family) { return family_member(family, family_domain(family).second).chsh; }

std::vector<double> family_grid(Family family, int points, double i_min, double i_max) {
  if (points < 1) throw DomainError("family_grid: need at least one point");
  const auto [lo, hi] = family_domain(family);
  std::vector<double> out;
  for (int i = 0; i < points; ++i) {
    const double target = points == 1 ? i_max : i_min + (i_max - i_min) * i / (points - 1);
    if (family_member(family, hi).chsh <= target + 1e-12) {
      out.push_back(hi);
      continue;
    }
    out.push_back(optim::bisect([&](double x) { return family_member(family, x).chsh - target; }, lo, hi, 1e-7));
  }
  return out;
}

std::vector<MintrialsRow> mintrials_table(Family family, const std::vector<double>& params,
                                          const MintrialsOptions& opts) {
  std::vector<MintrialsRow> rows;
  for (double p : params) {
    MintrialsRow r = mintrials_for(family_member(family, p).nu, opts);
    r.family = family_name(family);
    r.param = p;
    rows.push_back(r);
  }
  return rows;
}

void write_mintrials_csv(std::ostream& os, const std::vector<MintrialsRow>& rows) {
  os << "family_param,I_hat,n_qef,n_eat_F,ratio,family,beta,g_bits,f_upper,k_inf\n";
  os << std::setprecision(10);
  for (const auto& r : rows)
    os << r.param << ',' << r.i_hat << ',' << r.n_qef << ',' << r.n_eat_F << ',' << r.ratio() << ',' << r.family << ','
       << r.beta << ',' << r.g_bits << ',' << r.f_upper << ',' << r.k_inf << '\n';
}

}  // namespace qpe
