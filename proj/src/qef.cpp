#include "qpe/qef.hpp"

#include <cmath>
#include <limits>

namespace qpe {

double q_alpha(const TrialFunction& F, const BellConfig& config, const HermitianOperator& tau) {
  if (F.num_c() != config.num_values() || F.num_z() != config.num_values() || F.has_t)
    throw DomainError("q_alpha: trial function does not match the configuration");
  if (tau.dim() != config.dim()) throw DomainError("q_alpha: tau dimension mismatch");
  const double alpha = 1.0 + F.beta;
  const CMat root = tau.power(1.0 / alpha).matrix();
  double acc = 0.0;
  for (int z = 0; z < F.num_z(); ++z) {
    const double mu = config.input_dist[static_cast<size_t>(z)];
    if (mu == 0.0) continue;
    for (int c = 0; c < F.num_c(); ++c) {
      const double f = F(c, z);
      if (f == 0.0) continue;
      const CVec v = povm_tensor_vector(config, c, z).cast<cplx>();
      const double t = std::max(0.0, (v.adjoint() * root * v)(0, 0).real());
      acc += mu * f * std::pow(t, alpha);
    }
  }
  return acc;
}

double qef_inequality_check(const TrialFunction& F, const CqDistribution& rho, RenyiKind kind) {
  if (F.num_c() != rho.num_c() || F.num_z() != rho.num_z() || F.has_t)
    throw DomainError("qef_inequality_check: shape mismatch");
  const RenyiOrder ord = RenyiOrder::from_beta(F.beta);
  double acc = 0.0;
  for (int z = 0; z < rho.num_z(); ++z)
    for (int c = 0; c < rho.num_c(); ++c) {
      const double f = F(c, z);
      if (f == 0.0) continue;
      acc += f * renyi_power(rho.block(c, z), rho.marginal(z), ord, kind);
    }
  return rho.trace_total() - acc;
}

ChainResult chain(const std::vector<TrialFunction>& fs, const std::vector<Record>& records) {
  if (fs.empty()) throw DomainError("chain: no trial functions");
  if (fs.size() != 1 && fs.size() != records.size()) throw DomainError("chain: one function per record required");
  const double beta = fs.front().beta;
  for (const auto& f : fs)
    if (f.beta != beta) throw DomainError("chain: all trial functions must share beta");
  ChainResult out;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto& f = fs.size() == 1 ? fs.front() : fs[i];
    const double v = f(records[i].first, records[i].second);
    if (v <= 0.0) {
      out.hit_zero = true;
      out.log_total = -std::numeric_limits<double>::infinity();
    } else if (!out.hit_zero) {
      out.log_total += std::log(v);
    }
    ++out.trials;
  }
  return out;
}

TrialFunction power_reduce(const TrialFunction& F, double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("power_reduce: gamma must lie in (0, 1]");
  TrialFunction out = F;
  out.beta = gamma * F.beta;
  for (double& x : out.values) x = std::pow(x, gamma);
  return out;
}

}  // namespace qpe
