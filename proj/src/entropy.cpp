#include "qpe/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpe {

namespace {

void check_shapes(const CqDistribution& a, const CqDistribution& b) {
  if (a.num_c() != b.num_c() || a.num_z() != b.num_z() || a.dim() != b.dim())
    throw DomainError("distance: shape mismatch");
}

void require_normalized(const CqDistribution& rho, const char* what) {
  if (!rho.normalized()) throw DomainError(std::string(what) + ": distribution not normalized");
}

bool is_diagonal(const HermitianOperator& a) {
  const CMat& m = a.matrix();
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j && std::abs(m(i, j)) > kHermTol * scale) return false;
  return true;
}

}  // namespace

HermitianOperator positive_part(const HermitianOperator& a) { return a.positive_part(); }

double tv_distance(const CqDistribution& a, const CqDistribution& b) {
  check_shapes(a, b);
  double acc = 0.0;
  for (int z = 0; z < a.num_z(); ++z)
    for (int c = 0; c < a.num_c(); ++c) acc += (a.block(c, z) - b.block(c, z)).abs().trace();
  return 0.5 * acc;
}

double fidelity(const CqDistribution& a, const CqDistribution& b) {
  check_shapes(a, b);
  double acc = 0.0;
  for (int z = 0; z < a.num_z(); ++z)
    for (int c = 0; c < a.num_c(); ++c) {
      const CMat x = a.block(c, z).sqrt().matrix() * b.block(c, z).sqrt().matrix();
      Eigen::JacobiSVD<CMat> svd(x);
      acc += svd.singularValues().sum();
    }
  return acc;
}

double purified_distance(const CqDistribution& a, const CqDistribution& b) {
  require_normalized(a, "purified_distance");
  if (b.trace_total() > 1.0 + 1e-10) throw DomainError("purified_distance: second argument supernormalized");
  const double f = std::min(fidelity(a, b), 1.0);
  return std::sqrt(std::max(0.0, 1.0 - f * f));
}

double conditional_entropy(const CqDistribution& rho) {
  require_normalized(rho, "conditional_entropy");
  double acc = 0.0;
  for (int z = 0; z < rho.num_z(); ++z) {
    const CMat lz = rho.marginal(z).relative_log().matrix();
    for (int c = 0; c < rho.num_c(); ++c) {
      const auto& b = rho.block(c, z);
      const double self = b.trace_function([](double x) { return x * std::log(x); });
      acc -= self - trace_product(b.matrix(), lz);
    }
  }
  return acc;
}

double max_prob(const CqDistribution& rho, MaxProbMode mode) {
  require_normalized(rho, "max_prob");
  double acc = 0.0;
  switch (mode) {
    case MaxProbMode::diagonal_exact: {
      for (int z = 0; z < rho.num_z(); ++z) {
        for (int c = 0; c < rho.num_c(); ++c)
          if (!is_diagonal(rho.block(c, z))) throw DomainError("max_prob: diagonal mode needs diagonal blocks");
        for (int e = 0; e < rho.dim(); ++e) {
          double best = 0.0;
          for (int c = 0; c < rho.num_c(); ++c) best = std::max(best, rho.block(c, z)(e, e).real());
          acc += best;
        }
      }
      return acc;
    }
    case MaxProbMode::helstrom_binary: {
      if (rho.num_c() != 2) throw DomainError("max_prob: helstrom mode needs two outcomes");
      for (int z = 0; z < rho.num_z(); ++z)
        acc += 0.5 * (rho.marginal(z).trace() + (rho.block(0, z) - rho.block(1, z)).abs().trace());
      return acc;
    }
    case MaxProbMode::pgm_lower: {
      for (int z = 0; z < rho.num_z(); ++z) {
        const CMat s = rho.marginal(z).power(-0.5).matrix();
        for (int c = 0; c < rho.num_c(); ++c) {
          const CMat& b = rho.block(c, z).matrix();
          const CMat m = s * b * s;
          acc += trace_product(m, b);
        }
      }
      return acc;
    }
  }
  return acc;
}

}  // namespace qpe
