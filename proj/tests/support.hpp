#pragma once

#include "qpe/cq.hpp"
#include "qpe/linalg.hpp"
#include "qpe/models.hpp"
#include "qpe/trial_function.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <numbers>
#include <random>
#include <vector>

namespace qpe::testing {

inline CMat ginibre(int rows, int cols, std::mt19937_64& rng, bool real = false) {
  std::normal_distribution<double> g;
  CMat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = cplx(g(rng), real ? 0.0 : g(rng));
  return m;
}

// Random PSD operator of the given rank with trace `trace`.
inline HermitianOperator random_psd(int dim, std::mt19937_64& rng, int rank = -1, double trace = 1.0,
                                    bool real = false) {
  if (rank <= 0) rank = dim;
  const CMat g = ginibre(dim, rank, rng, real);
  CMat m = g * g.adjoint();
  m /= m.trace().real();
  m *= trace;
  m = 0.5 * (m + m.adjoint());
  return HermitianOperator(m);
}

inline HermitianOperator random_density(int dim, std::mt19937_64& rng, int rank = -1, bool real = false) {
  return random_psd(dim, rng, rank, 1.0, real);
}

// Kraus operators of a random channel from C^din to C^dout with at least `count` terms,
// cut from a Haar-like isometry.
inline std::vector<CMat> random_kraus(int din, int dout, int count, std::mt19937_64& rng) {
  count = std::max(count, (din + dout - 1) / dout);
  const CMat g = ginibre(dout * count, din, rng);
  Eigen::HouseholderQR<CMat> qr(g);
  const CMat q = qr.householderQ() * CMat::Identity(dout * count, din);
  std::vector<CMat> ks;
  for (int i = 0; i < count; ++i) ks.push_back(q.block(i * dout, 0, dout, din));
  return ks;
}

inline HermitianOperator apply_channel(const std::vector<CMat>& kraus, const HermitianOperator& rho) {
  const int dout = static_cast<int>(kraus.front().rows());
  CMat acc = CMat::Zero(dout, dout);
  for (const auto& k : kraus) acc += k * rho.matrix() * k.adjoint();
  acc = 0.5 * (acc + acc.adjoint());
  return HermitianOperator(acc);
}

inline std::vector<double> random_angles(int k, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, std::numbers::pi);
  std::vector<double> th(static_cast<size_t>(k));
  for (auto& t : th) t = u(rng);
  return th;
}

inline CanonicalState random_canonical(int k, std::mt19937_64& rng, int rank = -1) {
  return CanonicalState{random_density(1 << k, rng, rank), BellConfig::uniform(k, random_angles(k, rng))};
}

// Classical side information: ρ(cz) = Σ_e p(e) ν_e(cz) |e⟩⟨e| with each ν_e
// from a random canonical state.
inline CqDistribution random_diagonal_model_state(int k, int dim_e, std::mt19937_64& rng) {
  std::gamma_distribution<double> gam(1.0, 1.0);
  std::vector<double> pe(static_cast<size_t>(dim_e));
  double tot = 0.0;
  for (auto& p : pe) tot += (p = gam(rng));
  const int n = 1 << k;
  std::vector<RVec> probs(static_cast<size_t>(n * n), RVec::Zero(dim_e));
  for (int e = 0; e < dim_e; ++e) {
    const auto nu = distribution_from_canonical(random_canonical(k, rng));
    for (int z = 0; z < n; ++z)
      for (int c = 0; c < n; ++c) probs[static_cast<size_t>(z * n + c)](e) = pe[static_cast<size_t>(e)] / tot * nu.prob(c, z);
  }
  return CqDistribution::diagonal(n, n, probs);
}

inline TrialFunction random_trial_function(int bits, double beta, std::mt19937_64& rng, double lo = 0.2,
                                           double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(static_cast<size_t>(1 << (2 * bits)));
  for (auto& x : v) x = u(rng);
  return TrialFunction(bits, bits, beta, v);
}

}  // namespace qpe::testing
