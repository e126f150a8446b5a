#pragma once

#include "qpe/models.hpp"
#include "qpe/trial_function.hpp"

#include <functional>
#include <vector>

namespace qpe {

// g(τ) = Σ_i w_i (v_iᵀ τ^{1/α} v_i)^α over real density matrices τ.
class ConcaveProblem {
 public:
  ConcaveProblem(double alpha, std::vector<RVec> vectors, std::vector<double> weights);
  static ConcaveProblem from_trial_function(const TrialFunction& F, const BellConfig& config);

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  const std::vector<RVec>& vectors() const { return vecs_; }
  const std::vector<double>& weights() const { return w_; }

  double value(const RMat& tau) const;
  // Value and gradient at τ. The spectrum of τ is collapsed first; the
  // collapsed, renormalized operator is written to `collapsed` when given.
  double value_and_gradient(const RMat& tau, RMat& grad, RMat* collapsed = nullptr) const;
  // Same problem restricted to span(basis) (orthonormal columns).
  ConcaveProblem restricted(const RMat& basis) const;

 private:
  double alpha_;
  int dim_;
  std::vector<RVec> vecs_;
  std::vector<double> w_;
};

// Orthonormal bases of subspaces invariant under every v_i v_iᵀ with w_i > 0.
// Subspaces on which all terms vanish are omitted.
std::vector<RMat> invariant_blocks(const ConcaveProblem& p, unsigned long long seed = 1);

struct InnerMaxResult {
  double value = 0.0;        // g(τ*), attained
  RMat tau;                  // τ*
  double upper_bound = 0.0;  // certified: no τ exceeds it
  int iterations = 0;
  bool converged = false;
  int blocks = 1;
};

struct InnerMaxOptions {
  double tol = 1e-9;
  int max_iters = 10000;
  int line_search_iters = 40;
  const RMat* warm_start = nullptr;
  // Called with (value, upper bound) at every iterate.
  std::function<void(double, double)> observer;
};

InnerMaxResult inner_max_tau(const ConcaveProblem& p, const InnerMaxOptions& opts = {});
InnerMaxResult inner_max_tau(const TrialFunction& F, const BellConfig& config, const InnerMaxOptions& opts = {});
inline InnerMaxResult inner_max_tau(const TrialFunction& F, const BellConfig& config, double tol) {
  InnerMaxOptions o;
  o.tol = tol;
  return inner_max_tau(F, config, o);
}

}  // namespace qpe
