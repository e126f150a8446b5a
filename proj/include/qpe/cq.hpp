#pragma once

#include "qpe/linalg.hpp"

#include <vector>

namespace qpe {

// Operator-valued distribution over pairs (c, z). Block (c, z) is stored at
// index z * num_c + c.
class CqDistribution {
 public:
  CqDistribution() = default;
  CqDistribution(int num_c, int num_z, std::vector<HermitianOperator> blocks);

  // Diagonal ("classical side information") state from a table
  // probs[z * num_c + c][e].
  static CqDistribution diagonal(int num_c, int num_z, const std::vector<RVec>& probs);

  int num_c() const { return num_c_; }
  int num_z() const { return num_z_; }
  int dim() const { return dim_; }

  const HermitianOperator& block(int c, int z) const { return blocks_[index(c, z)]; }
  const HermitianOperator& marginal(int z) const { return marginals_[z]; }
  const HermitianOperator& total() const { return total_; }
  double trace_total() const { return total_.trace(); }
  double prob(int c, int z) const { return block(c, z).trace(); }
  bool normalized(double tol = 1e-10) const;

 private:
  int index(int c, int z) const;
  int num_c_ = 0;
  int num_z_ = 0;
  int dim_ = 0;
  std::vector<HermitianOperator> blocks_;
  std::vector<HermitianOperator> marginals_;
  HermitianOperator total_;
};

}  // namespace qpe
