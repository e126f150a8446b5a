#include "qpe/cq.hpp"

#include <cmath>
#include <string>

namespace qpe {

CqDistribution::CqDistribution(int num_c, int num_z, std::vector<HermitianOperator> blocks)
    : num_c_(num_c), num_z_(num_z), blocks_(std::move(blocks)) {
  if (num_c <= 0 || num_z <= 0) throw DomainError("CqDistribution: empty range");
  if (static_cast<int>(blocks_.size()) != num_c * num_z)
    throw DomainError("CqDistribution: expected " + std::to_string(num_c * num_z) + " blocks");
  dim_ = blocks_.front().dim();
  for (const auto& b : blocks_) {
    if (b.dim() != dim_) throw DomainError("CqDistribution: block dimensions differ");
    if (!b.is_psd()) throw DomainError("CqDistribution: block not positive semidefinite");
  }
  CMat tot = CMat::Zero(dim_, dim_);
  marginals_.reserve(num_z);
  for (int z = 0; z < num_z; ++z) {
    CMat m = CMat::Zero(dim_, dim_);
    for (int c = 0; c < num_c; ++c) m += blocks_[index(c, z)].matrix();
    tot += m;
    marginals_.emplace_back(m);
  }
  total_ = HermitianOperator(tot);
}

CqDistribution CqDistribution::diagonal(int num_c, int num_z, const std::vector<RVec>& probs) {
  std::vector<HermitianOperator> blocks;
  blocks.reserve(probs.size());
  for (const auto& p : probs) blocks.push_back(HermitianOperator::diagonal(p));
  return CqDistribution(num_c, num_z, std::move(blocks));
}

bool CqDistribution::normalized(double tol) const { return std::abs(trace_total() - 1.0) <= tol; }

int CqDistribution::index(int c, int z) const {
  if (c < 0 || c >= num_c_ || z < 0 || z >= num_z_) throw DomainError("CqDistribution: index out of range");
  return z * num_c_ + c;
}

}  // namespace qpe
