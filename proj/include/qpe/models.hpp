#pragma once

#include "qpe/cq.hpp"

#include <string>
#include <vector>

namespace qpe {

// k stations, two settings and two outcomes each. Outcome and setting strings
// are little-endian integers: bit i belongs to station i. In tensor products
// station 0 is the leftmost factor.
struct BellConfig {
  int k = 2;
  std::vector<double> input_dist;  // μ(z), size 2^k
  std::vector<double> angles;      // θ_i ∈ [0, π]

  BellConfig() = default;
  BellConfig(int k_, std::vector<double> mu, std::vector<double> theta);
  static BellConfig uniform(int k, std::vector<double> theta = {});

  int num_values() const { return 1 << k; }
  int dim() const { return 1 << k; }
  BellConfig with_angles(std::vector<double> theta) const;
  void validate() const;
};

HermitianOperator qubit_povm(int c, int z, double phi);
// Real unit vector v with Q_{c|z;φ} = v vᵀ.
Eigen::Vector2d qubit_povm_vector(int c, int z, double phi);
HermitianOperator povm_tensor(const BellConfig& config, int c, int z);
// Real unit vector spanning the rank-one projector P_{c|z;θ}.
RVec povm_tensor_vector(const BellConfig& config, int c, int z);

struct CanonicalState {
  HermitianOperator tau;
  BellConfig config;
};

// ρ(cz) = μ(z) τ^{1/2} P_{c|z;θ} τ^{1/2}.
CqDistribution canonical_cq_state(const CanonicalState& s);

struct TrialDistribution {
  int c_bits = 2;
  int z_bits = 2;
  std::vector<double> probs;  // index z * 2^c_bits + c
  std::string tag;

  TrialDistribution() = default;
  TrialDistribution(int cb, int zb, std::vector<double> p, std::string t = {});

  int num_c() const { return 1 << c_bits; }
  int num_z() const { return 1 << z_bits; }
  double prob(int c, int z) const { return probs[static_cast<size_t>(z * num_c() + c)]; }
  double input_prob(int z) const;
  double conditional(int c, int z) const;
  // Largest violation of no-signaling over all stations and settings.
  double signaling_violation() const;
  void validate(double tol = 1e-10) const;
};

// ν(cz) = μ(z) tr(ρ ⊗_i E_{c_i|z_i}) for a two-qubit state with measurement
// angles (a0, a1, b0, b1) in the x-z plane and detection efficiency eta
// (undetected events are reported as outcome 1).
TrialDistribution two_station_distribution(const RMat& rho, const std::vector<double>& angles,
                                           double eta = 1.0);
TrialDistribution distribution_from_canonical(const CanonicalState& s);

double chsh_value(const TrialDistribution& nu);

enum class Family { E, W, P };
Family parse_family(const std::string& name);
std::string family_name(Family f);

struct FamilyMember {
  TrialDistribution nu;
  RMat state;
  std::vector<double> angles;
  double chsh;
};

FamilyMember family_member(Family family, double param, unsigned long long seed = 7);
inline TrialDistribution family_distribution(Family family, double param) {
  return family_member(family, param).nu;
}

// The 16 local deterministic distributions for two stations, uniform inputs.
std::vector<TrialDistribution> local_deterministic_vertices(const std::vector<double>& input_dist);
// min over local mixtures of Σ_z μ(z) KL(ν(·|z) ‖ λ(·|z)), in nats.
double kl_to_local(const TrialDistribution& nu, int iters = 4000, double tol = 1e-12);

RMat bell_state_density(double theta);
RMat werner_density(double p);

}  // namespace qpe
