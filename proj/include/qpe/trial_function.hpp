#pragma once

#include "qpe/linalg.hpp"

#include <string>
#include <vector>

namespace qpe {

enum class TrialRole { qef, qefp, pef, candidate, estimator };

// Real function on Rng(C) × Rng(Z) (optionally × {0,1} for a test bit T).
// Value (c, z, t) is stored at ((t * num_z) + z) * num_c + c.
struct TrialFunction {
  int c_bits = 2;
  int z_bits = 2;
  bool has_t = false;
  double beta = 0.0;
  std::vector<double> values;
  TrialRole role = TrialRole::candidate;

  TrialFunction() = default;
  TrialFunction(int cb, int zb, double b, std::vector<double> v, TrialRole r = TrialRole::candidate,
                bool with_t = false);
  static TrialFunction constant(int cb, int zb, double b, double value, TrialRole r = TrialRole::candidate);

  int num_c() const { return 1 << c_bits; }
  int num_z() const { return 1 << z_bits; }
  int num_t() const { return has_t ? 2 : 1; }
  size_t index(int c, int z, int t = 0) const;
  double operator()(int c, int z, int t = 0) const { return values[index(c, z, t)]; }
  double& at(int c, int z, int t = 0) { return values[index(c, z, t)]; }

  double max_value() const;
  double min_value() const;
  TrialFunction scaled(double s) const;
  // Non-negative and finite.
  bool valid_factor() const;
};

}  // namespace qpe
