#include "qpe/trial_function.hpp"

#include <algorithm>
#include <cmath>

namespace qpe {

TrialFunction::TrialFunction(int cb, int zb, double b, std::vector<double> v, TrialRole r, bool with_t)
    : c_bits(cb), z_bits(zb), has_t(with_t), beta(b), values(std::move(v)), role(r) {
  if (cb < 0 || zb < 0 || cb > 6 || zb > 6) throw DomainError("TrialFunction: bit counts out of range");
  if (values.size() != static_cast<size_t>(num_c() * num_z() * num_t()))
    throw DomainError("TrialFunction: value count mismatch");
  for (double x : values)
    if (std::isnan(x)) throw DomainError("TrialFunction: NaN value");
}

TrialFunction TrialFunction::constant(int cb, int zb, double b, double value, TrialRole r) {
  return TrialFunction(cb, zb, b, std::vector<double>(static_cast<size_t>((1 << cb) * (1 << zb)), value), r);
}

size_t TrialFunction::index(int c, int z, int t) const {
  if (c < 0 || c >= num_c() || z < 0 || z >= num_z() || t < 0 || t >= num_t())
    throw DomainError("TrialFunction: index out of range");
  return static_cast<size_t>((t * num_z() + z) * num_c() + c);
}

double TrialFunction::max_value() const { return *std::max_element(values.begin(), values.end()); }

double TrialFunction::min_value() const { return *std::min_element(values.begin(), values.end()); }

TrialFunction TrialFunction::scaled(double s) const {
  TrialFunction out = *this;
  for (double& x : out.values) x *= s;
  return out;
}

bool TrialFunction::valid_factor() const {
  return std::all_of(values.begin(), values.end(), [](double x) { return x >= 0.0 && std::isfinite(x); });
}

}  // namespace qpe
