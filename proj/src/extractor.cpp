#include "qpe/extractor.hpp"

#include "qpe/linalg.hpp"

#include <cmath>

namespace qpe {

Bits toeplitz_extract(const Bits& input, const Bits& seed, long long k_o) {
  const long long n = static_cast<long long>(input.size());
  if (k_o < 0) throw DomainError("toeplitz_extract: negative output length");
  if (n == 0 && k_o > 0) throw DomainError("toeplitz_extract: empty input");
  if (static_cast<long long>(seed.size()) != toeplitz_seed_length(n, k_o))
    throw DomainError("toeplitz_extract: seed length must be |input| + k_o - 1");
  for (auto b : input)
    if (b > 1) throw DomainError("toeplitz_extract: input entries must be bits");
  for (auto b : seed)
    if (b > 1) throw DomainError("toeplitz_extract: seed entries must be bits");
  Bits out(static_cast<size_t>(k_o), 0);
  for (long long i = 0; i < k_o; ++i) {
    std::uint8_t acc = 0;
    // Row i reads the seed window [i, i + n − 1] in reverse.
    const std::uint8_t* row = seed.data() + i + n - 1;
    for (long long j = 0; j < n; ++j) acc ^= static_cast<std::uint8_t>(*(row - j) & input[static_cast<size_t>(j)]);
    out[static_cast<size_t>(i)] = acc;
  }
  return out;
}

bool toeplitz_feasible(long long k_o, double k_i, double epsilon_x) {
  if (!(epsilon_x > 0.0 && epsilon_x < 1.0)) return false;
  return static_cast<double>(k_o) <= k_i - 2.0 * std::log2(1.0 / epsilon_x) - 1.0;
}

double tmps_min_seed(double n, double k_o, double delta_x) {
  const double l = std::log2(4.0 * n * k_o * k_o / (delta_x * delta_x));
  return 36.0 * std::log2(k_o) * l * l;
}

bool tmps_feasible(double n, double k_s, double k_o, double k_i, double delta_x) {
  if (!(delta_x > 0.0 && delta_x < 1.0) || k_o < 2.0 || n < 1.0) return false;
  const bool entropy = k_o + 4.0 * std::log2(k_o) <= k_i - 4.0 * std::log2(1.0 / delta_x) - 6.0;
  return entropy && k_s >= tmps_min_seed(n, k_o, delta_x);
}

}  // namespace qpe
