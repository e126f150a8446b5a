#pragma once

#include <cstdint>
#include <vector>

namespace qpe {

using Bits = std::vector<std::uint8_t>;  // one bit per entry, values 0 or 1

// Required seed length for a k_o × n Toeplitz matrix.
inline long long toeplitz_seed_length(long long input_bits, long long k_o) { return input_bits + k_o - 1; }

// Output bit i is ⊕_j T(i, j) in(j) with T(i, j) = seed[i − j + n − 1].
Bits toeplitz_extract(const Bits& input, const Bits& seed, long long k_o);

// Leftover-hash constraint k_o ≤ k_i − 2 log₂(1/ε_x) − 1.
bool toeplitz_feasible(long long k_o, double k_i, double epsilon_x);

// k_o + 4 log₂ k_o ≤ k_i − 4 log₂(1/δ_x) − 6 and
// k_s ≥ 36 log₂(k_o) (log₂(4 n k_o² / δ_x²))².
bool tmps_feasible(double n, double k_s, double k_o, double k_i, double delta_x);
// Smallest seed length satisfying the second constraint.
double tmps_min_seed(double n, double k_o, double delta_x);

}  // namespace qpe
