#pragma once

#include "qpe/renyi.hpp"

namespace qpe {

// u(ϕ) = (sin(φ−ϕ) + sin ϕ)^β (sin(φ−ϕ) f + sin(ϕ) f′) / sin(φ)^α.
double interval_u(double f, double f_prime, double phi, double varphi, RenyiOrder ord);

// max over ϕ ∈ [0, φ] of u(ϕ): an upper bound on f_max along a segment of
// angular length φ ∈ (0, π/2] whose endpoint values are at most f and f′.
double interval_bound(double f, double f_prime, double phi, RenyiOrder ord);

}  // namespace qpe
