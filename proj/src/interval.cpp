#include "qpe/interval.hpp"

#include "qpe/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qpe {

double interval_u(double f, double f_prime, double phi, double varphi, RenyiOrder ord) {
  const double a = std::sin(phi - varphi), b = std::sin(varphi);
  return std::pow(a + b, ord.beta()) * (a * f + b * f_prime) / std::pow(std::sin(phi), ord.alpha);
}

double interval_bound(double f, double f_prime, double phi, RenyiOrder ord) {
  if (!(phi > 0.0 && phi <= std::numbers::pi / 2 + 1e-15)) throw DomainError("interval_bound: phi must lie in (0, pi/2]");
  if (!(f >= 0.0 && f_prime >= 0.0)) throw DomainError("interval_bound: endpoint values must be non-negative");
  if (f == 0.0 && f_prime == 0.0) return 0.0;
  const double beta = ord.beta();
  const double inf = std::numeric_limits<double>::infinity();
  // Derivative of log u.
  auto dlog = [&](double x) {
    const double a = std::sin(phi - x), b = std::sin(x);
    const double ca = std::cos(phi - x), cb = std::cos(x);
    const double den = a * f + b * f_prime;
    const double num = cb * f_prime - ca * f;
    double second;
    if (den > 0.0)
      second = num / den;
    else
      second = num > 0.0 ? inf : -inf;
    return beta * (cb - ca) / (a + b) + second;
  };
  if (dlog(0.0) <= 0.0) return f;
  if (dlog(phi) >= 0.0) return f_prime;
  const double x = optim::bisect(dlog, 0.0, phi, 1e-12);
  return std::max({interval_u(f, f_prime, phi, x, ord), f, f_prime});
}

}  // namespace qpe
