#include "qpe/renyi.hpp"

#include <cmath>

namespace qpe {

RenyiOrder::RenyiOrder(double a) : alpha(a) {
  if (!(a > 1.0) || !std::isfinite(a)) throw DomainError("RenyiOrder: alpha must exceed 1");
}

double support_violation(const HermitianOperator& rho, const HermitianOperator& sigma) {
  const double nr = rho.frobenius();
  if (nr == 0.0) return 0.0;
  if (sigma.is_zero()) return 1.0;
  const CMat k = sigma.kernel_projector().matrix();
  return (k * rho.matrix()).norm() / nr;
}

double renyi_power(const HermitianOperator& rho, const HermitianOperator& sigma, RenyiOrder ord,
                   RenyiKind kind, double support_tol) {
  if (rho.dim() != sigma.dim()) throw DomainError("renyi_power: dimension mismatch");
  if (!rho.is_psd()) throw DomainError("renyi_power: rho not positive semidefinite");
  if (!sigma.is_psd()) throw DomainError("renyi_power: sigma not positive semidefinite");
  if (rho.is_zero()) return 0.0;
  if (support_violation(rho, sigma) > support_tol)
    throw DomainError("renyi_power: rho not supported on sigma");

  const double a = ord.alpha;
  const double b = ord.beta();
  if (kind == RenyiKind::petz) {
    if (a > 2.0) throw DomainError("renyi_power: Petz power requires alpha <= 2");
    const CMat ra = rho.power(a).matrix();
    const CMat sb = sigma.power(-b).matrix();
    return trace_product(ra, sb);
  }
  const CMat s = sigma.power(-b / (2.0 * a)).matrix();
  const HermitianOperator inner = rho.congruence(s);
  return inner.trace_function([a](double x) { return std::pow(x, a); });
}

double renyi_power_normalized(const HermitianOperator& rho, const HermitianOperator& sigma,
                              RenyiOrder ord, RenyiKind kind) {
  const double t = rho.trace();
  if (t <= 0.0) throw DomainError("renyi_power_normalized: zero trace");
  return renyi_power(rho, sigma, ord, kind) / t;
}

}  // namespace qpe
