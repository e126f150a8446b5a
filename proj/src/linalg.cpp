#include "qpe/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace qpe {

namespace {

CMat hermitize(const CMat& m, double tol) {
  if (m.rows() != m.cols()) throw DomainError("HermitianOperator: matrix not square");
  const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  const double dev = m.size() ? (m - m.adjoint()).cwiseAbs().maxCoeff() : 0.0;
  if (dev > tol * std::max(scale, 1e-300) && dev > 0.0)
    throw DomainError("HermitianOperator: matrix not Hermitian");
  return 0.5 * (m + m.adjoint());
}

}  // namespace

HermitianOperator::HermitianOperator() : m_(0, 0), cache_(std::make_shared<Cache>()) {}

HermitianOperator::HermitianOperator(const CMat& m, double tol)
    : m_(hermitize(m, tol)), cache_(std::make_shared<Cache>()) {}

HermitianOperator::HermitianOperator(const RMat& m, double tol)
    : HermitianOperator(CMat(m.cast<cplx>()), tol) {}

HermitianOperator HermitianOperator::zero(int dim) { return HermitianOperator(CMat(CMat::Zero(dim, dim))); }

HermitianOperator HermitianOperator::identity(int dim) {
  return HermitianOperator(CMat(CMat::Identity(dim, dim)));
}

HermitianOperator HermitianOperator::diagonal(const RVec& d) {
  return HermitianOperator(CMat(d.cast<cplx>().asDiagonal()));
}

HermitianOperator HermitianOperator::projector(const CVec& v) {
  return HermitianOperator(CMat(v * v.adjoint()));
}

HermitianOperator HermitianOperator::from_spectrum(const RVec& values, const CMat& vectors) {
  CMat m = vectors * values.cast<cplx>().asDiagonal() * vectors.adjoint();
  return HermitianOperator(CMat(0.5 * (m + m.adjoint())), 1.0);
}

const Spectrum& HermitianOperator::spectrum() const {
  std::call_once(cache_->once, [this] {
    const int n = dim();
    if (n == 0) {
      cache_->spec = Spectrum{RVec(0), CMat(0, 0)};
      return;
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(m_);
    // Eigen returns ascending order.
    cache_->spec.values = es.eigenvalues().reverse();
    cache_->spec.vectors = es.eigenvectors().rowwise().reverse();
  });
  return cache_->spec;
}

double HermitianOperator::norm() const {
  const auto& v = spectrum().values;
  if (v.size() == 0) return 0.0;
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

double HermitianOperator::max_eigenvalue() const {
  const auto& v = spectrum().values;
  return v.size() ? v(0) : 0.0;
}

double HermitianOperator::min_eigenvalue() const {
  const auto& v = spectrum().values;
  return v.size() ? v(v.size() - 1) : 0.0;
}

bool HermitianOperator::is_psd(double rel_tol) const {
  return min_eigenvalue() >= -rel_tol * std::max(norm(), 1e-300);
}

RVec HermitianOperator::clipped_eigenvalues() const {
  RVec v = spectrum().values;
  const double cut = kClipTol * norm();
  for (int i = 0; i < v.size(); ++i)
    if (v(i) < 0.0 && v(i) >= -cut) v(i) = 0.0;
  return v;
}

double HermitianOperator::kernel_threshold() const {
  return kKernelTol * std::max(max_eigenvalue(), 0.0);
}

HermitianOperator HermitianOperator::apply(const std::function<double(double)>& f) const {
  const auto& s = spectrum();
  RVec fv(s.values.size());
  for (int i = 0; i < fv.size(); ++i) fv(i) = f(s.values(i));
  return from_spectrum(fv, s.vectors);
}

HermitianOperator HermitianOperator::power(double p) const {
  const auto& s = spectrum();
  RVec v = clipped_eigenvalues();
  const double ker = kernel_threshold();
  RVec fv(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0) throw DomainError("power: operator not positive semidefinite");
    if (p < 0.0)
      fv(i) = v(i) > ker ? std::pow(v(i), p) : 0.0;
    else if (p == 0.0)
      fv(i) = v(i) > ker ? 1.0 : 0.0;
    else
      fv(i) = v(i) > 0.0 ? std::pow(v(i), p) : 0.0;
  }
  return from_spectrum(fv, s.vectors);
}

HermitianOperator HermitianOperator::relative_log() const {
  const auto& s = spectrum();
  RVec v = clipped_eigenvalues();
  const double ker = kernel_threshold();
  RVec fv(v.size());
  for (int i = 0; i < v.size(); ++i) {
    if (v(i) < 0.0) throw DomainError("relative_log: operator not positive semidefinite");
    fv(i) = v(i) > ker ? std::log(v(i)) : 0.0;
  }
  return from_spectrum(fv, s.vectors);
}

HermitianOperator HermitianOperator::positive_part() const {
  return apply([](double x) { return x > 0.0 ? x : 0.0; });
}

HermitianOperator HermitianOperator::abs() const {
  return apply([](double x) { return std::abs(x); });
}

HermitianOperator HermitianOperator::support_projector() const { return power(0.0); }

HermitianOperator HermitianOperator::kernel_projector() const {
  return HermitianOperator::identity(dim()) - support_projector();
}

double HermitianOperator::trace_function(const std::function<double(double)>& f) const {
  RVec v = clipped_eigenvalues();
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i)
    if (v(i) > 0.0) acc += f(v(i));
  return acc;
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw DomainError("dimension mismatch");
  return HermitianOperator(CMat(m_ + o.m_));
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
  if (o.dim() != dim()) throw DomainError("dimension mismatch");
  return HermitianOperator(CMat(m_ - o.m_));
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(CMat(s * m_)); }

HermitianOperator HermitianOperator::congruence(const CMat& x) const {
  CMat m = x * m_ * x.adjoint();
  return HermitianOperator(CMat(0.5 * (m + m.adjoint())), 1.0);
}

CMat kron(const CMat& a, const CMat& b) {
  CMat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double trace_product(const CMat& a, const CMat& b) { return (a.transpose().cwiseProduct(b)).sum().real(); }

}  // namespace qpe
