#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace qpe {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kClipTol = 1e-10;
inline constexpr double kKernelTol = 1e-12;
inline constexpr double kSupportTol = 1e-8;

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

// Eigenvalues in descending order; columns of `vectors` are matching eigenvectors.
struct Spectrum {
  RVec values;
  CMat vectors;
};

// Dense complex Hermitian matrix. Immutable; the spectral decomposition is
// computed on first use and shared between copies.
class HermitianOperator {
 public:
  HermitianOperator();
  explicit HermitianOperator(const CMat& m, double tol = kHermTol);
  explicit HermitianOperator(const RMat& m, double tol = kHermTol);

  static HermitianOperator zero(int dim);
  static HermitianOperator identity(int dim);
  static HermitianOperator diagonal(const RVec& d);
  static HermitianOperator projector(const CVec& v);
  static HermitianOperator from_spectrum(const RVec& values, const CMat& vectors);

  int dim() const { return static_cast<int>(m_.rows()); }
  const CMat& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }

  const Spectrum& spectrum() const;
  double trace() const { return m_.trace().real(); }
  // Largest absolute eigenvalue.
  double norm() const;
  double frobenius() const { return m_.norm(); }
  double max_eigenvalue() const;
  double min_eigenvalue() const;
  bool is_zero() const { return m_.cwiseAbs().maxCoeff() == 0.0; }
  bool is_psd(double rel_tol = kClipTol) const;

  // f applied to each eigenvalue.
  HermitianOperator apply(const std::function<double(double)>& f) const;
  // A^p on the support. Negative p gives the relative inverse power; tiny
  // negative eigenvalues are clipped first.
  HermitianOperator power(double p) const;
  HermitianOperator sqrt() const { return power(0.5); }
  HermitianOperator relative_log() const;
  HermitianOperator positive_part() const;
  HermitianOperator abs() const;
  HermitianOperator support_projector() const;
  HermitianOperator kernel_projector() const;
  // Eigenvalues clipped to zero when in [-kClipTol*norm, 0).
  RVec clipped_eigenvalues() const;
  // Σ f(λ) over the clipped spectrum, restricted to λ > 0.
  double trace_function(const std::function<double(double)>& f) const;

  HermitianOperator operator+(const HermitianOperator& o) const;
  HermitianOperator operator-(const HermitianOperator& o) const;
  HermitianOperator operator*(double s) const;
  // X A X† for arbitrary X.
  HermitianOperator congruence(const CMat& x) const;

 private:
  struct Cache {
    std::once_flag once;
    Spectrum spec;
  };
  CMat m_;
  std::shared_ptr<Cache> cache_;
  // Threshold below which an eigenvalue counts as kernel.
  double kernel_threshold() const;
};

inline HermitianOperator operator*(double s, const HermitianOperator& a) { return a * s; }

// Tensor (Kronecker) product.
CMat kron(const CMat& a, const CMat& b);
double trace_product(const CMat& a, const CMat& b);

}  // namespace qpe
