#pragma once

#include <Eigen/Dense>

#include <functional>

namespace qpe::optim {

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value;
  int evaluations;
};

// Minimizes f starting from a simplex around x0 with edge `step`.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, double step, int max_evals = 2000,
                             double ftol = 1e-14);

// Maximizes a unimodal f on [a, b]; returns the argmax.
double golden_section_max(const std::function<double(double)>& f, double a, double b, int iters);

// Root of f on [a, b] given a sign change, to absolute tolerance `xtol`.
double bisect(const std::function<double(double)>& f, double a, double b, double xtol = 1e-12,
              int max_iters = 200);

}  // namespace qpe::optim
