#pragma once

#include "qpe/inner_max.hpp"
#include "qpe/models.hpp"
#include "qpe/trial_function.hpp"

#include <functional>
#include <vector>

namespace qpe {

struct CertificationResult {
  double beta = 0.0;
  double f_lower = 0.0;
  double f_upper = 0.0;
  std::vector<double> witness_theta;
  RMat witness_tau;
  long long regions = 0;   // regions created
  long long vertices = 0;  // inner maximizations performed
  bool gap_flag = false;   // target gap not reached
  std::vector<double> upper_trace;  // global upper bound after each refinement
  double gap() const { return f_upper - f_lower; }
};

struct CertifyOptions {
  double gap_target = 1e-4;
  long long budget = 200000;  // maximum number of regions
  int m = 4;                  // initial grid intervals per axis
  double inner_tol = -1.0;    // defaults to gap_target / 100
  double slack = 1e-9;
  int threads = 1;
  int max_depth = 20;
  bool record_trace = false;
  // Receives (lower corner, side lengths, upper bound) of each region created.
  std::function<void(const std::vector<double>&, const std::vector<double>&, double)> region_observer;
};

// Certified bounds on sup_{θ,τ} Q_α(F, θ, τ) for the configuration's input
// distribution; the configuration's own angles are ignored.
CertificationResult certify_fmax(const TrialFunction& F, const BellConfig& config,
                                 const CertifyOptions& opts = {});

// Recursive axis-by-axis interval bound for a cuboid with the given corner
// values (corner index bit l selects the upper end of axis l).
double region_upper_bound(const std::vector<double>& corner_values, const std::vector<double>& sides,
                          double alpha);

}  // namespace qpe
