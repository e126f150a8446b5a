#pragma once

#include "qpe/accounting.hpp"
#include "qpe/certify.hpp"
#include "qpe/models.hpp"
#include "qpe/pef.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace qpe {

struct MintrialsOptions {
  ErrorBudget budget;             // ε and κ
  double beta_min = 1e-4;
  double beta_max = 0.5;
  int beta_grid = 24;             // log-spaced search points before refinement
  bool certify = true;            // divide by a certified f_max bound
  double certify_loss = 0.01;     // certification gap as a fraction of β·rate (nats)
  long long certify_budget = 200000;
  double plateau_tol = 1e-6;      // relative n_qef slack when choosing the smallest optimal β
  int threads = 1;
  PefOptions pef;
};

struct MintrialsRow {
  std::string family;
  double param = 0.0;
  double i_hat = 0.0;
  double beta = 0.0;
  double g_bits = 0.0;     // log₂-prob rate of the QEF
  double f_upper = 1.0;    // f_max bound used for the QEF
  double k_inf = 0.0;      // max |log₂ F| / β
  double n_qef = 0.0;
  double n_eat_F = 0.0;
  double ratio() const { return n_eat_F / n_qef; }
};

// Minimizes the QEF trial count over β and polytope PEFs at ν, then forms
// the QEF F = F′/f_max and evaluates both trial counts for it.
MintrialsRow mintrials_for(const TrialDistribution& nu, const MintrialsOptions& opts);

// Family parameters whose CHSH values are evenly spaced on [i_min, i_max].
std::vector<double> family_grid(Family family, int points, double i_min, double i_max);
double family_max_chsh(Family family);

std::vector<MintrialsRow> mintrials_table(Family family, const std::vector<double>& params,
                                          const MintrialsOptions& opts);
void write_mintrials_csv(std::ostream& os, const std::vector<MintrialsRow>& rows);

}  // namespace qpe
