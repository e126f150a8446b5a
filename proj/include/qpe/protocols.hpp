#pragma once

#include "qpe/extractor.hpp"
#include "qpe/models.hpp"
#include "qpe/qef.hpp"
#include "qpe/trial_function.hpp"

#include <random>
#include <string>
#include <vector>

namespace qpe {

enum class ExtractorKind { toeplitz, tmps_constraints_only };

struct ProtocolParams {
  long long k_o = 32;        // output bits
  double epsilon = 1e-6;     // total error bound
  double epsilon_x = 5e-7;   // extractor error
  double beta = 0.01;        // power of the QEFs
  long long n = 0;           // trials
  double k_i = 0.0;          // extractor input min-entropy (bits)
  double k_z = 0.0;          // input-generation bits (Protocol 3)
  int c_bits = 2;            // bits per outcome
  ExtractorKind extractor = ExtractorKind::toeplitz;

  double epsilon_h() const { return epsilon - epsilon_x; }
  double delta_x() const { return epsilon_x * epsilon_x / 2.0; }
  // Smallest k_i accepted by the Toeplitz constraint for k_o.
  static double min_k_i(long long k_o, double epsilon_x);
};

struct ProtocolResult {
  bool success = false;
  Bits output;                 // k_o bits; all zero on failure
  Bits seed;                   // echo
  double log_qef = 0.0;        // accumulated log F in nats (frozen once the threshold is met)
  double log_f_min = 0.0;      // nats
  long long trials = 0;        // records consumed
  long long threshold_trial = -1;  // first trial index at which the threshold was met
  long long banked_bits_used = 0;
  bool extracted = false;      // false for tmps_constraints_only
  std::string diagnostic;
  double log2_qef() const;
};

// log f_min = −β log p − log(ε_h²/2), with p = 2^{−k_i−k_z} ε^{(α−2)/β} when
// α > 2 and p = 2^{−k_i−k_z} otherwise.
double protocol_log_f_min(const ProtocolParams& p, double k_z);

// Streaming runner. Parameters are frozen at construction; QEFs are passed
// per trial, so trial i's function cannot depend on records at or after i.
class ProtocolRunner {
 public:
  enum class Kind { one, two, three };
  ProtocolRunner(Kind kind, ProtocolParams params, Bits seed, Bits bank = {});

  const ProtocolParams& params() const { return params_; }
  // Rejected once any record has been consumed.
  void set_params(const ProtocolParams& p);
  double log_f_min() const { return log_f_min_; }
  bool threshold_met() const { return met_; }

  void consume(const Record& rec, const TrialFunction& F);
  ProtocolResult finish();

 private:
  Kind kind_;
  ProtocolParams params_;
  Bits seed_;
  Bits bank_;
  double log_f_min_ = 0.0;
  double log_total_ = 0.0;
  bool met_ = false;
  bool started_ = false;
  bool infeasible_ = false;
  std::string diagnostic_;
  long long consumed_ = 0;
  long long threshold_trial_ = -1;
  Bits c_bits_;
};

// Seed length the runner expects for the given protocol.
long long protocol_seed_length(ProtocolRunner::Kind kind, const ProtocolParams& p);

// fs holds one function reused for every trial or one per trial.
ProtocolResult run_protocol1(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed);
ProtocolResult run_protocol2(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed, const Bits& bank);
ProtocolResult run_protocol3(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed);

// i.i.d. samples from ν.
std::vector<Record> simulate_records(const TrialDistribution& nu, long long n, std::mt19937_64& rng);
Bits random_bits(long long n, std::mt19937_64& rng);

}  // namespace qpe
