#include "qpe/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace qpe {

double ProtocolParams::min_k_i(long long k_o, double epsilon_x) {
  return static_cast<double>(k_o) + 2.0 * std::log2(1.0 / epsilon_x) + 1.0;
}

double ProtocolResult::log2_qef() const { return log_qef * std::numbers::log2e; }

double protocol_log_f_min(const ProtocolParams& p, double k_z) {
  const double alpha = 1.0 + p.beta;
  double log_p = -(p.k_i + k_z) * std::numbers::ln2;
  if (alpha > 2.0) log_p += (alpha - 2.0) / p.beta * std::log(p.epsilon);
  const double eh = p.epsilon_h();
  return -p.beta * log_p - std::log(eh * eh / 2.0);
}

long long protocol_seed_length(ProtocolRunner::Kind kind, const ProtocolParams& p) {
  long long in = p.n * p.c_bits;
  if (kind == ProtocolRunner::Kind::two) in += p.k_o;
  return toeplitz_seed_length(in, p.k_o);
}

ProtocolRunner::ProtocolRunner(Kind kind, ProtocolParams params, Bits seed, Bits bank)
    : kind_(kind), params_(std::move(params)), seed_(std::move(seed)), bank_(std::move(bank)) {
  const auto& p = params_;
  if (!(p.beta > 0.0)) throw DomainError("protocol: beta must be positive");
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0) || !(p.epsilon_x > 0.0 && p.epsilon_x < p.epsilon))
    throw DomainError("protocol: need 0 < epsilon_x < epsilon <= 1");
  if (p.n < 0 || p.k_o < 1 || p.c_bits < 1) throw DomainError("protocol: bad sizes");
  if (kind_ == Kind::two && static_cast<long long>(bank_.size()) < p.k_o)
    throw DomainError("protocol 2: bank must hold at least k_o bits");
  log_f_min_ = protocol_log_f_min(p, kind_ == Kind::three ? p.k_z : 0.0);
  const long long in_bits = p.n * p.c_bits + (kind_ == Kind::two ? p.k_o : 0);
  if (p.extractor == ExtractorKind::toeplitz) {
    if (!toeplitz_feasible(p.k_o, p.k_i, p.epsilon_x)) {
      infeasible_ = true;
      diagnostic_ = "extractor constraint violated: k_o > k_i - 2 log2(1/epsilon_x) - 1";
    } else if (static_cast<long long>(seed_.size()) != protocol_seed_length(kind_, p)) {
      infeasible_ = true;
      diagnostic_ = "seed length must be " + std::to_string(protocol_seed_length(kind_, p));
    }
  } else if (!tmps_feasible(static_cast<double>(in_bits), static_cast<double>(seed_.size()),
                            static_cast<double>(p.k_o), p.k_i, p.delta_x())) {
    infeasible_ = true;
    diagnostic_ = "TMPS extractor constraints violated";
  }
  c_bits_.reserve(static_cast<size_t>(in_bits));
}

void ProtocolRunner::set_params(const ProtocolParams& p) {
  if (started_) throw DomainError("protocol: parameters are frozen once streaming has begun");
  *this = ProtocolRunner(kind_, p, seed_, bank_);
}

void ProtocolRunner::consume(const Record& rec, const TrialFunction& F) {
  started_ = true;
  if (consumed_ >= params_.n) return;
  if (F.beta != params_.beta) throw DomainError("protocol: QEF power differs from the protocol's beta");
  if (rec.first < 0 || rec.first >= F.num_c() || rec.second < 0 || rec.second >= F.num_z())
    throw DomainError("protocol: record out of range");
  if (F.c_bits != params_.c_bits) throw DomainError("protocol: outcome width mismatch");
  for (int b = 0; b < params_.c_bits; ++b) c_bits_.push_back(static_cast<std::uint8_t>((rec.first >> b) & 1));
  if (!met_) {
    const double f = F(rec.first, rec.second);
    log_total_ += f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
    // Later QEFs are replaced by 1 once the threshold is reached.
    if (log_total_ >= log_f_min_) {
      met_ = true;
      threshold_trial_ = consumed_;
    }
  }
  ++consumed_;
}

ProtocolResult ProtocolRunner::finish() {
  const auto& p = params_;
  ProtocolResult res;
  res.seed = seed_;
  res.log_qef = log_total_;
  res.log_f_min = log_f_min_;
  res.trials = consumed_;
  res.threshold_trial = threshold_trial_;
  res.output.assign(static_cast<size_t>(p.k_o), 0);
  if (infeasible_) {
    res.diagnostic = diagnostic_;
    return res;
  }
  Bits input = c_bits_;
  input.resize(static_cast<size_t>(p.n * p.c_bits), 0);
  if (kind_ == Kind::two) {
    long long kb = 0;
    if (!met_) {
      const double need = (log_f_min_ - log_total_) * std::numbers::log2e / p.beta;
      kb = std::isfinite(need) ? static_cast<long long>(std::ceil(need)) : p.k_o;
      kb = std::clamp(kb, 0LL, p.k_o);
    }
    res.banked_bits_used = kb;
    for (long long i = 0; i < p.k_o; ++i) input.push_back(i < kb ? bank_[static_cast<size_t>(i)] : 0);
    if (consumed_ < p.n) res.diagnostic = "record stream shorter than n; missing outcomes set to 0";
    res.success = true;
  } else {
    if (consumed_ < p.n) {
      res.diagnostic = "record stream shorter than n";
      return res;
    }
    res.success = met_;
    if (!met_) {
      res.diagnostic = "threshold not met";
      return res;
    }
  }
  if (p.extractor == ExtractorKind::toeplitz) {
    res.output = toeplitz_extract(input, seed_, p.k_o);
    res.extracted = true;
  }
  return res;
}

namespace {

ProtocolResult run(ProtocolRunner::Kind kind, const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                   const ProtocolParams& params, const Bits& seed, const Bits& bank) {
  if (fs.empty()) throw DomainError("protocol: no QEF supplied");
  if (fs.size() != 1 && fs.size() < records.size()) throw DomainError("protocol: need one QEF per record");
  ProtocolRunner runner(kind, params, seed, bank);
  const size_t limit = std::min(records.size(), static_cast<size_t>(std::max(params.n, 0LL)));
  for (size_t i = 0; i < limit; ++i) runner.consume(records[i], fs.size() == 1 ? fs[0] : fs[i]);
  return runner.finish();
}

}  // namespace

ProtocolResult run_protocol1(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed) {
  return run(ProtocolRunner::Kind::one, records, fs, params, seed, {});
}

ProtocolResult run_protocol2(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed, const Bits& bank) {
  return run(ProtocolRunner::Kind::two, records, fs, params, seed, bank);
}

ProtocolResult run_protocol3(const std::vector<Record>& records, const std::vector<TrialFunction>& fs,
                             const ProtocolParams& params, const Bits& seed) {
  return run(ProtocolRunner::Kind::three, records, fs, params, seed, {});
}

std::vector<Record> simulate_records(const TrialDistribution& nu, long long n, std::mt19937_64& rng) {
  std::discrete_distribution<int> d(nu.probs.begin(), nu.probs.end());
  std::vector<Record> out;
  out.reserve(static_cast<size_t>(n));
  for (long long i = 0; i < n; ++i) {
    const int j = d(rng);
    out.emplace_back(j % nu.num_c(), j / nu.num_c());
  }
  return out;
}

Bits random_bits(long long n, std::mt19937_64& rng) {
  Bits b(static_cast<size_t>(n));
  for (auto& x : b) x = static_cast<std::uint8_t>(rng() & 1);
  return b;
}

}  // namespace qpe
