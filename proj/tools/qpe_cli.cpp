#include "qpe/accounting.hpp"
#include "qpe/certify.hpp"
#include "qpe/estimators.hpp"
#include "qpe/io.hpp"
#include "qpe/mintrials.hpp"
#include "qpe/pef.hpp"
#include "qpe/protocols.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

namespace {

using qpe::io::json;

// Invalid user input: exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void emit(const std::string& out, const json& j) {
  if (out.empty() || out == "-")
    std::cout << j.dump(2) << '\n';
  else
    qpe::io::write_json_file(out, j);
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw UsageError("cannot write " + path);
  return file;
}

qpe::Bits load_bits(const std::string& hex, const std::string& file) {
  if (!hex.empty()) return qpe::io::bits_from_hex(hex);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw UsageError("cannot open " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    return qpe::io::bits_from_hex(ss.str());
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum estimation factor toolkit for (k,2,2) Bell tests"};
  app.require_subcommand(1);
  unsigned long long seed = 7;
  int threads = 1;
  app.add_option("--seed", seed, "Seed for every stochastic step");
  app.add_option("--threads", threads, "Worker threads for certification")->check(CLI::PositiveNumber);

  // family
  auto* fam = app.add_subcommand("family", "Write a family trial distribution and print its CHSH value");
  std::string fam_name, fam_out;
  double fam_param = 0.0;
  fam->add_option("family", fam_name, "E, W or P")->required()->check(CLI::IsMember({"E", "W", "P"}));
  fam->add_option("param", fam_param, "Family parameter")->required();
  fam->add_option("-o,--out", fam_out, "Output JSON (default stdout)");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Optimize a PEF and optionally certify it as a QEF");
  std::string opt_nu, opt_out, opt_mode = "pef";
  double opt_beta = 0.01, opt_gap = 1e-4;
  opt->add_option("--nu", opt_nu, "Trial distribution JSON")->required();
  opt->add_option("--beta", opt_beta, "Power")->check(CLI::Range(1e-6, 10.0));
  opt->add_option("--mode", opt_mode, "pef or qef-cert")->check(CLI::IsMember({"pef", "qef-cert"}));
  opt->add_option("--gap", opt_gap, "Certification gap target")->check(CLI::PositiveNumber);
  opt->add_option("-o,--out", opt_out, "Output JSON (default stdout)");

  // certify
  auto* cer = app.add_subcommand("certify", "Certify f_max bounds for a trial function");
  std::string cer_in, cer_out, cer_route = "qef";
  double cer_gap = 1e-4;
  int cer_m = 4;
  long long cer_budget = 200000;
  cer->add_option("--qef", cer_in, "Trial function JSON")->required();
  cer->add_option("--gap", cer_gap, "Gap target")->check(CLI::PositiveNumber);
  cer->add_option("--m", cer_m, "Initial grid intervals per angle")->check(CLI::Range(2, 64));
  cer->add_option("--budget", cer_budget, "Maximum number of regions")->check(CLI::PositiveNumber);
  cer->add_option("--route", cer_route, "qef (mixed states) or pef (pure states)")
      ->check(CLI::IsMember({"qef", "pef"}));
  cer->add_option("-o,--out", cer_out, "Output JSON (default stdout)");

  // mintrials
  auto* mt = app.add_subcommand("mintrials", "Minimum trial counts for QEF and EAT accounting");
  std::string mt_family, mt_out, mt_qef, mt_nu;
  int mt_points = 8;
  double mt_eps = 1e-6, mt_kappa = 1.0, mt_imin = 2.01, mt_imax = -1.0;
  bool mt_no_certify = false;
  mt->add_option("--family", mt_family, "Family grid: E, W or P")->check(CLI::IsMember({"E", "W", "P"}));
  mt->add_option("--points", mt_points, "Grid points")->check(CLI::Range(1, 1000));
  mt->add_option("--imin", mt_imin, "Smallest CHSH value on the grid");
  mt->add_option("--imax", mt_imax, "Largest CHSH value (default: family maximum)");
  mt->add_option("--qef", mt_qef, "Evaluate a given QEF instead of optimizing");
  mt->add_option("--nu", mt_nu, "Trial distribution for --qef");
  mt->add_option("--epsilon", mt_eps, "Error bound")->check(CLI::Range(1e-300, 1.0));
  mt->add_option("--kappa", mt_kappa, "Protected success probability")->check(CLI::Range(1e-300, 1.0));
  mt->add_flag("--no-certify", mt_no_certify, "Skip f_max certification (uncertified PEF counts)");
  mt->add_option("-o,--out", mt_out, "Output CSV (default stdout)");

  // curves
  auto* cur = app.add_subcommand("curves", "Maximum error-bound rate curves for QEF and EAT accounting");
  int cur_n = 2;
  double cur_k = 1.0;
  std::string cur_out;
  cur->add_option("--N", cur_n, "Number of outcomes")->check(CLI::Range(2, 1 << 20));
  cur->add_option("--kinf", cur_k, "k_inf in nats")->check(CLI::NonNegativeNumber);
  cur->add_option("-o,--out", cur_out, "Output CSV (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Sample i.i.d. trial records from a distribution");
  std::string sim_nu, sim_out;
  long long sim_n = 1000;
  sim->add_option("--nu", sim_nu, "Trial distribution JSON")->required();
  sim->add_option("--n", sim_n, "Number of records")->check(CLI::NonNegativeNumber);
  sim->add_option("-o,--out", sim_out, "Output JSONL (default stdout)");

  // run
  auto* run = app.add_subcommand("run", "Run a randomness generation protocol on a record file");
  int run_protocol = 1;
  std::string run_records, run_qef, run_seed_hex, run_seed_file, run_bank_hex, run_bank_file, run_out,
      run_extractor = "toeplitz";
  qpe::ProtocolParams pp;
  double run_k_i = -1.0;
  run->add_option("--protocol", run_protocol, "1, 2 or 3")->check(CLI::IsMember({1, 2, 3}));
  run->add_option("--records", run_records, "JSONL trial records")->required();
  run->add_option("--qef", run_qef, "QEF JSON")->required();
  run->add_option("--n", pp.n, "Number of trials")->required()->check(CLI::NonNegativeNumber);
  run->add_option("--k-o", pp.k_o, "Output bits")->check(CLI::PositiveNumber);
  run->add_option("--epsilon", pp.epsilon, "Error bound")->check(CLI::Range(1e-300, 1.0));
  run->add_option("--epsilon-x", pp.epsilon_x, "Extractor error")->check(CLI::Range(1e-300, 1.0));
  run->add_option("--k-i", run_k_i, "Extractor input entropy in bits (default: smallest feasible)");
  run->add_option("--k-z", pp.k_z, "Input bits (Protocol 3)")->check(CLI::NonNegativeNumber);
  run->add_option("--extractor", run_extractor, "toeplitz or tmps")->check(CLI::IsMember({"toeplitz", "tmps"}));
  run->add_option("--seed-hex", run_seed_hex, "Extractor seed as hex");
  run->add_option("--seed-file", run_seed_file, "File holding the extractor seed as hex");
  run->add_option("--bank-hex", run_bank_hex, "Banked random bits as hex (Protocol 2)");
  run->add_option("--bank-file", run_bank_file, "File holding banked bits as hex (Protocol 2)");
  run->add_option("-o,--out", run_out, "Output JSON (default stdout)");

  // expand
  auto* exp = app.add_subcommand("expand", "Spot-checking expansion rate table");
  std::string exp_b, exp_nu, exp_out;
  double exp_bbar = -1.0, exp_eps = 1e-6;
  int exp_z0 = 0;
  std::vector<double> exp_r = {0.1, 0.03, 0.01, 0.003, 0.001};
  exp->add_option("--maxprob", exp_b, "Max-prob estimator JSON")->required();
  exp->add_option("--nu", exp_nu, "Design distribution JSON (sets b_bar to E B)");
  exp->add_option("--bbar", exp_bbar, "Expected max-prob estimate");
  exp->add_option("--z0", exp_z0, "Fixed non-test input")->check(CLI::NonNegativeNumber);
  exp->add_option("--r", exp_r, "Test rates")->check(CLI::Range(1e-12, 0.5));
  exp->add_option("--epsilon", exp_eps, "Error bound for the trial schedule")->check(CLI::Range(1e-300, 1.0));
  exp->add_option("-o,--out", exp_out, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fam) {
      const auto m = qpe::family_member(qpe::parse_family(fam_name), fam_param, seed);
      json j = qpe::io::to_json(m.nu);
      j["family"] = fam_name;
      j["param"] = fam_param;
      j["chsh"] = m.chsh;
      j["angles"] = m.angles;
      if (!fam_out.empty() && fam_out != "-") qpe::io::write_json_file(fam_out, j);
      std::printf("I_hat = %.12f\n", m.chsh);
    } else if (*opt) {
      const auto nu = qpe::io::distribution_from_json(load(opt_nu));
      const auto r = qpe::optimize_pef_polytope(nu, opt_beta);
      json j;
      j["pef"] = qpe::io::to_json(r.F);
      j["pef_rate_bits"] = r.rate_bits;
      double rate_bits = r.rate_bits;
      if (opt_mode == "qef-cert") {
        qpe::CertifyOptions co;
        co.gap_target = opt_gap;
        co.threads = threads;
        std::vector<double> mu;
        for (int z = 0; z < nu.num_z(); ++z) mu.push_back(nu.input_prob(z));
        const auto cert = qpe::certify_fmax(r.F, qpe::BellConfig(nu.z_bits, mu, std::vector<double>(nu.z_bits, 0.0)), co);
        auto F = r.F.scaled(1.0 / cert.f_upper);
        F.role = qpe::TrialRole::qef;
        rate_bits -= std::log2(cert.f_upper) / opt_beta;
        j["qef"] = qpe::io::to_json(F);
        j["certification"] = qpe::io::to_json(cert);
      }
      j["rate_bits"] = rate_bits;
      emit(opt_out, j);
      std::fprintf(stderr, "log-prob rate: %.9g bits/trial\n", rate_bits);
    } else if (*cer) {
      json in = load(cer_in);
      if (in.contains("pef")) in = in["pef"];
      const auto F = qpe::io::trial_function_from_json(in);
      const auto cfg = qpe::BellConfig::uniform(F.z_bits);
      qpe::CertificationResult cert;
      if (cer_route == "qef") {
        qpe::CertifyOptions co;
        co.gap_target = cer_gap;
        co.m = cer_m;
        co.budget = cer_budget;
        co.threads = threads;
        cert = qpe::certify_fmax(F, cfg, co);
      } else {
        qpe::PefCertifyOptions po;
        po.gap_target = cer_gap;
        po.m_theta = cer_m;
        po.budget = cer_budget;
        cert = qpe::certify_pef_fmax(F, cfg, po);
      }
      emit(cer_out, qpe::io::to_json(cert));
    } else if (*mt) {
      qpe::MintrialsOptions mo;
      mo.budget.epsilon = mt_eps;
      mo.budget.kappa = mt_kappa;
      mo.certify = !mt_no_certify;
      mo.threads = threads;
      std::vector<qpe::MintrialsRow> rows;
      if (!mt_qef.empty()) {
        if (mt_nu.empty()) throw UsageError("--qef requires --nu");
        const auto nu = qpe::io::distribution_from_json(load(mt_nu));
        json in = load(mt_qef);
        if (in.contains("qef")) in = in["qef"];
        const auto F = qpe::io::trial_function_from_json(in);
        qpe::MintrialsRow r;
        r.i_hat = qpe::chsh_value(nu);
        r.beta = F.beta;
        double g = 0.0, k = 0.0;
        for (int z = 0; z < nu.num_z(); ++z)
          for (int c = 0; c < nu.num_c(); ++c) {
            const double f = F(c, z);
            k = std::max(k, f > 0.0 ? std::abs(std::log2(f)) / F.beta : std::numeric_limits<double>::infinity());
            if (nu.prob(c, z) > 0.0) g += nu.prob(c, z) * std::log2(f);
          }
        r.g_bits = g / F.beta;
        r.k_inf = k;
        r.n_qef = qpe::n_min_qef(r.g_bits, F.beta, mo.budget);
        r.n_eat_F = qpe::n_min_eat_from_ee(r.g_bits, k, nu.num_c(), mo.budget);
        rows.push_back(r);
      } else {
        if (mt_family.empty()) throw UsageError("mintrials needs --family or --qef");
        const auto f = qpe::parse_family(mt_family);
        const double imax = mt_imax > 0.0 ? mt_imax : qpe::family_max_chsh(f);
        rows = qpe::mintrials_table(f, qpe::family_grid(f, mt_points, mt_imin, imax), mo);
      }
      std::ofstream file;
      qpe::write_mintrials_csv(open_out(mt_out, file), rows);
    } else if (*cur) {
      std::ofstream file;
      qpe::write_curve_csv(open_out(cur_out, file), qpe::comparison_curve(cur_n, cur_k));
    } else if (*sim) {
      const auto nu = qpe::io::distribution_from_json(load(sim_nu));
      std::mt19937_64 rng(seed);
      std::ofstream file;
      auto& os = open_out(sim_out, file);
      for (const auto& r : qpe::simulate_records(nu, sim_n, rng)) os << qpe::io::record_line(r) << '\n';
    } else if (*run) {
      std::ifstream rin(run_records);
      if (!rin) throw UsageError("cannot open " + run_records);
      const auto records = qpe::io::read_records(rin);
      json in = load(run_qef);
      if (in.contains("qef")) in = in["qef"];
      const auto F = qpe::io::trial_function_from_json(in);
      pp.beta = F.beta;
      pp.c_bits = F.c_bits;
      pp.extractor = run_extractor == "tmps" ? qpe::ExtractorKind::tmps_constraints_only : qpe::ExtractorKind::toeplitz;
      pp.k_i = run_k_i >= 0.0 ? run_k_i : std::ceil(qpe::ProtocolParams::min_k_i(pp.k_o, pp.epsilon_x));
      const auto kind = run_protocol == 1   ? qpe::ProtocolRunner::Kind::one
                        : run_protocol == 2 ? qpe::ProtocolRunner::Kind::two
                                            : qpe::ProtocolRunner::Kind::three;
      auto seed_bits = load_bits(run_seed_hex, run_seed_file);
      if (seed_bits.empty()) {
        std::mt19937_64 rng(seed);
        seed_bits = qpe::random_bits(qpe::protocol_seed_length(kind, pp), rng);
      } else if (pp.extractor == qpe::ExtractorKind::toeplitz) {
        const auto need = static_cast<size_t>(qpe::protocol_seed_length(kind, pp));
        if (seed_bits.size() < need) throw UsageError("seed needs at least " + std::to_string(need) + " bits");
        seed_bits.resize(need);
      }
      qpe::ProtocolResult res;
      if (run_protocol == 2) {
        auto bank = load_bits(run_bank_hex, run_bank_file);
        if (static_cast<long long>(bank.size()) < pp.k_o) throw UsageError("protocol 2 needs a bank of at least k_o bits");
        res = qpe::run_protocol2(records, {F}, pp, seed_bits, bank);
      } else if (run_protocol == 1) {
        res = qpe::run_protocol1(records, {F}, pp, seed_bits);
      } else {
        res = qpe::run_protocol3(records, {F}, pp, seed_bits);
      }
      json j = qpe::io::to_json(res);
      j["protocol"] = run_protocol;
      j["k_i"] = pp.k_i;
      emit(run_out, j);
      std::fprintf(stderr, "success=%d bits=%zu log2_qef=%.6f\n", res.success ? 1 : 0, res.output.size(),
                   res.log2_qef());
    } else if (*exp) {
      json in = load(exp_b);
      const auto B = qpe::io::trial_function_from_json(in);
      double bbar = exp_bbar;
      if (!exp_nu.empty()) {
        const auto nu = qpe::io::distribution_from_json(load(exp_nu));
        bbar = 0.0;
        for (int z = 0; z < nu.num_z(); ++z)
          for (int c = 0; c < nu.num_c(); ++c) bbar += nu.prob(c, z) * B(c, z);
      }
      if (!(bbar > 0.0 && bbar < 1.0)) throw UsageError("b_bar must lie in (0, 1); pass --bbar or --nu");
      std::ofstream file;
      auto& os = open_out(exp_out, file);
      os << "r,input_entropy,d,d_prime,beta,g_lower,c,c_prime\n";
      for (double r : exp_r) {
        const auto s = qpe::spot_check_scheme(B, r, exp_z0, bbar);
        const auto probe = qpe::expansion_rate(s, 1e-300);
        const double beta = probe.d * r;
        const auto e = qpe::expansion_rate(s, beta);
        const auto sch = qpe::expansion_schedule(s, std::log(2.0 / (exp_eps * exp_eps)));
        os << r << ',' << s.input_entropy() << ',' << e.d << ',' << e.d_prime << ',' << beta << ',' << e.g_lower << ','
           << sch.c << ',' << sch.c_prime << '\n';
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const qpe::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
