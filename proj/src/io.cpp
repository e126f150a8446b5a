#include "qpe/io.hpp"

#include <cctype>
#include <fstream>
#include <stdexcept>

namespace qpe::io {

json to_json(const TrialDistribution& nu) {
  json j;
  j["c_bits"] = nu.c_bits;
  j["z_bits"] = nu.z_bits;
  j["tag"] = nu.tag;
  json p = json::array();
  for (int z = 0; z < nu.num_z(); ++z)
    for (int c = 0; c < nu.num_c(); ++c) p.push_back({c, z, nu.prob(c, z)});
  j["probs"] = p;
  return j;
}

TrialDistribution distribution_from_json(const json& j) {
  const int cb = j.at("c_bits").get<int>(), zb = j.at("z_bits").get<int>();
  if (cb < 1 || cb > 3 || zb < 1 || zb > 3) throw DomainError("distribution: bit widths must be in 1..3");
  std::vector<double> p(static_cast<size_t>((1 << cb) * (1 << zb)), 0.0);
  for (const auto& e : j.at("probs")) {
    const int c = e.at(0).get<int>(), z = e.at(1).get<int>();
    if (c < 0 || c >= (1 << cb) || z < 0 || z >= (1 << zb)) throw DomainError("distribution: entry out of range");
    p[static_cast<size_t>(z * (1 << cb) + c)] = e.at(2).get<double>();
  }
  TrialDistribution nu(cb, zb, std::move(p), j.value("tag", std::string{}));
  nu.validate(1e-9);
  return nu;
}

std::string role_name(TrialRole r) {
  switch (r) {
    case TrialRole::qef:
      return "qef";
    case TrialRole::qefp:
      return "qefp";
    case TrialRole::pef:
      return "pef";
    case TrialRole::candidate:
      return "candidate";
    case TrialRole::estimator:
      return "estimator";
  }
  return "candidate";
}

TrialRole parse_role(const std::string& s) {
  if (s == "qef") return TrialRole::qef;
  if (s == "qefp") return TrialRole::qefp;
  if (s == "pef") return TrialRole::pef;
  if (s == "estimator") return TrialRole::estimator;
  if (s == "candidate") return TrialRole::candidate;
  throw DomainError("unknown trial function role: " + s);
}

json to_json(const TrialFunction& F) {
  json j;
  j["beta"] = F.beta;
  j["role"] = role_name(F.role);
  j["domain"] = F.has_t ? json{F.c_bits, F.z_bits, 1} : json{F.c_bits, F.z_bits};
  json v = json::array();
  for (int t = 0; t < F.num_t(); ++t)
    for (int z = 0; z < F.num_z(); ++z)
      for (int c = 0; c < F.num_c(); ++c) {
        if (F.has_t)
          v.push_back({c, z, t, F(c, z, t)});
        else
          v.push_back({c, z, F(c, z)});
      }
  j["values"] = v;
  return j;
}

TrialFunction trial_function_from_json(const json& j) {
  const auto& d = j.at("domain");
  if (d.size() < 2 || d.size() > 3) throw DomainError("trial function: domain must list 2 or 3 widths");
  const int cb = d.at(0).get<int>(), zb = d.at(1).get<int>();
  const bool has_t = d.size() == 3;
  if (cb < 1 || cb > 3 || zb < 1 || zb > 3) throw DomainError("trial function: bit widths must be in 1..3");
  const size_t n = static_cast<size_t>((1 << cb) * (1 << zb) * (has_t ? 2 : 1));
  TrialFunction F(cb, zb, j.at("beta").get<double>(), std::vector<double>(n, 0.0),
                  parse_role(j.value("role", std::string("candidate"))), has_t);
  for (const auto& e : j.at("values")) {
    const int c = e.at(0).get<int>(), z = e.at(1).get<int>();
    const int t = has_t ? e.at(2).get<int>() : 0;
    const double v = e.at(has_t ? 3 : 2).get<double>();
    if (c < 0 || c >= F.num_c() || z < 0 || z >= F.num_z() || t < 0 || t >= F.num_t())
      throw DomainError("trial function: entry out of range");
    F.at(c, z, t) = v;
  }
  return F;
}

json to_json(const CertificationResult& r) {
  json j;
  j["beta"] = r.beta;
  j["f_lower"] = r.f_lower;
  j["f_upper"] = r.f_upper;
  j["gap"] = r.gap();
  j["witness_theta"] = r.witness_theta;
  j["regions"] = r.regions;
  j["vertices"] = r.vertices;
  j["gap_flag"] = r.gap_flag;
  return j;
}

json to_json(const ProtocolResult& r) {
  json j;
  j["success"] = r.success;
  j["output"] = bits_to_hex(r.output);
  j["output_bits"] = r.output.size();
  j["seed"] = bits_to_hex(r.seed);
  j["log_qef"] = r.log_qef;
  j["log2_qef"] = r.log2_qef();
  j["log_f_min"] = r.log_f_min;
  j["trials"] = r.trials;
  j["threshold_trial"] = r.threshold_trial;
  j["banked_bits_used"] = r.banked_bits_used;
  j["extracted"] = r.extracted;
  j["diagnostic"] = r.diagnostic;
  return j;
}

std::vector<Record> read_records(std::istream& is) {
  std::vector<Record> out;
  std::string line;
  long long lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      out.emplace_back(j.at("c").get<int>(), j.at("z").get<int>());
    } catch (const json::exception& e) {
      throw DomainError("records line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::string record_line(const Record& r) { return json{{"c", r.first}, {"z", r.second}}.dump(); }

Bits bits_from_hex(const std::string& hex) {
  Bits out;
  out.reserve(hex.size() * 4);
  for (char ch : hex) {
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    int v;
    if (ch >= '0' && ch <= '9')
      v = ch - '0';
    else if (ch >= 'a' && ch <= 'f')
      v = ch - 'a' + 10;
    else if (ch >= 'A' && ch <= 'F')
      v = ch - 'A' + 10;
    else
      throw DomainError(std::string("invalid hex digit '") + ch + "'");
    for (int b = 3; b >= 0; --b) out.push_back(static_cast<std::uint8_t>((v >> b) & 1));
  }
  return out;
}

std::string bits_to_hex(const Bits& bits) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (size_t b = 0; b < 4; ++b) v = (v << 1) | (i + b < bits.size() ? bits[i + b] : 0);
    out.push_back(digits[v]);
  }
  return out;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace qpe::io
