#pragma once

#include "qpe/certify.hpp"
#include "qpe/extractor.hpp"
#include "qpe/models.hpp"
#include "qpe/protocols.hpp"
#include "qpe/qef.hpp"
#include "qpe/trial_function.hpp"

#include <json.hpp>

#include <istream>
#include <string>
#include <vector>

namespace qpe::io {

using nlohmann::json;

json to_json(const TrialDistribution& nu);
TrialDistribution distribution_from_json(const json& j);

// {"beta":…, "domain":["c_bits","z_bits","t_bit?"], "values":[[c,z,(t),v],…]}
json to_json(const TrialFunction& F);
TrialFunction trial_function_from_json(const json& j);

json to_json(const CertificationResult& r);
json to_json(const ProtocolResult& r);

// One {"c":int,"z":int} object per line; blank lines are skipped.
std::vector<Record> read_records(std::istream& is);
std::string record_line(const Record& r);

// Hex digits, most significant bit of each digit first.
Bits bits_from_hex(const std::string& hex);
std::string bits_to_hex(const Bits& bits);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

std::string role_name(TrialRole r);
TrialRole parse_role(const std::string& s);

}  // namespace qpe::io
