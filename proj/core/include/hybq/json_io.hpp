#pragma once

#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hybq/dynamics.hpp"
#include "hybq/operators.hpp"
#include "hybq/spin_register.hpp"

namespace hybq {

// Canonical form used for every emitted document and for digests: object keys
// sorted (the default nlohmann storage), two-space indentation, shortest
// round-trip doubles. Byte-stable for identical logical content.
std::string canonical_dump(const nlohmann::json& j);

// sha256 of the canonical form, prefixed "sha256:".
std::string json_digest(const nlohmann::json& j);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

nlohmann::json complex_to_json(const Complex& z);  // [re, im]
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const MatrixXcd& m);  // row-major nested [re, im]

// Gate sequences serialize as {"graph", "pulses": [{"edge": [i,j], "tau"}],
// "seed"}; search metadata travels in result documents, not here.
void to_json(nlohmann::json& j, const GateSequence& seq);
void from_json(const nlohmann::json& j, GateSequence& seq);

// Rabi drive input: effective qubit couplings plus drive settings. Frequency
// omitted or zero means drive at the qubit resonance.
struct RabiJob {
  DriveSpec drive;
  Eigen::Vector2cd initial{1.0, 0.0};
};

RabiJob rabi_job_from_json(const nlohmann::json& j);

struct RunManifest {
  std::string subcommand;
  std::string config_digest;
  std::string tool_version;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;  // informational; excluded from result documents
};

void to_json(nlohmann::json& j, const RunManifest& m);

}  // namespace hybq
