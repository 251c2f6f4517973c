#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "hybq/hubbard.hpp"
#include "hybq/json_io.hpp"
#include "hybq/spin_register.hpp"

namespace hybq::cli {

// Process exit codes (stable contract).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitRegime = 3;
inline constexpr int kExitSearchFailed = 4;

struct GlobalOpts {
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency; HYBQ_THREADS overrides the default
};

// Preset alias or a JSON file {"name", "n_spins", "edges": [[i,j], ...]}.
ConnectivityGraph load_graph(const std::string& spec);

// Reads, schema-validates and semantically validates a parameter file.
HubbardParams load_params(const std::filesystem::path& path);

// Reads and schema-validates a gate-sequence file.
GateSequence load_sequence(const std::filesystem::path& path);

// Collects output files for one run, then writes manifest.json with the
// config digest and wall time. Result documents are validated against their
// schema before writing and contain no timing data, so identically
// configured runs emit byte-identical results.
class RunEmitter {
 public:
  RunEmitter(const GlobalOpts& global, std::string subcommand, nlohmann::json resolved_config);

  std::filesystem::path out_path(const std::string& name) const;
  void add_json(const std::string& name, const nlohmann::json& doc,
                const std::string& schema_name);
  void add_text(const std::string& name, const std::string& content);
  void finish();

 private:
  const GlobalOpts& global_;
  std::string subcommand_;
  std::string digest_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace hybq::cli
