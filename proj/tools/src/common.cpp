#include "common.hpp"

#include <fstream>

#include "hybq/errors.hpp"
#include "hybq/schema.hpp"
#include "hybq/version.hpp"

namespace hybq::cli {

ConnectivityGraph load_graph(const std::string& spec) {
  for (const char* alias : {"d", "e", "f", "hybrid_linear", "triple_dot_linear", "hybrid_alt"}) {
    if (spec == alias) return graph_preset(spec);
  }
  const nlohmann::json j = read_json_file(spec);
  validate_with_named_schema(j, "connectivity_graph");
  ConnectivityGraph g;
  g.name = j.at("name").get<std::string>();
  g.n_spins = j.at("n_spins").get<int>();
  for (const auto& e : j.at("edges")) {
    int a = e[0].get<int>(), b = e[1].get<int>();
    if (a > b) std::swap(a, b);
    g.edges.emplace_back(a, b);
  }
  g.validate();
  return g;
}

HubbardParams load_params(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  validate_with_named_schema(j, "hubbard_params");
  return j.get<HubbardParams>();
}

GateSequence load_sequence(const std::filesystem::path& path) {
  const nlohmann::json j = read_json_file(path);
  validate_with_named_schema(j, "gate_sequence");
  return j.get<GateSequence>();
}

RunEmitter::RunEmitter(const GlobalOpts& global, std::string subcommand,
                       nlohmann::json resolved_config)
    : global_(global),
      subcommand_(std::move(subcommand)),
      digest_(json_digest(resolved_config)),
      start_(std::chrono::steady_clock::now()) {
  std::filesystem::create_directories(global_.out_dir);
}

std::filesystem::path RunEmitter::out_path(const std::string& name) const {
  return std::filesystem::path(global_.out_dir) / name;
}

void RunEmitter::add_json(const std::string& name, const nlohmann::json& doc,
                          const std::string& schema_name) {
  validate_with_named_schema(doc, schema_name);
  write_json_file(out_path(name), doc);
  outputs_.push_back(name);
}

void RunEmitter::add_text(const std::string& name, const std::string& content) {
  std::ofstream out(out_path(name), std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot write " + out_path(name).string());
  out << content;
  outputs_.push_back(name);
}

void RunEmitter::finish() {
  RunManifest m;
  m.subcommand = subcommand_;
  m.config_digest = digest_;
  m.tool_version = kToolVersion;
  m.seed = global_.seed;
  m.outputs = outputs_;
  m.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  nlohmann::json j = m;
  validate_with_named_schema(j, "manifest");
  write_json_file(out_path("manifest.json"), j);
}

}  // namespace hybq::cli
