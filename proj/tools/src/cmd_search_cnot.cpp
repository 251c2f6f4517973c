#include <iostream>

#include "commands.hpp"
#include "hybq/encoding.hpp"
#include "hybq/errors.hpp"

namespace hybq::cli {

namespace {

std::vector<std::pair<int, int>> load_template(const std::string& path,
                                               const ConnectivityGraph& g) {
  const nlohmann::json j = read_json_file(path);
  if (!j.is_array() || j.empty())
    throw ValidationError("template file must hold a non-empty array of [i, j] edges");
  std::vector<std::pair<int, int>> tmpl;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2)
      throw ValidationError("template entries must be [i, j] pairs");
    int a = e[0].get<int>(), b = e[1].get<int>();
    if (a > b) std::swap(a, b);
    if (!g.has_edge(a, b))
      throw ValidationError("template edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") absent from graph '" + g.name + "'");
    tmpl.emplace_back(a, b);
  }
  return tmpl;
}

}  // namespace

int run_search_cnot(const SearchArgs& args, const GlobalOpts& global) {
  if (args.target != "class" && args.target != "exact")
    throw ValidationError("--target must be 'class' or 'exact'");
  const ConnectivityGraph graph = load_graph(args.graph);
  if (graph.n_spins != 6)
    throw ValidationError("gate search expects a six-spin graph (two encoded qubits)");

  std::vector<std::pair<int, int>> tmpl;
  if (!args.template_file.empty()) tmpl = load_template(args.template_file, graph);
  const int length = tmpl.empty() ? args.length : static_cast<int>(tmpl.size());
  if (length < 1) throw ValidationError("--length must be positive");

  SearchConfig cfg = args.config;
  cfg.seed = global.seed;
  cfg.threads = global.threads;
  cfg.validate();

  Objective obj;
  obj.target = args.target == "class" ? GateTarget::CNOTClass : GateTarget::ExactCNOT;
  obj.w_leak = args.w_leak;
  obj.w_inv = args.w_inv;

  nlohmann::json graph_json = {{"name", graph.name}, {"n_spins", graph.n_spins}};
  graph_json["edges"] = nlohmann::json::array();
  for (auto [a, b] : graph.edges) graph_json["edges"].push_back({a, b});
  nlohmann::json config_json = {{"subcommand", "search-cnot"},
                                {"graph", graph_json},
                                {"length", length},
                                {"target", args.target},
                                {"seed", cfg.seed},
                                {"restarts", cfg.restarts},
                                {"population_size", cfg.population_size},
                                {"generations", cfg.generations},
                                {"nm_max_iters", cfg.nm_max_iters},
                                {"nm_tolerance", cfg.nm_tolerance},
                                {"nm_polish_period", cfg.nm_polish_period},
                                {"nm_polish_iters", cfg.nm_polish_iters},
                                {"mutation_rate", cfg.mutation_rate},
                                {"crossover_rate", cfg.crossover_rate},
                                {"success_threshold", cfg.success_threshold},
                                {"w_leak", obj.w_leak},
                                {"w_inv", obj.w_inv}};
  if (!tmpl.empty()) {
    config_json["template"] = nlohmann::json::array();
    for (auto [a, b] : tmpl) config_json["template"].push_back({a, b});
  }
  RunEmitter emitter(global, "search-cnot", config_json);

  const SzBlock block = sz_block(6, 2);
  const LogicalEncoding enc = two_qubit_encoding(block);

  std::cerr << "searching " << graph.name << ", length " << length << ", target "
            << args.target << ", seed " << cfg.seed << ", restarts " << cfg.restarts << "\n";
  const SearchOutcome outcome =
      tmpl.empty() ? hybrid_search_random_templates(obj, graph, enc, length, cfg)
                   : hybrid_search(obj, graph, enc, tmpl, cfg);
  std::cerr << "best objective " << outcome.objective << " after " << outcome.restarts_used
            << " restart(s), " << outcome.evaluations << " evaluations\n";

  const MatrixXcd m = sequence_logical_block(enc, outcome.sequence);
  const MakhlinInvariants inv = makhlin_invariants(closest_unitary(m));

  nlohmann::json rational = {{"found", false}};
  if (outcome.success) {
    if (auto snapped = rationalize_sequence(outcome.sequence, graph, enc, obj,
                                            cfg.success_threshold)) {
      rational = {{"found", true},
                  {"objective", snapped->objective_value},
                  {"sequence", nlohmann::json(*snapped)}};
    }
  }

  const nlohmann::json result = {{"graph", graph.name},
                                 {"target", args.target},
                                 {"length", length},
                                 {"seed", cfg.seed},
                                 {"success", outcome.success},
                                 {"objective", outcome.objective},
                                 {"sequence", nlohmann::json(outcome.sequence)},
                                 {"leakage", leakage(m)},
                                 {"invariants",
                                  {{"g1", complex_to_json(inv.g1)},
                                   {"g2", complex_to_json(inv.g2)}}},
                                 {"distance_exact_cnot", phase_min_distance(m, cnot_matrix())},
                                 {"time_steps", outcome.sequence.time_steps},
                                 {"restarts_used", outcome.restarts_used},
                                 {"evaluations", outcome.evaluations},
                                 {"rational", rational}};
  emitter.add_json(args.out_name, result, "search_result");
  emitter.finish();

  std::cout << (outcome.success ? "success" : "no solution within budget") << ": objective "
            << outcome.objective << ", wrote " << emitter.out_path(args.out_name).string()
            << "\n";
  return outcome.success ? kExitOk : kExitSearchFailed;
}

}  // namespace hybq::cli
