#include <CLI11.hpp>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "hybq/errors.hpp"
#include "hybq/version.hpp"

using namespace hybq;
using namespace hybq::cli;

int main(int argc, char** argv) {
  CLI::App app{"hybrid double-quantum-dot qubit toolkit"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "Master RNG seed")->capture_default_str();
  app.add_option("--out-dir", global.out_dir, "Directory for result files")
      ->capture_default_str();
  app.add_option("--threads", global.threads, "Worker threads (0 = hardware concurrency)")
      ->envname("HYBQ_THREADS")
      ->capture_default_str();

  std::function<int()> runner;

  auto* derive = app.add_subcommand(
      "derive-effective", "Effective two-level Hamiltonian from Hubbard parameters");
  derive->fallthrough();
  auto derive_args = std::make_shared<DeriveArgs>();
  derive->add_option("params", derive_args->params_file, "Hubbard parameter JSON file")
      ->required();
  derive->add_option("--out", derive_args->out_name, "Report file name")
      ->capture_default_str();
  derive->add_flag("--drop-u1", derive_args->drop_u1,
                   "Drop the inter-dot Coulomb part from the numeric pipeline");
  derive->callback([&runner, derive_args, &global] {
    runner = [derive_args, &global] { return run_derive_effective(*derive_args, global); };
  });

  auto* search =
      app.add_subcommand("search-cnot", "Search for CNOT-class exchange-pulse sequences");
  search->fallthrough();
  auto search_args = std::make_shared<SearchArgs>();
  search->add_option("--graph", search_args->graph,
                     "Graph preset (d, e, f or long names) or a JSON graph file")
      ->capture_default_str();
  search->add_option("--length", search_args->length, "Number of pulses")
      ->capture_default_str();
  search->add_option("--target", search_args->target, "'class' or 'exact'")
      ->capture_default_str();
  search->add_option("--template", search_args->template_file,
                     "JSON array of [i,j] edges fixing the pulse order");
  search->add_option("--out", search_args->out_name, "Result file name")
      ->capture_default_str();
  search->add_option("--restarts", search_args->config.restarts, "Seeded restarts")
      ->capture_default_str();
  search->add_option("--population", search_args->config.population_size, "GA population")
      ->capture_default_str();
  search->add_option("--generations", search_args->config.generations, "GA generations")
      ->capture_default_str();
  search->add_option("--mutation-rate", search_args->config.mutation_rate,
                     "Per-gene mutation probability")
      ->capture_default_str();
  search->add_option("--crossover-rate", search_args->config.crossover_rate,
                     "Crossover probability")
      ->capture_default_str();
  search->add_option("--nm-iters", search_args->config.nm_max_iters,
                     "Final Nelder-Mead polish budget")
      ->capture_default_str();
  search->add_option("--polish-period", search_args->config.nm_polish_period,
                     "Generations between elite polishes")
      ->capture_default_str();
  search->add_option("--polish-iters", search_args->config.nm_polish_iters,
                     "Mid-search polish budget")
      ->capture_default_str();
  search->add_option("--threshold", search_args->config.success_threshold,
                     "Success threshold on the objective")
      ->capture_default_str();
  search->add_option("--w-leak", search_args->w_leak, "Leakage weight")->capture_default_str();
  search->add_option("--w-inv", search_args->w_inv, "Invariant-error weight")
      ->capture_default_str();
  search->callback([&runner, search_args, &global] {
    runner = [search_args, &global] { return run_search_cnot(*search_args, global); };
  });

  auto* verify = app.add_subcommand("verify-sequence",
                                    "Re-evaluate a pulse sequence on the full spin space");
  verify->fallthrough();
  auto verify_args = std::make_shared<VerifyArgs>();
  verify->add_option("sequence", verify_args->sequence_file, "Gate-sequence JSON file")
      ->required();
  verify->add_option("--graph", verify_args->graph_override,
                     "Graph preset or file (overrides the name in the sequence)");
  verify->add_option("--out", verify_args->out_name, "Report file name")
      ->capture_default_str();
  verify->callback([&runner, verify_args, &global] {
    runner = [verify_args, &global] { return run_verify_sequence(*verify_args, global); };
  });

  auto* rabi = app.add_subcommand("simulate-rabi", "Drive the two-level qubit and fit the flop");
  rabi->fallthrough();
  auto rabi_args = std::make_shared<RabiArgs>();
  rabi->add_option("drive", rabi_args->drive_file, "Drive JSON file")->required();
  rabi->add_option("--out", rabi_args->summary_name, "Summary file name")
      ->capture_default_str();
  rabi->add_option("--trace", rabi_args->trace_name, "CSV trace file name")
      ->capture_default_str();
  rabi->callback([&runner, rabi_args, &global] {
    runner = [rabi_args, &global] { return run_simulate_rabi(*rabi_args, global); };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    return runner();
  } catch (const RegimeError& e) {  // includes near-degeneracy aborts
    std::cerr << "error: " << e.what() << "\n";
    return kExitRegime;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
