#include <iostream>

#include "commands.hpp"
#include "hybq/encoding.hpp"
#include "hybq/errors.hpp"

namespace hybq::cli {

// Verification deliberately avoids the optimizer's fast evaluation route: it
// multiplies dense exchange unitaries in the full 2^6 space and projects at
// the end, so a bug in the block bookkeeping cannot hide itself.
int run_verify_sequence(const VerifyArgs& args, const GlobalOpts& global) {
  const nlohmann::json seq_json = read_json_file(args.sequence_file);
  const GateSequence seq = load_sequence(args.sequence_file);
  const ConnectivityGraph graph =
      load_graph(args.graph_override.empty() ? seq.graph : args.graph_override);
  if (graph.n_spins != 6)
    throw ValidationError("verification expects a six-spin graph (two encoded qubits)");
  seq.validate(graph);

  const nlohmann::json config = {{"subcommand", "verify-sequence"},
                                 {"sequence", seq_json},
                                 {"graph", graph.name},
                                 {"seed", global.seed}};
  RunEmitter emitter(global, "verify-sequence", config);

  const SzBlock full = full_space(6);
  const LogicalEncoding enc = two_qubit_encoding(full);
  const MatrixXcd u = sequence_unitary(full, seq);
  const MatrixXcd m = logical_block(enc, u);

  const double leak = leakage(m);
  const double defect = (m.adjoint() * m - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff();
  const MakhlinInvariants inv = makhlin_invariants(closest_unitary(m));
  const double class_err = cnot_class_error(m);
  const double exact_dist = phase_min_distance(m, cnot_matrix());

  GateSequence counted = seq;
  const nlohmann::json report = {{"graph", graph.name},
                                 {"n_pulses", seq.pulses.size()},
                                 {"time_steps", greedy_time_steps(counted)},
                                 {"leakage", leak},
                                 {"invariants",
                                  {{"g1", complex_to_json(inv.g1)},
                                   {"g2", complex_to_json(inv.g2)}}},
                                 {"cnot_class_error", class_err},
                                 {"distance_exact_cnot", exact_dist},
                                 {"logical_block", matrix_to_json(m)},
                                 {"unitary_defect", defect},
                                 {"route", "full_space"}};
  emitter.add_json(args.out_name, report, "verify_report");
  emitter.finish();

  std::cout << "leakage " << leak << ", G1 = (" << inv.g1.real() << ", " << inv.g1.imag()
            << "), G2 = (" << inv.g2.real() << ", " << inv.g2.imag() << "), |M - CNOT| = "
            << exact_dist << "\nwrote " << emitter.out_path(args.out_name).string() << "\n";
  return kExitOk;
}

}  // namespace hybq::cli
