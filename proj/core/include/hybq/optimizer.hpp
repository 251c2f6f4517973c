#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "hybq/encoding.hpp"
#include "hybq/spin_register.hpp"

namespace hybq {

// Deterministic seed splitting (splitmix64). Every (stream, substream) pair
// owns an independent generator, so the sampled trajectory is a pure function
// of the master seed and never depends on thread scheduling.
std::uint64_t splitmix64_next(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t substream = 0);

class SplitMix {
 public:
  explicit SplitMix(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() { return splitmix64_next(state_); }
  double uniform();        // [0, 1)
  double normal();         // standard normal via Box-Muller
  int uniform_int(int n);  // {0, ..., n-1}

 private:
  std::uint64_t state_;
};

struct SearchConfig {
  int population_size = 64;
  int generations = 400;
  int nm_max_iters = 2000;    // budget of the final polish
  double nm_tolerance = 1e-13;
  double mutation_rate = 0.25;
  double crossover_rate = 0.7;
  std::uint64_t seed = 1;
  int restarts = 1;
  double success_threshold = 1e-8;
  int threads = 0;            // 0 = hardware concurrency
  int nm_polish_period = 25;  // generations between elite polishes (hybrid only)
  int nm_polish_iters = 400;  // polish budget during the run

  void validate() const;
};

using ObjectiveFn = std::function<double(const Eigen::VectorXd&)>;

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  long evaluations = 0;
};

// Simplex search with reflection/expansion/contraction/shrink coefficients
// (1, 2, 0.5, 0.5); stops when the simplex objective spread falls below
// nm_tolerance or nm_max_iters is reached. Never worse than f(x0).
NelderMeadResult nelder_mead(const ObjectiveFn& f, const Eigen::VectorXd& x0,
                             const SearchConfig& cfg, double initial_step = 0.1);

struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool periodic = false;  // wrap instead of clamp after mutation

  Eigen::VectorXd fold(const Eigen::VectorXd& x) const;
};

struct Individual {
  Eigen::VectorXd x;
  double f = 0.0;
};

// Plain GA: tournament-of-two selection, uniform crossover, Gaussian mutation
// with sigma = 0.05 * box width, one elite. Returns the final population
// sorted by objective; fully determined by cfg.seed.
std::vector<Individual> genetic_search(const ObjectiveFn& f, const Box& domain,
                                       const SearchConfig& cfg);

enum class GateTarget { CNOTClass, ExactCNOT };

struct Objective {
  GateTarget target = GateTarget::CNOTClass;
  double w_leak = 1.0;
  double w_inv = 1.0;
};

// w_leak * leakage + w_inv * (|G1|^2 + |G2-1|^2/9) on the logical block;
// zero exactly on leakage-free CNOT-class sequences.
double objective_cnot_class(const GateSequence& seq, const ConnectivityGraph& g,
                            const LogicalEncoding& enc, double w_leak, double w_inv);

// Phase-minimised Frobenius distance to CNOT itself plus w_leak * leakage.
double objective_exact_cnot(const GateSequence& seq, const ConnectivityGraph& g,
                            const LogicalEncoding& enc, double w_leak);

double evaluate_objective(const Objective& obj, const GateSequence& seq,
                          const ConnectivityGraph& g, const LogicalEncoding& enc);

struct SearchOutcome {
  GateSequence sequence;  // best found; taus canonical in [0,1)
  double objective = 0.0;
  bool success = false;
  int restarts_used = 0;
  long evaluations = 0;
};

// GA over tau vectors in [0,1)^L for a fixed edge template, with periodic
// Nelder-Mead polishing of the elite; up to cfg.restarts independently seeded
// attempts, stopping at the first objective < cfg.success_threshold. Running
// out of budget flags the outcome unsuccessful instead of throwing.
//
// For the built-in gate objectives the GA/NM stage is followed by a
// Gauss-Newton refinement on the leakage-plus-invariant residual system;
// see the implementation notes in optimizer.cpp.
SearchOutcome hybrid_search(const Objective& obj, const ConnectivityGraph& graph,
                            const LogicalEncoding& enc,
                            const std::vector<std::pair<int, int>>& pulse_template,
                            const SearchConfig& cfg);

// Same machinery for a user-supplied per-sequence objective (no residual
// refinement; the objective is a black box).
using SequenceObjectiveFn = std::function<double(const GateSequence&)>;
SearchOutcome hybrid_search_custom(const SequenceObjectiveFn& objective,
                                   const ConnectivityGraph& graph,
                                   const std::vector<std::pair<int, int>>& pulse_template,
                                   const SearchConfig& cfg);

// Outer combinatorial layer: each restart draws a fresh random edge template
// of the given length before running one GA+NM attempt on it. For the gate
// objectives, each restart may additionally solve on a longer scratch
// template and contract it back to the requested length (see optimizer.cpp);
// the returned sequence always has exactly `length` pulses.
SearchOutcome hybrid_search_random_templates(const Objective& obj,
                                             const ConnectivityGraph& graph,
                                             const LogicalEncoding& enc, int length,
                                             const SearchConfig& cfg);

// Snap every tau to the nearest p/q with q <= max_denominator, then re-check;
// returns the snapped sequence only if it still meets the threshold.
std::optional<GateSequence> rationalize_sequence(const GateSequence& seq,
                                                 const ConnectivityGraph& g,
                                                 const LogicalEncoding& enc, const Objective& obj,
                                                 double success_threshold,
                                                 int max_denominator = 24);

// Indexed parallel map with per-slot writes; results are identical for every
// thread count, including 1.
void parallel_for_indexed(int n, int threads, const std::function<void(int)>& fn);

}  // namespace hybq
