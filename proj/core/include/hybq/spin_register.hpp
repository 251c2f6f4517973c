#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hybq/operators.hpp"

namespace hybq {

// Register of n spin-1/2 sites. Basis states are bitmasks with bit k set when
// spin k points up; the full space has dimension 2^n. Exchange interactions
// conserve total Sz, so most work happens inside one Sz block.
struct SzBlock {
  int n_spins = 0;
  int n_up = 0;                      // twice_sz = 2*n_up - n_spins
  std::vector<std::uint32_t> masks;  // ascending
  std::vector<int> index_of_mask;    // 2^n lookup, -1 outside the block

  int dim() const { return static_cast<int>(masks.size()); }
  int twice_sz() const { return 2 * n_up - n_spins; }
};

SzBlock sz_block(int n_spins, int n_up);

// S_i . S_j in units of hbar^2, acting on a block (or the full space when
// built from full_space(n)). Eigenvalues are 1/4 (triplet) and -3/4 (singlet).
MatrixXcd heisenberg_coupling(const SzBlock& block, int i, int j);

// exp(-i 2 pi tau S_i.S_j / hbar^2); tau is the pulse duration in units of
// h/J. Closed form: S.S = SWAP/2 - 1/4, so
//   U(tau) = e^{i pi tau / 2} (cos(pi tau) I - i sin(pi tau) SWAP_ij).
// tau = 1/4 gives sqrt(SWAP), 1/2 gives SWAP, 1 the identity (up to phase).
MatrixXcd exchange_unitary(const SzBlock& block, int i, int j, double tau);

// Full 2^n space as a degenerate "block" (n_up < 0 marks it); used by the
// verification route that avoids block bookkeeping entirely.
SzBlock full_space(int n_spins);

// Total-spin squared over the block, units hbar^2.
MatrixXcd block_s_squared(const SzBlock& block);

struct ConnectivityGraph {
  std::string name;
  int n_spins = 0;
  std::vector<std::pair<int, int>> edges;  // 0-based, i < j

  void validate() const;
  bool has_edge(int i, int j) const;
};

// Presets for two encoded qubits on six spins. Qubit A uses spins (0,1,2)
// and qubit B spins (3,4,5); in each triple the first two live in a shared
// dot (their exchange is always available) except on the six-dot chain.
//
//   hybrid_linear:     dots [01][2][34][5] in a row -> 8 couplings
//   triple_dot_linear: six dots in a row            -> 5 couplings
//   hybrid_alt:        dots [2][01][5][34] in a row -> 8 couplings
ConnectivityGraph hybrid_linear_graph();
ConnectivityGraph triple_dot_linear_graph();
ConnectivityGraph hybrid_alt_graph();
ConnectivityGraph graph_preset(const std::string& name);  // accepts d/e/f aliases

struct Pulse {
  int i = 0;
  int j = 0;
  double tau = 0.0;  // canonical range [0, 1)
};

struct GateSequence {
  std::string graph;  // preset name or "custom"
  std::vector<Pulse> pulses;
  std::uint64_t seed = 0;
  // Search metadata, carried along when known (absent on hand-written input).
  int time_steps = 0;
  double objective_value = 0.0;

  void validate(const ConnectivityGraph& g) const;
};

// Product U_k ... U_2 U_1 (pulse 0 applied first) on the given block.
MatrixXcd sequence_unitary(const SzBlock& block, const GateSequence& seq);

// In-place U(tau) on a set of column vectors; O(dim) per pulse per column
// instead of a dim x dim product. Same result as multiplying by
// exchange_unitary (cross-checked in tests).
void apply_exchange_inplace(const SzBlock& block, int i, int j, double tau, MatrixXcd& columns);

// Minimal number of layers when consecutive pulses sharing no spin may run
// in parallel; greedy in sequence order (reported, not asserted optimal).
int greedy_time_steps(const GateSequence& seq);

}  // namespace hybq
