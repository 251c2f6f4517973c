#include "hybq/spin_register.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "hybq/constants.hpp"
#include "hybq/errors.hpp"

namespace hybq {

SzBlock sz_block(int n_spins, int n_up) {
  if (n_spins < 1 || n_spins > 20) throw ValidationError("sz_block: n_spins out of range");
  if (n_up < 0 || n_up > n_spins) throw ValidationError("sz_block: n_up out of range");
  SzBlock b;
  b.n_spins = n_spins;
  b.n_up = n_up;
  b.index_of_mask.assign(std::size_t{1} << n_spins, -1);
  for (std::uint32_t m = 0; m < (1u << n_spins); ++m) {
    if (std::popcount(m) == n_up) {
      b.index_of_mask[m] = static_cast<int>(b.masks.size());
      b.masks.push_back(m);
    }
  }
  return b;
}

SzBlock full_space(int n_spins) {
  if (n_spins < 1 || n_spins > 20) throw ValidationError("full_space: n_spins out of range");
  SzBlock b;
  b.n_spins = n_spins;
  b.n_up = -1;
  b.masks.resize(std::size_t{1} << n_spins);
  b.index_of_mask.resize(std::size_t{1} << n_spins);
  for (std::uint32_t m = 0; m < (1u << n_spins); ++m) {
    b.masks[m] = m;
    b.index_of_mask[m] = static_cast<int>(m);
  }
  return b;
}

namespace {

void check_pair(const SzBlock& block, int i, int j, const char* who) {
  if (i == j || i < 0 || j < 0 || i >= block.n_spins || j >= block.n_spins)
    throw ValidationError(std::string(who) + ": bad spin pair");
}

}  // namespace

MatrixXcd heisenberg_coupling(const SzBlock& block, int i, int j) {
  check_pair(block, i, j, "heisenberg_coupling");
  const int d = block.dim();
  MatrixXcd h = MatrixXcd::Zero(d, d);
  const std::uint32_t bi = 1u << i, bj = 1u << j;
  for (int col = 0; col < d; ++col) {
    const std::uint32_t m = block.masks[col];
    const bool ui = m & bi, uj = m & bj;
    if (ui == uj) {
      h(col, col) += 0.25;  // Sz Sz, aligned
    } else {
      h(col, col) -= 0.25;
      const std::uint32_t flipped = m ^ bi ^ bj;  // (S+S- + S-S+)/2
      const int row = block.index_of_mask[flipped];
      h(row, col) += 0.5;
    }
  }
  return h;
}

MatrixXcd exchange_unitary(const SzBlock& block, int i, int j, double tau) {
  check_pair(block, i, j, "exchange_unitary");
  if (!std::isfinite(tau)) throw ValidationError("exchange_unitary: tau not finite");
  const int d = block.dim();
  const Complex phase = std::exp(Complex(0.0, kPi * tau / 2.0));
  const Complex diag = phase * std::cos(kPi * tau);
  const Complex swap = phase * Complex(0.0, -1.0) * std::sin(kPi * tau);
  MatrixXcd u = MatrixXcd::Zero(d, d);
  const std::uint32_t bi = 1u << i, bj = 1u << j;
  for (int col = 0; col < d; ++col) {
    const std::uint32_t m = block.masks[col];
    const bool ui = m & bi, uj = m & bj;
    if (ui == uj) {
      u(col, col) = diag + swap;  // SWAP acts as identity on aligned spins
    } else {
      u(col, col) = diag;
      u(block.index_of_mask[m ^ bi ^ bj], col) = swap;
    }
  }
  return u;
}

MatrixXcd block_s_squared(const SzBlock& block) {
  const int d = block.dim();
  const int n = block.n_spins;
  MatrixXcd s2 = MatrixXcd::Zero(d, d);
  // S^2 = sum_i S_i^2 + 2 sum_{i<j} S_i.S_j, with S_i^2 = 3/4.
  for (int col = 0; col < d; ++col) s2(col, col) = 0.75 * n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s2 += 2.0 * heisenberg_coupling(block, i, j);
  return s2;
}

void ConnectivityGraph::validate() const {
  if (n_spins < 2) throw ValidationError("graph: needs at least two spins");
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n_spins || j >= n_spins || i >= j)
      throw ValidationError("graph '" + name + "': edge (" + std::to_string(i) + "," +
                            std::to_string(j) + ") invalid (want 0 <= i < j < n)");
  }
  for (std::size_t a = 0; a < edges.size(); ++a)
    for (std::size_t b = a + 1; b < edges.size(); ++b)
      if (edges[a] == edges[b]) throw ValidationError("graph '" + name + "': duplicate edge");
}

bool ConnectivityGraph::has_edge(int i, int j) const {
  if (i > j) std::swap(i, j);
  return std::find(edges.begin(), edges.end(), std::make_pair(i, j)) != edges.end();
}

ConnectivityGraph hybrid_linear_graph() {
  // Dots in a row: [0 1] [2] [3 4] [5]. Intra-dot pair (0,1) and (3,4);
  // neighbouring dots couple every resident pair.
  return {"hybrid_linear", 6, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {2, 4}, {3, 4}, {3, 5}, {4, 5}}};
}

ConnectivityGraph triple_dot_linear_graph() {
  return {"triple_dot_linear", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}}};
}

ConnectivityGraph hybrid_alt_graph() {
  // Dots in a row: [2] [0 1] [5] [3 4].
  return {"hybrid_alt", 6, {{0, 1}, {0, 2}, {1, 2}, {0, 5}, {1, 5}, {3, 5}, {4, 5}, {3, 4}}};
}

ConnectivityGraph graph_preset(const std::string& name) {
  if (name == "hybrid_linear" || name == "d") return hybrid_linear_graph();
  if (name == "triple_dot_linear" || name == "e") return triple_dot_linear_graph();
  if (name == "hybrid_alt" || name == "f") return hybrid_alt_graph();
  throw ValidationError("unknown graph preset '" + name + "'");
}

void GateSequence::validate(const ConnectivityGraph& g) const {
  g.validate();
  for (const Pulse& p : pulses) {
    if (!g.has_edge(p.i, p.j))
      throw ValidationError("sequence uses edge (" + std::to_string(p.i) + "," +
                            std::to_string(p.j) + ") absent from graph '" + g.name + "'");
    if (!std::isfinite(p.tau)) throw ValidationError("sequence: tau not finite");
  }
}

MatrixXcd sequence_unitary(const SzBlock& block, const GateSequence& seq) {
  MatrixXcd u = MatrixXcd::Identity(block.dim(), block.dim());
  for (const Pulse& p : seq.pulses) u = exchange_unitary(block, p.i, p.j, p.tau) * u;
  return u;
}

void apply_exchange_inplace(const SzBlock& block, int i, int j, double tau, MatrixXcd& columns) {
  check_pair(block, i, j, "apply_exchange_inplace");
  if (columns.rows() != block.dim())
    throw ValidationError("apply_exchange_inplace: column dimension mismatch");
  const Complex phase = std::exp(Complex(0.0, kPi * tau / 2.0));
  const Complex diag = phase * std::cos(kPi * tau);
  const Complex swap = phase * Complex(0.0, -1.0) * std::sin(kPi * tau);
  const Complex aligned = diag + swap;
  const std::uint32_t bi = 1u << i, bj = 1u << j;
  const int d = block.dim();
  for (int row = 0; row < d; ++row) {
    const std::uint32_t m = block.masks[row];
    const bool ui = m & bi, uj = m & bj;
    if (ui == uj) {
      columns.row(row) *= aligned;
    } else if (ui && !uj) {  // visit each (up-down, down-up) pair once
      const int partner = block.index_of_mask[m ^ bi ^ bj];
      for (int c = 0; c < columns.cols(); ++c) {
        const Complex a = columns(row, c), b = columns(partner, c);
        columns(row, c) = diag * a + swap * b;
        columns(partner, c) = diag * b + swap * a;
      }
    }
  }
}

int greedy_time_steps(const GateSequence& seq) {
  int steps = 0;
  std::uint32_t busy = ~0u;
  for (const Pulse& p : seq.pulses) {
    const std::uint32_t need = (1u << p.i) | (1u << p.j);
    if (busy & need) {
      ++steps;
      busy = need;
    } else {
      busy |= need;
    }
  }
  return steps;
}

}  // namespace hybq
