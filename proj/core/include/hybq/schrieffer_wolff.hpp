#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hybq/constants.hpp"
#include "hybq/hubbard.hpp"
#include "hybq/operators.hpp"

namespace hybq {

// Anti-Hermitian generator iS with <n|iS|m> = <n|T|m> / (u_n - u_m) between
// eigenstates of the block-diagonal part U, zero within a charge block.
// u_eigenvectors columns are U's eigenbasis (phase-fixed, block by block);
// block_of[i] labels the charge block of eigenstate i.
struct SWGenerator {
  ManyBodyOperator i_s;
  Eigen::VectorXd u_eigenvalues;
  MatrixXcd u_eigenvectors;
  std::vector<int> block_of;
};

// Throws NearDegeneracyError when |u_n - u_m| < floor for a pair actually
// coupled by T (elements of T below numerical noise are treated as zero).
SWGenerator sw_generator(const ManyBodyOperator& u, const ManyBodyOperator& t,
                         double degeneracy_floor = kDegeneracyFloorMeV);

// The commutator [iS, T]; its second-order matrix elements between U
// eigenstates k, k' read sum_m T_km T_mk' (1/(u_k-u_m) + 1/(u_k'-u_m)).
ManyBodyOperator second_order_block(const SWGenerator& gen, const ManyBodyOperator& t);

struct EffectiveCouplings {
  double j1 = 0.0;  // 2 t^2 / (E_S^R - E_S^L)
  double j2 = 0.0;  // 2 t^2 / (E_S^R - E_T^L)
  double jp = 0.0;  // (j1 + j2) / 2, exact
  double t = 0.0;   // the common tunneling energy used
  std::vector<std::string> warnings;
};

// Requires the detuning regime (both denominators positive); throws
// RegimeError otherwise. Unequal inter-dot tunneling entries produce a
// warning and the L1-R1 element is used.
EffectiveCouplings effective_couplings(const HubbardParams& p);

struct EffectiveQubit {
  double j1 = 0.0;
  double j2 = 0.0;
  double jp = 0.0;
  double e_st_l = 0.0;
  Eigen::Matrix2cd h2;  // [[-j1, sqrt(3/2) jp], [sqrt(3/2) jp, e_st_l - 1.5 (j1+j2)]]

  double gap() const;              // meV
  double resonance_ghz() const;    // gap expressed as a frequency
};

EffectiveQubit effective_hamiltonian_analytic(const HubbardParams& p);

// Assembles the 2x2 from explicitly supplied couplings (file input path).
EffectiveQubit make_effective_qubit(double j1, double j2, double jp, double e_st_l);

// Builds an EffectiveQubit from an explicit 2x2 (used by the numeric pipeline
// and by file input for the dynamics tool). h must be Hermitian.
EffectiveQubit qubit_from_matrix(const Eigen::Matrix2cd& h);

// The doublet pair spanning the qubit: |0> = left-singlet x right-down spin,
// |1> = the S=1/2, Sz=-1/2 combination of left-triplet x right spin.
struct LogicalStates {
  FockBasisPtr basis;
  VectorXcd ket0;
  VectorXcd ket1;
};

LogicalStates logical_states(const FockBasisPtr& basis);

struct NumericEffective {
  Eigen::Matrix2cd h2;     // U-part of <0|H|0> pinned to zero
  double u_pin = 0.0;      // the subtracted constant
  double j1_numeric = 0.0; // -h2(0,0)
  double jp_numeric = 0.0; // |h2(0,1)| / sqrt(3/2)
};

// Effective 2x2 from the restricted-basis pipeline: charge blocks (2,1) and
// (1,2) only, H_eff = U + (1/2)[iS, T] projected on the logical pair. The
// factor 1/2 is the consistent second-order weight: with [iS, U] = -T the
// transformed Hamiltonian is U + [iS,T] - (1/2)[iS,T] + O(t^3), and only
// this normalization reproduces exact-diagonalization levels to O(t^3).
NumericEffective effective_hamiltonian_numeric(const HubbardParams& p,
                                               bool include_u1 = true);

// Sorted eigenvalues of the full (8 modes, 3 electrons) Hamiltonian within a
// total-spin sector.
Eigen::VectorXd ed_sector_levels(const HubbardParams& p, int twice_s, int twice_sz);

// Gap between the two lowest S=1/2, Sz=-1/2 levels of the full Hamiltonian.
double ed_reference_gap(const HubbardParams& p);

struct ConvergencePoint {
  double t = 0.0;
  double ed_gap = 0.0;
  double analytic_gap = 0.0;
  double numeric_gap = 0.0;
  double analytic_error = 0.0;  // |analytic - ed|
  double numeric_error = 0.0;   // |numeric - ed|
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  double analytic_exponent = 0.0;  // log-log slope of analytic_error vs t
  double numeric_exponent = 0.0;
  double delta = 0.0;              // gap scale used to convert ratios to t
};

// Sweeps the common tunneling energy over t = ratio * delta with
// delta = E_S^R - E_T^L of `base` (whose own tun entries are ignored).
ConvergenceStudy convergence_study(const HubbardParams& base,
                                   const std::vector<double>& ratios);

// Least-squares slope of ln(y) against ln(x); pairs with y <= 0 are skipped.
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace hybq
