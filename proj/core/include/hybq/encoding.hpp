#pragma once

#include <Eigen/Dense>

#include "hybq/operators.hpp"
#include "hybq/spin_register.hpp"

namespace hybq {

// Each logical qubit lives on a triple of spins, total spin 1/2, Sz = -1/2.
// With the first two spins of the triple forming the "paired" doublet:
//   |0>_L = (|ud> - |du>)/sqrt(2) (x) |d>
//   |1>_L = sqrt(1/3) (|ud> + |du>)/sqrt(2) (x) |d> - sqrt(2/3) |dd> (x) |u>
// Two qubits on spins (0,1,2) and (3,4,5) give four codewords inside the
// n_up = 2 sector of six spins (dimension 15).
struct LogicalEncoding {
  SzBlock block;    // sz_block(6,2) or full_space(6)
  MatrixXcd basis;  // dim x 4, orthonormal; column order |00>,|01>,|10>,|11>
};

// Logical kets for one triple (a,b,c), pairing (a,b), over `block`.
VectorXcd logical_ket(const SzBlock& block, int a, int b, int c, int value);

LogicalEncoding two_qubit_encoding(const SzBlock& block);

// 4x4 projection B^dag U B of a register unitary onto the codespace.
MatrixXcd logical_block(const LogicalEncoding& enc, const MatrixXcd& u);

// B^dag (U_seq B) without forming U_seq: each pulse is applied to the four
// encoded columns directly. Equal to logical_block(enc, sequence_unitary(...))
// and cheap enough for optimizer inner loops.
MatrixXcd sequence_logical_block(const LogicalEncoding& enc, const GateSequence& seq);

// Population escaping the codespace, 1 - ||m||_F^2 / 4; zero iff the block
// is exactly unitary.
double leakage(const MatrixXcd& m);

// Local invariants of a two-qubit unitary (Makhlin). With the magic basis Q,
// m = (Q^dag U Q)^T (Q^dag U Q):
//   G1 = tr(m)^2 / (16 det U),   G2 = (tr(m)^2 - tr(m^2)) / (4 det U).
// CNOT class: (0, 1). Identity: (1, 3). SWAP: (-1, -3). Both are invariant
// under single-qubit rotations on either side.
struct MakhlinInvariants {
  Complex g1{};
  Complex g2{};
};

MakhlinInvariants makhlin_invariants(const MatrixXcd& u4);

// Polar factor W V^dag from the SVD M = W S V^dag: the unitary closest to M
// in Frobenius norm.
MatrixXcd closest_unitary(const MatrixXcd& m);

// Dimensionless distance of the logical block from the CNOT local class:
// |G1|^2 + |G2 - 1|^2 / 9, computed on the closest unitary. Zero exactly on
// gates locally equivalent to CNOT.
double cnot_class_error(const MatrixXcd& m);

MatrixXcd cnot_matrix();

// Global-phase-minimised Frobenius distance to a fixed target:
// sqrt(||M||_F^2 + ||C||_F^2 - 2 |tr(C^dag M)|).
double phase_min_distance(const MatrixXcd& m, const MatrixXcd& target);

}  // namespace hybq
