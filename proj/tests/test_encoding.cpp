#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "hybq/encoding.hpp"
#include "hybq/errors.hpp"
#include "hybq/spin_register.hpp"

using namespace hybq;

namespace {

constexpr double kPiLocal = 3.14159265358979323846;

// Independent invariant oracle with the magic basis written out explicitly.
MakhlinInvariants invariants_oracle(const MatrixXcd& u) {
  const Complex i(0.0, 1.0);
  MatrixXcd q(4, 4);
  q << 1, 0, 0, i,
       0, i, 1, 0,
       0, i, -1, 0,
       1, 0, 0, -i;
  q *= 1.0 / std::sqrt(2.0);
  const MatrixXcd ub = q.adjoint() * u * q;
  const MatrixXcd m = ub.transpose() * ub;
  const Complex tr = m.trace();
  const Complex det = u.determinant();
  return {tr * tr / (16.0 * det), (tr * tr - (m * m).trace()) / (4.0 * det)};
}

MatrixXcd random_su2(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPiLocal);
  const double a = u(rng), b = u(rng), c = u(rng);
  MatrixXcd z(2, 2);
  const Complex i(0.0, 1.0);
  z << std::exp(i * a) * std::cos(c), std::exp(i * b) * std::sin(c),
      -std::exp(-i * b) * std::sin(c), std::exp(-i * a) * std::cos(c);
  return z;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int r = 0; r < a.rows(); ++r)
    for (int c = 0; c < a.cols(); ++c) out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

MatrixXcd swap_matrix() {
  MatrixXcd s = MatrixXcd::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1.0;
  s(1, 2) = s(2, 1) = 1.0;
  return s;
}

}  // namespace

TEST_CASE("codewords are orthonormal spin-doublet states") {
  auto block = sz_block(6, 2);
  auto enc = two_qubit_encoding(block);
  CHECK(enc.basis.rows() == 15);
  CHECK(enc.basis.cols() == 4);
  const MatrixXcd gram = enc.basis.adjoint() * enc.basis;
  CHECK((gram - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  // Every codeword is a product of two total-spin-1/2 triples, so each
  // triple's S^2 (over its three spins) gives 3/4 exactly.
  // S^2 of a triple: sum_i S_i^2 + 2 sum_{i<j} S_i.S_j = (9/4) I + 2 sum.
  auto s2_triple = [&](int a, int b, int c) {
    return (2.0 * (heisenberg_coupling(block, a, b) + heisenberg_coupling(block, a, c) +
                   heisenberg_coupling(block, b, c)) +
            2.25 * MatrixXcd::Identity(block.dim(), block.dim()))
        .eval();
  };
  const MatrixXcd s2a = s2_triple(0, 1, 2);
  const MatrixXcd s2b = s2_triple(3, 4, 5);
  for (int col = 0; col < 4; ++col) {
    const VectorXcd v = enc.basis.col(col);
    CHECK((s2a * v - 0.75 * v).norm() < 1e-12);
    CHECK((s2b * v - 0.75 * v).norm() < 1e-12);
  }
}

TEST_CASE("codewords are products of the single-triple kets") {
  auto full = full_space(6);
  auto enc = two_qubit_encoding(full);
  for (int va = 0; va < 2; ++va)
    for (int vb = 0; vb < 2; ++vb) {
      const VectorXcd ka = logical_ket(full, 0, 1, 2, va);
      const VectorXcd kb = logical_ket(full, 3, 4, 5, vb);
      CHECK(std::abs(ka.norm() - 1.0) < 1e-12);
      CHECK(std::abs(kb.norm() - 1.0) < 1e-12);
      // The triples occupy disjoint bits, so amplitudes multiply mask-wise.
      VectorXcd prod = VectorXcd::Zero(full.dim());
      for (int m = 0; m < full.dim(); ++m) {
        const std::uint32_t mask = full.masks[m];
        const int ia = full.index_of_mask[mask & 0b000111u];
        const int ib = full.index_of_mask[mask & 0b111000u];
        prod(m) = ka(ia) * kb(ib);
      }
      // Column order |q0 q1> with q0 on spins (0,1,2): index 2*va + vb.
      const VectorXcd direct = enc.basis.col(2 * va + vb);
      CHECK((prod - direct).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("encoding construction rejects the wrong sector") {
  CHECK_THROWS_AS(two_qubit_encoding(sz_block(6, 1)), ValidationError);
  CHECK_THROWS_AS(two_qubit_encoding(sz_block(4, 2)), ValidationError);
  CHECK_THROWS_AS(logical_ket(full_space(6), 0, 1, 2, 2), ValidationError);
}

TEST_CASE("intra-pair exchange keeps the codespace; inter-pair pulses leak") {
  auto block = sz_block(6, 2);
  auto enc = two_qubit_encoding(block);

  GateSequence intra;
  intra.graph = "custom";
  intra.pulses = {{0, 1, 0.37}};  // both spins inside qubit A's paired doublet
  const MatrixXcd m_intra = sequence_logical_block(enc, intra);
  CHECK(leakage(m_intra) < 1e-12);
  CHECK(leakage(m_intra) >= 0.0);

  GateSequence inter;
  inter.graph = "custom";
  inter.pulses = {{2, 3, 0.37}};  // couples the two triples
  const MatrixXcd m_inter = sequence_logical_block(enc, inter);
  CHECK(leakage(m_inter) > 1e-3);

  // The fast column route agrees with the dense-unitary route.
  const MatrixXcd dense = logical_block(enc, sequence_unitary(block, inter));
  CHECK((m_inter - dense).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("local invariants match an explicit magic-basis oracle") {
  const MatrixXcd id = MatrixXcd::Identity(4, 4);
  const MatrixXcd cnot = cnot_matrix();
  const MatrixXcd swap = swap_matrix();
  MatrixXcd cz = id;
  cz(3, 3) = -1.0;

  auto close = [](Complex a, Complex b) { return std::abs(a - b) < 1e-10; };

  auto inv = makhlin_invariants(id);
  CHECK(close(inv.g1, Complex(1, 0)));
  CHECK(close(inv.g2, Complex(3, 0)));
  inv = makhlin_invariants(cnot);
  CHECK(close(inv.g1, Complex(0, 0)));
  CHECK(close(inv.g2, Complex(1, 0)));
  inv = makhlin_invariants(swap);
  CHECK(close(inv.g1, Complex(-1, 0)));
  CHECK(close(inv.g2, Complex(-3, 0)));
  inv = makhlin_invariants(cz);  // same local class as CNOT
  CHECK(close(inv.g1, Complex(0, 0)));
  CHECK(close(inv.g2, Complex(1, 0)));

  // Invariance under single-qubit dressing, checked against the oracle.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const MatrixXcd base = (trial % 2 == 0) ? cnot : swap;
    const MatrixXcd u =
        kron(random_su2(rng), random_su2(rng)) * base * kron(random_su2(rng), random_su2(rng));
    const auto got = makhlin_invariants(u);
    const auto want = invariants_oracle(u);
    CHECK(std::abs(got.g1 - want.g1) < 1e-8);
    CHECK(std::abs(got.g2 - want.g2) < 1e-8);
    const auto undressed = makhlin_invariants(base);
    CHECK(std::abs(got.g1 - undressed.g1) < 1e-8);
    CHECK(std::abs(got.g2 - undressed.g2) < 1e-8);
  }
}

TEST_CASE("closest unitary recovers a unitary from a shrunk block") {
  std::mt19937_64 rng(9);
  const MatrixXcd u = kron(random_su2(rng), random_su2(rng)) * cnot_matrix();
  const MatrixXcd m = 0.7 * u;  // uniform damping keeps the polar factor
  const MatrixXcd w = closest_unitary(m);
  CHECK((w - u).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((w.adjoint() * w - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("distance-to-CNOT-class literals") {
  CHECK(cnot_class_error(MatrixXcd::Identity(4, 4)) ==
        doctest::Approx(13.0 / 9.0).epsilon(1e-12));
  CHECK(cnot_class_error(swap_matrix()) == doctest::Approx(25.0 / 9.0).epsilon(1e-12));
  CHECK(cnot_class_error(cnot_matrix()) < 1e-14);

  std::mt19937_64 rng(17);
  const MatrixXcd dressed =
      kron(random_su2(rng), random_su2(rng)) * cnot_matrix() * kron(random_su2(rng), random_su2(rng));
  CHECK(cnot_class_error(dressed) < 1e-10);
}

TEST_CASE("phase-minimised distance ignores global phase only") {
  const MatrixXcd id = MatrixXcd::Identity(4, 4);
  const MatrixXcd cnot = cnot_matrix();
  // sqrt(||I||^2 + ||CNOT||^2 - 2 |tr CNOT|) = sqrt(8 - 4) = 2.
  CHECK(phase_min_distance(id, cnot) == doctest::Approx(2.0).epsilon(1e-12));
  const Complex ph(std::cos(0.7), std::sin(0.7));
  CHECK(phase_min_distance(ph * cnot, cnot) < 1e-12);
  CHECK(phase_min_distance(cnot, cnot) < 1e-14);
}
