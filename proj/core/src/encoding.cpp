#include "hybq/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "hybq/errors.hpp"

namespace hybq {

namespace {

using Component = std::pair<std::uint32_t, Complex>;  // (mask over the triple bits, amplitude)

std::vector<Component> triple_components(int a, int b, int c, int value) {
  const double r2 = std::sqrt(0.5);
  const std::uint32_t ba = 1u << a, bb = 1u << b, bc = 1u << c;
  if (value == 0) return {{ba, r2}, {bb, -r2}};
  const double t0 = std::sqrt(1.0 / 6.0);  // sqrt(1/3) * 1/sqrt(2)
  const double tm = std::sqrt(2.0 / 3.0);
  return {{ba, t0}, {bb, t0}, {bc, -tm}};
}

}  // namespace

VectorXcd logical_ket(const SzBlock& block, int a, int b, int c, int value) {
  if (value != 0 && value != 1) throw ValidationError("logical_ket: value must be 0 or 1");
  VectorXcd v = VectorXcd::Zero(block.dim());
  for (const auto& [mask, amp] : triple_components(a, b, c, value)) {
    const int idx = block.index_of_mask[mask];
    if (idx < 0) throw ValidationError("logical_ket: codeword outside block");
    v(idx) = amp;
  }
  return v;
}

LogicalEncoding two_qubit_encoding(const SzBlock& block) {
  if (block.n_spins != 6) throw ValidationError("two_qubit_encoding: needs six spins");
  if (block.n_up >= 0 && block.n_up != 2)
    throw ValidationError("two_qubit_encoding: codewords live in the n_up = 2 sector");
  LogicalEncoding enc{block, MatrixXcd::Zero(block.dim(), 4)};
  for (int xa = 0; xa < 2; ++xa) {
    const auto ka = triple_components(0, 1, 2, xa);
    for (int yb = 0; yb < 2; ++yb) {
      const auto kb = triple_components(3, 4, 5, yb);
      const int col = 2 * xa + yb;
      for (const auto& [ma, aa] : ka)
        for (const auto& [mb, ab] : kb) {
          const int idx = block.index_of_mask[ma | mb];
          if (idx < 0) throw ValidationError("two_qubit_encoding: codeword outside block");
          enc.basis(idx, col) = aa * ab;
        }
    }
  }
  return enc;
}

MatrixXcd logical_block(const LogicalEncoding& enc, const MatrixXcd& u) {
  if (u.rows() != enc.block.dim() || u.cols() != enc.block.dim())
    throw ValidationError("logical_block: unitary does not match encoding dimension");
  return enc.basis.adjoint() * u * enc.basis;
}

MatrixXcd sequence_logical_block(const LogicalEncoding& enc, const GateSequence& seq) {
  MatrixXcd cols = enc.basis;
  for (const Pulse& p : seq.pulses) apply_exchange_inplace(enc.block, p.i, p.j, p.tau, cols);
  return enc.basis.adjoint() * cols;
}

double leakage(const MatrixXcd& m) {
  // Clamped at zero: rounding can push ||m||^2 a few ulp past 4 on exactly
  // unitary blocks, and the objective contract promises a non-negative value.
  return std::max(0.0, 1.0 - m.squaredNorm() / 4.0);
}

MakhlinInvariants makhlin_invariants(const MatrixXcd& u4) {
  if (u4.rows() != 4 || u4.cols() != 4)
    throw ValidationError("makhlin_invariants: expected a 4x4 matrix");
  const double defect = (u4.adjoint() * u4 - MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff();
  if (defect > 1e-8)
    throw ValidationError("makhlin_invariants: input not unitary (defect " +
                          std::to_string(defect) + "); take the closest unitary first");
  static const MatrixXcd q = [] {
    const double r2 = std::sqrt(0.5);
    const Complex i(0.0, 1.0);
    MatrixXcd m(4, 4);
    m << 1, 0, 0, i,
         0, i, 1, 0,
         0, i, -1, 0,
         1, 0, 0, -i;
    return MatrixXcd(r2 * m);
  }();
  const MatrixXcd ub = q.adjoint() * u4 * q;
  const MatrixXcd m = ub.transpose() * ub;
  const Complex tr = m.trace();
  const Complex tr2 = (m * m).trace();
  const Complex det = u4.determinant();
  MakhlinInvariants inv;
  inv.g1 = tr * tr / (16.0 * det);
  inv.g2 = (tr * tr - tr2) / (4.0 * det);
  return inv;
}

MatrixXcd closest_unitary(const MatrixXcd& m) {
  Eigen::JacobiSVD<MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double cnot_class_error(const MatrixXcd& m) {
  const MakhlinInvariants inv = makhlin_invariants(closest_unitary(m));
  return std::norm(inv.g1) + std::norm(inv.g2 - Complex(1.0, 0.0)) / 9.0;
}

MatrixXcd cnot_matrix() {
  MatrixXcd c = MatrixXcd::Identity(4, 4);
  c(2, 2) = c(3, 3) = 0.0;
  c(2, 3) = c(3, 2) = 1.0;
  return c;
}

double phase_min_distance(const MatrixXcd& m, const MatrixXcd& target) {
  const double s = m.squaredNorm() + target.squaredNorm() -
                   2.0 * std::abs((target.adjoint() * m).trace());
  return std::sqrt(std::max(0.0, s));
}

}  // namespace hybq
