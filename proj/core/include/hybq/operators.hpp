#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "hybq/fock.hpp"

namespace hybq {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

// One normal-ordered product of ladder operators with a scalar coefficient:
//   Number:  coeff * n_a            = coeff * c†_a c_a
//   Hopping: coeff * c†_a c_b
//   TwoBody: coeff * c†_a c†_b c_c c_d   (applied right to left: d, c, b, a)
struct Term {
  enum class Kind { Number, Hopping, TwoBody };
  Kind kind = Kind::Number;
  int a = 0, b = 0, c = 0, d = 0;
  Complex coeff{1.0, 0.0};

  static Term number(int a, Complex coeff);
  static Term hopping(int a, int b, Complex coeff);
  static Term two_body(int a, int b, int c, int d, Complex coeff);
};

// Dense matrix over a FockBasis. When a term maps a basis state outside the
// basis (e.g. on a charge-filtered sub-basis), that contribution is dropped,
// so the result is the compression P H P onto the spanned subspace.
struct ManyBodyOperator {
  FockBasisPtr basis;
  MatrixXcd mat;

  int dim() const { return static_cast<int>(mat.rows()); }
  bool is_hermitian(double tol = 1e-12) const;

  ManyBodyOperator& operator+=(const ManyBodyOperator& other);
  ManyBodyOperator& operator-=(const ManyBodyOperator& other);
};

ManyBodyOperator operator+(ManyBodyOperator lhs, const ManyBodyOperator& rhs);
ManyBodyOperator operator-(ManyBodyOperator lhs, const ManyBodyOperator& rhs);
ManyBodyOperator operator*(Complex scalar, ManyBodyOperator op);
ManyBodyOperator commutator(const ManyBodyOperator& a, const ManyBodyOperator& b);

ManyBodyOperator build_operator(const FockBasisPtr& basis, const std::vector<Term>& terms);

// Total spin operators for bases over spin-1/2 mode pairs (even mode count).
// Values are in units of hbar (Sz) and hbar^2 (S^2).
ManyBodyOperator total_sz(const FockBasisPtr& basis);
ManyBodyOperator spin_raising(const FockBasisPtr& basis);  // S+ = sum_k c†_{2k} c_{2k+1}
ManyBodyOperator total_s_squared(const FockBasisPtr& basis);

// Orthonormal column span of a subspace of `parent`'s Hilbert space.
struct SubspaceBasis {
  FockBasisPtr parent;
  MatrixXcd columns;  // dim(parent) x k, orthonormal

  int dim() const { return static_cast<int>(columns.cols()); }
  MatrixXcd projector() const { return columns * columns.adjoint(); }
  MatrixXcd restrict(const ManyBodyOperator& op) const;  // columns† M columns
};

// Span of the basis states satisfying a predicate (columns are standard unit
// vectors). Throws ValidationError when empty.
SubspaceBasis project(const FockBasisPtr& basis,
                      const std::function<bool(const FockState&)>& keep);

// Simultaneous (S^2, Sz) eigenspace: states with 2*Sz == twice_sz whose S^2
// eigenvalue is s(s+1) with s = twice_s/2. Eigenvector phases are fixed so
// the largest-magnitude component is real positive; ties broken by index.
SubspaceBasis spin_sector(const FockBasisPtr& basis, int twice_s, int twice_sz);

}  // namespace hybq
