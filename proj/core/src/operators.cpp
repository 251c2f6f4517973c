#include "hybq/operators.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "hybq/errors.hpp"

namespace hybq {

Term Term::number(int a, Complex coeff) {
  Term t;
  t.kind = Kind::Number;
  t.a = a;
  t.coeff = coeff;
  return t;
}

Term Term::hopping(int a, int b, Complex coeff) {
  Term t;
  t.kind = Kind::Hopping;
  t.a = a;
  t.b = b;
  t.coeff = coeff;
  return t;
}

Term Term::two_body(int a, int b, int c, int d, Complex coeff) {
  Term t;
  t.kind = Kind::TwoBody;
  t.a = a;
  t.b = b;
  t.c = c;
  t.d = d;
  t.coeff = coeff;
  return t;
}

bool ManyBodyOperator::is_hermitian(double tol) const {
  return (mat - mat.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

ManyBodyOperator& ManyBodyOperator::operator+=(const ManyBodyOperator& other) {
  if (basis != other.basis) throw ValidationError("operator basis mismatch");
  mat += other.mat;
  return *this;
}

ManyBodyOperator& ManyBodyOperator::operator-=(const ManyBodyOperator& other) {
  if (basis != other.basis) throw ValidationError("operator basis mismatch");
  mat -= other.mat;
  return *this;
}

ManyBodyOperator operator+(ManyBodyOperator lhs, const ManyBodyOperator& rhs) {
  lhs += rhs;
  return lhs;
}

ManyBodyOperator operator-(ManyBodyOperator lhs, const ManyBodyOperator& rhs) {
  lhs -= rhs;
  return lhs;
}

ManyBodyOperator operator*(Complex scalar, ManyBodyOperator op) {
  op.mat *= scalar;
  return op;
}

ManyBodyOperator commutator(const ManyBodyOperator& a, const ManyBodyOperator& b) {
  if (a.basis != b.basis) throw ValidationError("operator basis mismatch");
  ManyBodyOperator out;
  out.basis = a.basis;
  out.mat = a.mat * b.mat - b.mat * a.mat;
  return out;
}

namespace {

void check_mode(int m, int n_modes) {
  if (m < 0 || m >= n_modes) {
    throw ValidationError("term references mode " + std::to_string(m) +
                          " outside basis with " + std::to_string(n_modes) + " modes");
  }
}

// Applies one term to |ket>, accumulating coeff * sign into column `col` of
// `mat` at the row of the resulting state (if it lies in the basis).
void apply_term(const Term& t, const FockBasis& basis, int col, MatrixXcd& mat) {
  const std::uint64_t ket = basis.state(col).bits;
  const int n = basis.n_modes();
  int sign = 1;
  std::uint64_t w = ket;

  auto step = [&](int mode, FermionOp op) -> bool {
    auto r = apply_fermion(w, mode, op, n);
    if (!r) return false;
    w = r->bits;
    sign *= r->sign;
    return true;
  };

  switch (t.kind) {
    case Term::Kind::Number:
      if (!((ket >> t.a) & 1ULL)) return;
      mat(col, col) += t.coeff;
      return;
    case Term::Kind::Hopping:
      if (!step(t.b, FermionOp::Annihilate)) return;
      if (!step(t.a, FermionOp::Create)) return;
      break;
    case Term::Kind::TwoBody:
      if (!step(t.d, FermionOp::Annihilate)) return;
      if (!step(t.c, FermionOp::Annihilate)) return;
      if (!step(t.b, FermionOp::Create)) return;
      if (!step(t.a, FermionOp::Create)) return;
      break;
  }
  if (auto row = basis.index_of(w)) {
    mat(*row, col) += t.coeff * static_cast<double>(sign);
  }
}

}  // namespace

ManyBodyOperator build_operator(const FockBasisPtr& basis, const std::vector<Term>& terms) {
  if (!basis) throw ValidationError("null basis");
  const int n = basis->n_modes();
  for (const auto& t : terms) {
    check_mode(t.a, n);
    if (t.kind != Term::Kind::Number) check_mode(t.b, n);
    if (t.kind == Term::Kind::TwoBody) {
      check_mode(t.c, n);
      check_mode(t.d, n);
    }
  }
  ManyBodyOperator op;
  op.basis = basis;
  op.mat = MatrixXcd::Zero(basis->size(), basis->size());
  for (const auto& t : terms) {
    for (int col = 0; col < basis->size(); ++col) {
      apply_term(t, *basis, col, op.mat);
    }
  }
  return op;
}

namespace {

void require_spin_pairs(const FockBasis& basis) {
  if (basis.n_modes() % 2 != 0) {
    throw ValidationError("spin operators need an even mode count (up/down pairs)");
  }
}

}  // namespace

ManyBodyOperator total_sz(const FockBasisPtr& basis) {
  require_spin_pairs(*basis);
  ManyBodyOperator op;
  op.basis = basis;
  op.mat = MatrixXcd::Zero(basis->size(), basis->size());
  for (int i = 0; i < basis->size(); ++i) {
    op.mat(i, i) = 0.5 * basis->state(i).twice_sz;
  }
  return op;
}

ManyBodyOperator spin_raising(const FockBasisPtr& basis) {
  require_spin_pairs(*basis);
  std::vector<Term> terms;
  for (int k = 0; k < basis->n_modes() / 2; ++k) {
    terms.push_back(Term::hopping(2 * k, 2 * k + 1, 1.0));
  }
  return build_operator(basis, terms);
}

ManyBodyOperator total_s_squared(const FockBasisPtr& basis) {
  // S^2 = S- S+ + Sz (Sz + 1)
  const ManyBodyOperator sp = spin_raising(basis);
  const ManyBodyOperator sz = total_sz(basis);
  ManyBodyOperator op;
  op.basis = basis;
  op.mat = sp.mat.adjoint() * sp.mat + sz.mat * sz.mat + sz.mat;
  return op;
}

MatrixXcd SubspaceBasis::restrict(const ManyBodyOperator& op) const {
  if (op.basis != parent) throw ValidationError("operator basis mismatch");
  return columns.adjoint() * op.mat * columns;
}

SubspaceBasis project(const FockBasisPtr& basis,
                      const std::function<bool(const FockState&)>& keep) {
  std::vector<int> idx;
  for (int i = 0; i < basis->size(); ++i) {
    if (keep(basis->state(i))) idx.push_back(i);
  }
  if (idx.empty()) throw ValidationError("projection selects an empty subspace");
  SubspaceBasis sub;
  sub.parent = basis;
  sub.columns = MatrixXcd::Zero(basis->size(), idx.size());
  for (int k = 0; k < static_cast<int>(idx.size()); ++k) {
    sub.columns(idx[k], k) = 1.0;
  }
  return sub;
}

SubspaceBasis spin_sector(const FockBasisPtr& basis, int twice_s, int twice_sz) {
  if (twice_s < 0) throw ValidationError("twice_s must be non-negative");
  SubspaceBasis szsector =
      project(basis, [&](const FockState& st) { return st.twice_sz == twice_sz; });
  const MatrixXcd s2 = szsector.restrict(total_s_squared(basis));

  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(s2);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("S^2 eigensolve failed");
  }
  const double s = 0.5 * twice_s;
  const double target = s * (s + 1.0);
  std::vector<int> cols;
  for (int k = 0; k < s2.rows(); ++k) {
    if (std::abs(solver.eigenvalues()(k) - target) < 1e-8) cols.push_back(k);
  }
  if (cols.empty()) {
    throw ValidationError("no states with 2S=" + std::to_string(twice_s) +
                          ", 2Sz=" + std::to_string(twice_sz));
  }

  SubspaceBasis sub;
  sub.parent = basis;
  sub.columns = MatrixXcd::Zero(basis->size(), cols.size());
  for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
    VectorXcd v = szsector.columns * solver.eigenvectors().col(cols[k]);
    // Phase fix: largest-magnitude component real positive.
    int imax = 0;
    for (int i = 1; i < v.size(); ++i) {
      if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
    }
    const Complex z = v(imax);
    if (std::abs(z) > 0) v *= std::conj(z) / std::abs(z);
    sub.columns.col(k) = v;
  }
  return sub;
}

}  // namespace hybq
