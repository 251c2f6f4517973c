#include "hybq/schrieffer_wolff.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "hybq/errors.hpp"

namespace hybq {

namespace {

// Deterministic phase fix: largest-magnitude component real positive.
void fix_phases(MatrixXcd& v) {
  for (int c = 0; c < v.cols(); ++c) {
    int imax = 0;
    for (int r = 1; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) > std::abs(v(imax, c))) imax = r;
    }
    const Complex z = v(imax, c);
    if (std::abs(z) > 0) v.col(c) *= std::conj(z) / std::abs(z);
  }
}

}  // namespace

SWGenerator sw_generator(const ManyBodyOperator& u, const ManyBodyOperator& t,
                         double degeneracy_floor) {
  if (u.basis != t.basis) throw ValidationError("sw_generator: basis mismatch");
  if (!u.is_hermitian(1e-10) || !t.is_hermitian(1e-10)) {
    throw ValidationError("sw_generator: operators must be Hermitian");
  }
  const FockBasis& basis = *u.basis;
  const int n = basis.size();

  // Group basis states by charge configuration, preserving order.
  std::map<std::pair<int, int>, std::vector<int>> blocks;
  for (int i = 0; i < n; ++i) blocks[basis.state(i).charge_config].push_back(i);

  SWGenerator gen;
  gen.u_eigenvalues.resize(n);
  gen.u_eigenvectors = MatrixXcd::Zero(n, n);
  gen.block_of.assign(n, -1);

  int col = 0;
  int block_id = 0;
  for (const auto& [config, idx] : blocks) {
    const int m = static_cast<int>(idx.size());
    MatrixXcd ublock(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) ublock(a, b) = u.mat(idx[a], idx[b]);
    }
    Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(ublock);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("sw_generator: block eigensolve failed");
    }
    MatrixXcd vecs = solver.eigenvectors();
    fix_phases(vecs);
    for (int k = 0; k < m; ++k) {
      gen.u_eigenvalues(col) = solver.eigenvalues()(k);
      for (int a = 0; a < m; ++a) gen.u_eigenvectors(idx[a], col) = vecs(a, k);
      gen.block_of[col] = block_id;
      ++col;
    }
    ++block_id;
  }

  const MatrixXcd t_tilde =
      gen.u_eigenvectors.adjoint() * t.mat * gen.u_eigenvectors;
  const double t_scale = t_tilde.cwiseAbs().maxCoeff();
  const double noise = 1e-12 * std::max(1.0, t_scale);

  MatrixXcd is_tilde = MatrixXcd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (gen.block_of[a] == gen.block_of[b]) continue;
      const Complex tv = t_tilde(a, b);
      if (std::abs(tv) <= noise) continue;
      const double du = gen.u_eigenvalues(a) - gen.u_eigenvalues(b);
      if (std::abs(du) < degeneracy_floor) {
        throw NearDegeneracyError(
            "sw_generator: tunnel-coupled eigenstates closer than the degeneracy "
            "floor: |dU| = " + std::to_string(std::abs(du)) + " meV between " +
            "eigenstate " + std::to_string(a) + " (block " +
            std::to_string(gen.block_of[a]) + ") and eigenstate " + std::to_string(b) +
            " (block " + std::to_string(gen.block_of[b]) + "), |T| = " +
            std::to_string(std::abs(tv)) + " meV",
            std::abs(du));
      }
      is_tilde(a, b) = tv / du;
    }
  }

  gen.i_s.basis = u.basis;
  gen.i_s.mat = gen.u_eigenvectors * is_tilde * gen.u_eigenvectors.adjoint();
  return gen;
}

ManyBodyOperator second_order_block(const SWGenerator& gen, const ManyBodyOperator& t) {
  return commutator(gen.i_s, t);
}

EffectiveCouplings effective_couplings(const HubbardParams& p) {
  p.validate();
  EffectiveCouplings out;

  const int l1 = site_index(Dot::Left, 1), l2 = site_index(Dot::Left, 2);
  const int r1 = site_index(Dot::Right, 1), r2 = site_index(Dot::Right, 2);
  out.t = p.tun(l1, r1);
  for (int a : {l1, l2}) {
    for (int b : {r1, r2}) {
      if (std::abs(p.tun(a, b) - out.t) > 1e-12) {
        out.warnings.push_back(
            "equal-tunneling assumption violated: tun(" + std::to_string(a) + "," +
            std::to_string(b) + ") = " + std::to_string(p.tun(a, b)) +
            " differs from tun(L1,R1) = " + std::to_string(out.t) +
            "; using the L1-R1 element");
      }
    }
  }

  const DotSpectra s = dot_spectra(p);
  const double d_ss = s.e_s_r - s.e_s_l;
  const double d_st = s.e_s_r - s.e_t_l;
  if (d_ss <= 0.0 || d_st <= 0.0) {
    throw RegimeError(
        "effective_couplings: outside the detuning regime; need E_S^R - E_S^L > 0 "
        "and E_S^R - E_T^L > 0, got " + std::to_string(d_ss) + " and " +
        std::to_string(d_st) + " meV");
  }
  out.j1 = 2.0 * out.t * out.t / d_ss;
  out.j2 = 2.0 * out.t * out.t / d_st;
  out.jp = (out.j1 + out.j2) / 2.0;
  return out;
}

double EffectiveQubit::gap() const {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> solver(h2);
  return solver.eigenvalues()(1) - solver.eigenvalues()(0);
}

double EffectiveQubit::resonance_ghz() const { return gap() * kMeVToGHz; }

EffectiveQubit effective_hamiltonian_analytic(const HubbardParams& p) {
  const EffectiveCouplings c = effective_couplings(p);
  const DotSpectra s = dot_spectra(p);
  EffectiveQubit q;
  q.j1 = c.j1;
  q.j2 = c.j2;
  q.jp = c.jp;
  q.e_st_l = s.e_st_l();
  const double off = std::sqrt(1.5) * c.jp;
  q.h2 << -c.j1, off, off, q.e_st_l - 1.5 * (c.j1 + c.j2);
  return q;
}

EffectiveQubit make_effective_qubit(double j1, double j2, double jp, double e_st_l) {
  EffectiveQubit q;
  q.j1 = j1;
  q.j2 = j2;
  q.jp = jp;
  q.e_st_l = e_st_l;
  const double off = std::sqrt(1.5) * jp;
  q.h2 << -j1, off, off, e_st_l - 1.5 * (j1 + j2);
  return q;
}

EffectiveQubit qubit_from_matrix(const Eigen::Matrix2cd& h) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("qubit_from_matrix: matrix must be Hermitian");
  }
  EffectiveQubit q;
  q.h2 = h;
  q.e_st_l = h(1, 1).real() - h(0, 0).real();
  q.jp = std::abs(h(0, 1)) / std::sqrt(1.5);
  return q;
}

namespace {

std::uint64_t bits_of(std::initializer_list<int> modes) {
  std::uint64_t b = 0;
  for (int m : modes) b |= 1ULL << m;
  return b;
}

int index_or_throw(const FockBasis& basis, std::uint64_t bits) {
  auto idx = basis.index_of(bits);
  if (!idx) {
    throw ValidationError("logical_states: basis lacks state " +
                          state_label(bits, basis.n_modes()));
  }
  return *idx;
}

}  // namespace

LogicalStates logical_states(const FockBasisPtr& basis) {
  if (!basis || basis->n_modes() != kNumModes || basis->n_electrons() != 3) {
    throw ValidationError("logical_states: need an 8-mode, 3-electron basis");
  }
  LogicalStates st;
  st.basis = basis;
  st.ket0 = VectorXcd::Zero(basis->size());
  st.ket1 = VectorXcd::Zero(basis->size());

  // |0> = |L1u L1d R1d>
  st.ket0(index_or_throw(*basis, bits_of({0, 1, 5}))) = 1.0;
  // |1> = sqrt(1/6) (|L1u L2d R1d> + |L1d L2u R1d>) - sqrt(2/3) |L1d L2d R1u>
  st.ket1(index_or_throw(*basis, bits_of({0, 3, 5}))) = std::sqrt(1.0 / 6.0);
  st.ket1(index_or_throw(*basis, bits_of({1, 2, 5}))) = std::sqrt(1.0 / 6.0);
  st.ket1(index_or_throw(*basis, bits_of({1, 3, 4}))) = -std::sqrt(2.0 / 3.0);
  return st;
}

NumericEffective effective_hamiltonian_numeric(const HubbardParams& p, bool include_u1) {
  const auto full = FockBasis::build(kNumModes, 3);
  const auto restricted = full->filtered([](const FockState& st) {
    return st.charge_config == std::pair<int, int>{2, 1} ||
           st.charge_config == std::pair<int, int>{1, 2};
  });

  SplitOperators split = split_operators(p, restricted);
  ManyBodyOperator u = include_u1 ? split.u() : split.u0;
  const SWGenerator gen = sw_generator(u, split.t);

  ManyBodyOperator h_eff = u;
  h_eff.mat += 0.5 * second_order_block(gen, split.t).mat;

  const LogicalStates ls = logical_states(restricted);
  Eigen::Matrix2cd h2;
  h2(0, 0) = ls.ket0.adjoint() * h_eff.mat * ls.ket0;
  h2(0, 1) = ls.ket0.adjoint() * h_eff.mat * ls.ket1;
  h2(1, 0) = ls.ket1.adjoint() * h_eff.mat * ls.ket0;
  h2(1, 1) = ls.ket1.adjoint() * h_eff.mat * ls.ket1;

  NumericEffective out;
  out.u_pin = (ls.ket0.adjoint() * u.mat * ls.ket0).real()(0, 0);
  h2 -= out.u_pin * Eigen::Matrix2cd::Identity();
  out.h2 = 0.5 * (h2 + h2.adjoint());  // strip numerical asymmetry
  out.j1_numeric = -out.h2(0, 0).real();
  out.jp_numeric = std::abs(out.h2(0, 1)) / std::sqrt(1.5);
  return out;
}

Eigen::VectorXd ed_sector_levels(const HubbardParams& p, int twice_s, int twice_sz) {
  const auto basis = FockBasis::build(kNumModes, 3);
  const ManyBodyOperator h = build_full_hamiltonian(p, basis);
  const SubspaceBasis sector = spin_sector(basis, twice_s, twice_sz);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(sector.restrict(h));
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("ed_sector_levels: eigensolve failed");
  }
  return solver.eigenvalues();
}

double ed_reference_gap(const HubbardParams& p) {
  const Eigen::VectorXd levels = ed_sector_levels(p, 1, -1);
  if (levels.size() < 2) throw std::runtime_error("sector has fewer than two levels");
  return levels(1) - levels(0);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ValidationError("log_log_slope: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n < 2) throw ValidationError("log_log_slope: need at least two positive points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const HubbardParams& base,
                                   const std::vector<double>& ratios) {
  ConvergenceStudy study;
  const DotSpectra s = dot_spectra(base);
  study.delta = s.e_s_r - s.e_t_l;
  if (study.delta <= 0) {
    throw RegimeError("convergence_study: E_S^R - E_T^L must be positive");
  }

  const int l1 = site_index(Dot::Left, 1), l2 = site_index(Dot::Left, 2);
  const int r1 = site_index(Dot::Right, 1), r2 = site_index(Dot::Right, 2);

  std::vector<double> ts, analytic_errs, numeric_errs;
  for (double ratio : ratios) {
    HubbardParams p = base;
    const double t = ratio * study.delta;
    for (int a : {l1, l2}) {
      for (int b : {r1, r2}) {
        p.tun(a, b) = t;
        p.tun(b, a) = t;
      }
    }
    ConvergencePoint pt;
    pt.t = t;
    pt.ed_gap = ed_reference_gap(p);
    pt.analytic_gap = effective_hamiltonian_analytic(p).gap();
    pt.numeric_gap = qubit_from_matrix(effective_hamiltonian_numeric(p).h2).gap();
    pt.analytic_error = std::abs(pt.analytic_gap - pt.ed_gap);
    pt.numeric_error = std::abs(pt.numeric_gap - pt.ed_gap);
    study.points.push_back(pt);
    ts.push_back(t);
    analytic_errs.push_back(pt.analytic_error);
    numeric_errs.push_back(pt.numeric_error);
  }
  study.analytic_exponent = log_log_slope(ts, analytic_errs);
  study.numeric_exponent = log_log_slope(ts, numeric_errs);
  return study;
}

}  // namespace hybq
