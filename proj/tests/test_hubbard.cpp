#include <doctest.h>

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <vector>

#include "hybq/errors.hpp"
#include "hybq/fock.hpp"
#include "hybq/hubbard.hpp"
#include "hybq/operators.hpp"

using namespace hybq;

namespace {

HubbardParams worked_example() {
  HubbardParams p;
  p.eps = {{{0.0, 0.052}, {0.0, 0.4}}};
  p.mu = {0.0, 0.5};
  for (int a : {0, 1})
    for (int b : {2, 3}) {
      p.tun(a, b) = 0.01;
      p.tun(b, a) = 0.01;
    }
  for (int d = 0; d < 2; ++d) {
    int s0 = 2 * d;
    for (int i : {s0, s0 + 1})
      for (int j : {s0, s0 + 1}) p.coulomb_direct(i, j) = 5.0;
    p.coulomb_exchange(s0, s0 + 1) = 0.002;
    p.coulomb_exchange(s0 + 1, s0) = 0.002;
  }
  return p;
}

int site_of_mode(int m) { return m / 2; }
int spin_of_mode(int m) { return m % 2; }
int mode_from(int site, int spin) { return 2 * site + spin; }

// Independent reconstruction of the Hamiltonian in first quantization:
// three distinguishable particles on (C^8)^{x3}, explicit antisymmetrized
// Slater vectors, and a symmetric pair potential assembled directly from the
// model definition. No ladder-operator code is involved, so matrix elements
// (including every fermionic sign) are cross-checked by an unrelated route.
MatrixXcd first_quantized_hamiltonian(const HubbardParams& p, const FockBasisPtr& basis) {
  constexpr int M = 8;          // single-particle modes
  constexpr int P = M * M;      // pair space
  constexpr int D = M * M * M;  // three-particle tensor space

  // Single-particle matrix: orbital energies plus chemical potential on the
  // diagonal, spin-preserving tunneling between sites of different dots.
  MatrixXcd h = MatrixXcd::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    int site = site_of_mode(m);
    h(m, m) = p.eps[site / 2][site % 2] + p.mu[site / 2];
    for (int n = 0; n < M; ++n) {
      if (n != m && spin_of_mode(m) == spin_of_mode(n)) {
        h(m, n) += p.tun(site_of_mode(m), site_of_mode(n));
      }
    }
  }

  // Pair potential <ab|V|cd> indexed as V(a*M+b, c*M+d).
  MatrixXcd v = MatrixXcd::Zero(P, P);
  for (int m = 0; m < M; ++m) {
    for (int n = 0; n < M; ++n) {
      if (m == n) continue;
      int sm = site_of_mode(m), sn = site_of_mode(n);
      // Direct repulsion multiplies by C of the two sites involved.
      v(m * M + n, m * M + n) += p.coulomb_direct(sm, sn);
      // Exchange swaps the sites between the particles, keeping each
      // particle's spin.
      if (sm != sn) {
        int o1 = mode_from(sn, spin_of_mode(m));
        int o2 = mode_from(sm, spin_of_mode(n));
        v(o1 * M + o2, m * M + n) += p.coulomb_exchange(sm, sn);
      }
    }
  }
  for (const auto& g : p.gamma_extra) {
    int a = site_index(g.dots[0], g.orbitals[0]);
    int b = site_index(g.dots[1], g.orbitals[1]);
    int c = site_index(g.dots[2], g.orbitals[2]);
    int d = site_index(g.dots[3], g.orbitals[3]);
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) {
        int in1 = mode_from(d, s), in2 = mode_from(c, sp);
        int out1 = mode_from(a, s), out2 = mode_from(b, sp);
        v(out1 * M + out2, in1 * M + in2) += g.value;
      }
    }
  }
  // Symmetrize over the two particle slots so V is a valid pair potential.
  MatrixXcd vs = MatrixXcd::Zero(P, P);
  for (int r1 = 0; r1 < M; ++r1)
    for (int r2 = 0; r2 < M; ++r2)
      for (int c1 = 0; c1 < M; ++c1)
        for (int c2 = 0; c2 < M; ++c2) {
          vs(r1 * M + r2, c1 * M + c2) =
              0.5 * (v(r1 * M + r2, c1 * M + c2) + v(r2 * M + r1, c2 * M + c1));
        }

  auto idx3 = [](int a, int b, int c) { return (a * M + b) * M + c; };
  MatrixXcd big = MatrixXcd::Zero(D, D);
  // One-body part on each slot.
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int c = 0; c < M; ++c) {
        for (int ap = 0; ap < M; ++ap) big(idx3(ap, b, c), idx3(a, b, c)) += h(ap, a);
        for (int bp = 0; bp < M; ++bp) big(idx3(a, bp, c), idx3(a, b, c)) += h(bp, b);
        for (int cp = 0; cp < M; ++cp) big(idx3(a, b, cp), idx3(a, b, c)) += h(cp, c);
      }
  // Pair part on slots (0,1), (0,2), (1,2).
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int c = 0; c < M; ++c)
        for (int r1 = 0; r1 < M; ++r1)
          for (int r2 = 0; r2 < M; ++r2) {
            Complex v01 = vs(r1 * M + r2, a * M + b);
            if (v01 != Complex(0, 0)) big(idx3(r1, r2, c), idx3(a, b, c)) += v01;
            Complex v02 = vs(r1 * M + r2, a * M + c);
            if (v02 != Complex(0, 0)) big(idx3(r1, b, r2), idx3(a, b, c)) += v02;
            Complex v12 = vs(r1 * M + r2, b * M + c);
            if (v12 != Complex(0, 0)) big(idx3(a, r1, r2), idx3(a, b, c)) += v12;
          }

  // Normalized antisymmetric Slater vectors, ascending modes mapped to slots.
  struct Perm {
    std::array<int, 3> p;
    double sign;
  };
  const std::vector<Perm> perms = {{{0, 1, 2}, 1.0},  {{1, 2, 0}, 1.0},  {{2, 0, 1}, 1.0},
                                   {{0, 2, 1}, -1.0}, {{2, 1, 0}, -1.0}, {{1, 0, 2}, -1.0}};
  MatrixXcd slater = MatrixXcd::Zero(D, basis->size());
  for (int i = 0; i < basis->size(); ++i) {
    std::array<int, 3> modes{};
    int k = 0;
    for (int m = 0; m < M; ++m)
      if (basis->state(i).occupied(m)) modes[k++] = m;
    REQUIRE(k == 3);
    for (const auto& perm : perms) {
      slater(idx3(modes[perm.p[0]], modes[perm.p[1]], modes[perm.p[2]]), i) +=
          perm.sign / std::sqrt(6.0);
    }
  }
  return slater.adjoint() * big * slater;
}

HubbardParams random_params(unsigned seed, bool with_gamma) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  HubbardParams p;
  for (auto& row : p.eps)
    for (auto& e : row) e = 0.3 * u(rng);
  for (auto& m : p.mu) m = 0.4 * u(rng);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double c = 2.0 + u(rng);
      p.coulomb_direct(i, j) = c;
      p.coulomb_direct(j, i) = c;
      if (i != j) {
        double k = 0.05 * u(rng);
        p.coulomb_exchange(i, j) = k;
        p.coulomb_exchange(j, i) = k;
        if (site_dot(i) != site_dot(j)) {
          double t = 0.1 * u(rng);
          p.tun(i, j) = t;
          p.tun(j, i) = t;
        }
      }
    }
  if (with_gamma) {
    // A generic inter-dot integral together with its hermitian partner.
    GammaEntry g;
    g.dots = {Dot::Left, Dot::Right, Dot::Left, Dot::Right};
    g.orbitals = {1, 2, 2, 1};
    g.value = 0.07;
    GammaEntry gh;
    gh.dots = {g.dots[3], g.dots[2], g.dots[1], g.dots[0]};
    gh.orbitals = {g.orbitals[3], g.orbitals[2], g.orbitals[1], g.orbitals[0]};
    gh.value = g.value;
    p.gamma_extra = {g, gh};
  }
  return p;
}

}  // namespace

TEST_CASE("site indexing matches the mode layout") {
  CHECK(site_index(Dot::Left, 1) == 0);
  CHECK(site_index(Dot::Left, 2) == 1);
  CHECK(site_index(Dot::Right, 1) == 2);
  CHECK(site_index(Dot::Right, 2) == 3);
  CHECK(site_dot(0) == Dot::Left);
  CHECK(site_dot(3) == Dot::Right);
  CHECK_THROWS_AS(site_index(Dot::Left, 3), ValidationError);
}

TEST_CASE("full Hamiltonian matches a first-quantized reconstruction") {
  auto basis = FockBasis::build(8, 3);
  for (unsigned seed : {11u, 12u, 13u}) {
    CAPTURE(seed);
    auto p = random_params(seed, /*with_gamma=*/seed != 11u);
    auto h = build_full_hamiltonian(p, basis);
    REQUIRE(h.is_hermitian(1e-11));
    MatrixXcd oracle = first_quantized_hamiltonian(p, basis);
    CHECK((h.mat - oracle).cwiseAbs().maxCoeff() < 1e-11);

    auto split = split_operators(p, basis);
    MatrixXcd recombined = split.u0.mat + split.u1.mat + split.t.mat;
    CHECK((h.mat - recombined).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("split pieces respect the charge-configuration block structure") {
  auto basis = FockBasis::build(8, 3);
  auto p = random_params(21u, true);
  auto split = split_operators(p, basis);
  for (int i = 0; i < basis->size(); ++i) {
    for (int j = 0; j < basis->size(); ++j) {
      auto ci = basis->state(i).charge_config;
      auto cj = basis->state(j).charge_config;
      if (ci != cj) {
        CHECK(std::abs(split.u0.mat(i, j)) == 0.0);
        CHECK(std::abs(split.u1.mat(i, j)) == 0.0);
      }
      int dl = std::abs(ci.first - cj.first);
      int dr = std::abs(ci.second - cj.second);
      bool one_hop = (dl == 1 && dr == 1);
      if (!one_hop) CHECK(std::abs(split.t.mat(i, j)) == 0.0);
    }
  }
}

TEST_CASE("single-dot two-electron energies on the worked parameter set") {
  auto p = worked_example();
  auto s = dot_spectra(p);
  CHECK(s.e_s_l == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(s.e_t_l == doctest::Approx(5.05).epsilon(1e-14));
  CHECK(s.e_s_r == doctest::Approx(6.0).epsilon(1e-14));
  CHECK(s.e_t_r == doctest::Approx(6.398).epsilon(1e-14));
  CHECK(s.e_st_l() == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(s.e_st_r() == doctest::Approx(0.398).epsilon(1e-12));
}

TEST_CASE("single-dot energies agree with exact diagonalization per dot") {
  // Cross-check dot_spectra against eigenvalues of the same-dot two-electron
  // problem solved in the many-body representation with tunneling removed.
  auto p = random_params(31u, false);
  p.tun.setZero();
  auto s = dot_spectra(p);
  auto basis = FockBasis::build(8, 2);
  auto h = build_full_hamiltonian(p, basis);

  for (int dot = 0; dot < 2; ++dot) {
    auto dot_basis = basis->filtered([&](const FockState& st) {
      return dot == 0 ? st.charge_config == std::pair<int, int>{2, 0}
                      : st.charge_config == std::pair<int, int>{0, 2};
    });
    auto hd = build_full_hamiltonian(p, dot_basis);
    // Ground state of the two-electron dot: compare the singlet with both
    // electrons in orbital 1 and the lowest triplet (Sz = 1 copy: one
    // electron per orbital, parallel spins).
    int up1 = 2 * (2 * dot) + 0, dn1 = up1 + 1, up2 = up1 + 2;
    std::uint64_t singlet_bits = (1ULL << up1) | (1ULL << dn1);
    std::uint64_t triplet_bits = (1ULL << up1) | (1ULL << up2);
    auto is_idx = dot_basis->index_of(singlet_bits);
    auto it_idx = dot_basis->index_of(triplet_bits);
    REQUIRE(is_idx.has_value());
    REQUIRE(it_idx.has_value());
    double e_s = hd.mat(*is_idx, *is_idx).real();
    double e_t = hd.mat(*it_idx, *it_idx).real();
    CHECK(e_s == doctest::Approx(dot == 0 ? s.e_s_l : s.e_s_r).epsilon(1e-13));
    CHECK(e_t == doctest::Approx(dot == 0 ? s.e_t_l : s.e_t_r).epsilon(1e-13));
  }
}

TEST_CASE("parameter validation rejects malformed inputs") {
  auto p = worked_example();
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.tun(0, 2) = 0.3;  // breaks symmetry
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = p;
  bad.tun(0, 1) = 0.1;  // same-dot tunneling
  bad.tun(1, 0) = 0.1;
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = p;
  bad.eps[0][0] = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = p;
  bad.gamma_extra.push_back({{Dot::Left, Dot::Left, Dot::Left, Dot::Right}, {1, 1, 1, 1}, 0.1});
  CHECK_THROWS_AS(bad.validate(), ValidationError);

  bad = p;
  bad.gamma_extra.push_back({{Dot::Left, Dot::Right, Dot::Left, Dot::Right}, {1, 3, 1, 1}, 0.1});
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("parameters survive a JSON round trip") {
  auto p = random_params(41u, true);
  nlohmann::json j = p;
  HubbardParams q = j.get<HubbardParams>();
  CHECK((p.tun - q.tun).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.coulomb_direct - q.coulomb_direct).cwiseAbs().maxCoeff() == 0.0);
  CHECK((p.coulomb_exchange - q.coulomb_exchange).cwiseAbs().maxCoeff() == 0.0);
  CHECK(p.eps == q.eps);
  CHECK(p.mu == q.mu);
  REQUIRE(q.gamma_extra.size() == p.gamma_extra.size());
  for (size_t i = 0; i < q.gamma_extra.size(); ++i) {
    CHECK(q.gamma_extra[i].dots == p.gamma_extra[i].dots);
    CHECK(q.gamma_extra[i].orbitals == p.gamma_extra[i].orbitals);
    CHECK(q.gamma_extra[i].value == p.gamma_extra[i].value);
  }
}
