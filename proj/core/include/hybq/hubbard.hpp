#pragma once

#include <Eigen/Dense>
#include <array>
#include <nlohmann/json_fwd.hpp>
#include <vector>

#include "hybq/operators.hpp"

namespace hybq {

// Orbital sites are indexed L1=0, L2=1, R1=2, R2=3, matching the mode layout
// in fock.hpp (site k owns modes 2k = up, 2k+1 = down).
inline constexpr int kNumSites = 4;
int site_index(Dot dot, int orbital);
Dot site_dot(int site);

// One general two-body integral Gamma^{dots}_{orbitals}, contributing
//   (1/2) * value * sum_{s,s'} c†_{d0,o0,s} c†_{d1,o1,s'} c_{d2,o2,s'} c_{d3,o3,s}.
// Only the inter-dot class (d0 != d1 and d2 != d3) is accepted; with two dots
// those terms preserve the per-dot electron count, which keeps the
// charge-configuration block structure of the split intact.
struct GammaEntry {
  std::array<Dot, 4> dots{};
  std::array<int, 4> orbitals{};  // values in {1, 2}
  double value = 0.0;
};

struct HubbardParams {
  // eps[dot][orbital-1], meV
  std::array<std::array<double, 2>, 2> eps{{{0.0, 0.0}, {0.0, 0.0}}};
  // mu[dot], meV
  std::array<double, 2> mu{0.0, 0.0};
  // Symmetric 4x4 matrices over sites. tun must vanish on same-dot pairs and
  // on the diagonal. The diagonal of K is ignored: the i=j exchange operator
  // coincides with the i=j direct operator, whose weight C(i,i) is the
  // on-site repulsion, so counting K(i,i) too would double it.
  Eigen::Matrix4d tun = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d coulomb_direct = Eigen::Matrix4d::Zero();
  Eigen::Matrix4d coulomb_exchange = Eigen::Matrix4d::Zero();
  std::vector<GammaEntry> gamma_extra;

  void validate() const;  // throws ValidationError
};

void to_json(nlohmann::json& j, const HubbardParams& p);
void from_json(const nlohmann::json& j, HubbardParams& p);

// Two-electron single-dot energies: lowest singlet (both electrons in
// orbital 1) and lowest triplet (one electron per orbital).
struct DotSpectra {
  double e_s_l = 0.0;
  double e_t_l = 0.0;
  double e_s_r = 0.0;
  double e_t_r = 0.0;

  double e_st_l() const { return e_t_l - e_s_l; }
  double e_st_r() const { return e_t_r - e_s_r; }
};

DotSpectra dot_spectra(const HubbardParams& p);

// Term lists for the three pieces of the Hamiltonian:
//   u0: single-particle energies plus intra-dot direct/exchange Coulomb,
//   u1: inter-dot Coulomb (direct, exchange, and gamma_extra),
//   t:  inter-dot single-particle tunneling.
// u0 and u1 preserve the charge configuration; t changes it by (+-1, -+1).
std::vector<Term> u0_terms(const HubbardParams& p);
std::vector<Term> u1_terms(const HubbardParams& p);
std::vector<Term> tunneling_terms(const HubbardParams& p);

struct SplitOperators {
  ManyBodyOperator u0;
  ManyBodyOperator u1;
  ManyBodyOperator t;

  ManyBodyOperator u() const;  // u0 + u1
};

SplitOperators split_operators(const HubbardParams& p, const FockBasisPtr& basis);
ManyBodyOperator build_full_hamiltonian(const HubbardParams& p, const FockBasisPtr& basis);

}  // namespace hybq
