#include "hybq/hubbard.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>

#include "hybq/errors.hpp"

namespace hybq {

int site_index(Dot dot, int orbital) {
  if (orbital != 1 && orbital != 2) {
    throw ValidationError("orbital must be 1 or 2, got " + std::to_string(orbital));
  }
  return 2 * static_cast<int>(dot) + (orbital - 1);
}

Dot site_dot(int site) { return site < 2 ? Dot::Left : Dot::Right; }

namespace {

int up_mode(int site) { return 2 * site; }
int down_mode(int site) { return 2 * site + 1; }
int mode_of(int site, int spin01) { return 2 * site + spin01; }

bool symmetric(const Eigen::Matrix4d& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

void HubbardParams::validate() const {
  for (const auto& row : eps) {
    for (double e : row) {
      if (!std::isfinite(e)) throw ValidationError("eps entries must be finite");
    }
  }
  for (double m : mu) {
    if (!std::isfinite(m)) throw ValidationError("mu entries must be finite");
  }
  for (const auto* m : {&tun, &coulomb_direct, &coulomb_exchange}) {
    if (!m->allFinite()) throw ValidationError("matrix entries must be finite");
    if (!symmetric(*m)) throw ValidationError("tun, C, K must be symmetric");
  }
  for (int p = 0; p < kNumSites; ++p) {
    for (int q = 0; q < kNumSites; ++q) {
      if (site_dot(p) == site_dot(q) && tun(p, q) != 0.0) {
        throw ValidationError("tun must vanish on same-dot site pairs");
      }
    }
  }
  for (const auto& g : gamma_extra) {
    for (int o : g.orbitals) {
      if (o != 1 && o != 2) throw ValidationError("gamma orbital must be 1 or 2");
    }
    if (!std::isfinite(g.value)) throw ValidationError("gamma value must be finite");
    if (g.dots[0] == g.dots[1] || g.dots[2] == g.dots[3]) {
      throw ValidationError(
          "gamma entries must have distinct creation dots and distinct "
          "annihilation dots (inter-dot class); other classes would break the "
          "charge-configuration split");
    }
  }
}

DotSpectra dot_spectra(const HubbardParams& p) {
  p.validate();
  const auto& C = p.coulomb_direct;
  const auto& K = p.coulomb_exchange;
  const int l1 = site_index(Dot::Left, 1), l2 = site_index(Dot::Left, 2);
  const int r1 = site_index(Dot::Right, 1), r2 = site_index(Dot::Right, 2);
  DotSpectra s;
  s.e_s_l = 2 * p.eps[0][0] + C(l1, l1) + 2 * p.mu[0];
  s.e_t_l = p.eps[0][0] + p.eps[0][1] + C(l1, l2) - K(l1, l2) + 2 * p.mu[0];
  s.e_s_r = 2 * p.eps[1][0] + C(r1, r1) + 2 * p.mu[1];
  s.e_t_r = p.eps[1][0] + p.eps[1][1] + C(r1, r2) - K(r1, r2) + 2 * p.mu[1];
  return s;
}

std::vector<Term> u0_terms(const HubbardParams& p) {
  std::vector<Term> terms;
  for (int site = 0; site < kNumSites; ++site) {
    const int dot = site / 2;
    const double e = p.eps[dot][site % 2] + p.mu[dot];
    for (int s = 0; s < 2; ++s) {
      if (e != 0.0) terms.push_back(Term::number(mode_of(site, s), e));
    }
  }
  for (int pi = 0; pi < kNumSites; ++pi) {
    for (int qi = 0; qi < kNumSites; ++qi) {
      if (site_dot(pi) != site_dot(qi)) continue;
      const double c = p.coulomb_direct(pi, qi);
      const double k = p.coulomb_exchange(pi, qi);
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          if (c != 0.0) {
            terms.push_back(Term::two_body(mode_of(pi, s), mode_of(qi, sp),
                                           mode_of(qi, sp), mode_of(pi, s), 0.5 * c));
          }
          if (pi != qi && k != 0.0) {
            terms.push_back(Term::two_body(mode_of(pi, s), mode_of(qi, sp),
                                           mode_of(pi, sp), mode_of(qi, s), 0.5 * k));
          }
        }
      }
    }
  }
  return terms;
}

std::vector<Term> u1_terms(const HubbardParams& p) {
  std::vector<Term> terms;
  for (int pi = 0; pi < kNumSites; ++pi) {
    for (int qi = 0; qi < kNumSites; ++qi) {
      if (site_dot(pi) == site_dot(qi)) continue;
      const double c = p.coulomb_direct(pi, qi);
      const double k = p.coulomb_exchange(pi, qi);
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          if (c != 0.0) {
            terms.push_back(Term::two_body(mode_of(pi, s), mode_of(qi, sp),
                                           mode_of(qi, sp), mode_of(pi, s), 0.5 * c));
          }
          if (k != 0.0) {
            terms.push_back(Term::two_body(mode_of(pi, s), mode_of(qi, sp),
                                           mode_of(pi, sp), mode_of(qi, s), 0.5 * k));
          }
        }
      }
    }
  }
  for (const auto& g : p.gamma_extra) {
    if (g.value == 0.0) continue;
    const int a = site_index(g.dots[0], g.orbitals[0]);
    const int b = site_index(g.dots[1], g.orbitals[1]);
    const int c = site_index(g.dots[2], g.orbitals[2]);
    const int d = site_index(g.dots[3], g.orbitals[3]);
    for (int s = 0; s < 2; ++s) {
      for (int sp = 0; sp < 2; ++sp) {
        terms.push_back(Term::two_body(mode_of(a, s), mode_of(b, sp), mode_of(c, sp),
                                       mode_of(d, s), 0.5 * g.value));
      }
    }
  }
  return terms;
}

std::vector<Term> tunneling_terms(const HubbardParams& p) {
  std::vector<Term> terms;
  for (int pi = 0; pi < kNumSites; ++pi) {
    for (int qi = 0; qi < kNumSites; ++qi) {
      if (site_dot(pi) == site_dot(qi)) continue;
      const double t = p.tun(pi, qi);
      if (t == 0.0) continue;
      for (int s = 0; s < 2; ++s) {
        terms.push_back(Term::hopping(mode_of(pi, s), mode_of(qi, s), t));
      }
    }
  }
  return terms;
}

SplitOperators split_operators(const HubbardParams& p, const FockBasisPtr& basis) {
  p.validate();
  SplitOperators out;
  out.u0 = build_operator(basis, u0_terms(p));
  out.u1 = build_operator(basis, u1_terms(p));
  out.t = build_operator(basis, tunneling_terms(p));
  return out;
}

ManyBodyOperator SplitOperators::u() const { return u0 + u1; }

ManyBodyOperator build_full_hamiltonian(const HubbardParams& p, const FockBasisPtr& basis) {
  p.validate();
  std::vector<Term> terms = u0_terms(p);
  const auto u1 = u1_terms(p);
  const auto tt = tunneling_terms(p);
  terms.insert(terms.end(), u1.begin(), u1.end());
  terms.insert(terms.end(), tt.begin(), tt.end());
  return build_operator(basis, terms);
}

namespace {

char dot_char(Dot d) { return d == Dot::Left ? 'L' : 'R'; }

Dot dot_from_char(char c) {
  if (c == 'L') return Dot::Left;
  if (c == 'R') return Dot::Right;
  throw ValidationError(std::string("dot label must be 'L' or 'R', got '") + c + "'");
}

nlohmann::json matrix_to_json(const Eigen::Matrix4d& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < 4; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Eigen::Matrix4d matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array() || j.size() != 4) {
    throw ValidationError(std::string(name) + " must be a 4x4 array over sites [L1,L2,R1,R2]");
  }
  Eigen::Matrix4d m;
  for (int i = 0; i < 4; ++i) {
    if (!j[i].is_array() || j[i].size() != 4) {
      throw ValidationError(std::string(name) + " row " + std::to_string(i) +
                            " must have 4 entries");
    }
    for (int k = 0; k < 4; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const HubbardParams& p) {
  j = nlohmann::json{
      {"eps", {{"L", {p.eps[0][0], p.eps[0][1]}}, {"R", {p.eps[1][0], p.eps[1][1]}}}},
      {"mu", {{"L", p.mu[0]}, {"R", p.mu[1]}}},
      {"tun", matrix_to_json(p.tun)},
      {"C", matrix_to_json(p.coulomb_direct)},
      {"K", matrix_to_json(p.coulomb_exchange)},
  };
  nlohmann::json gammas = nlohmann::json::array();
  for (const auto& g : p.gamma_extra) {
    std::string dots;
    for (Dot d : g.dots) dots += dot_char(d);
    gammas.push_back(nlohmann::json{
        {"dots", dots},
        {"orbitals", {g.orbitals[0], g.orbitals[1], g.orbitals[2], g.orbitals[3]}},
        {"value", g.value}});
  }
  j["gamma"] = gammas;
}

void from_json(const nlohmann::json& j, HubbardParams& p) {
  p = HubbardParams{};
  const auto& eps = j.at("eps");
  for (int d = 0; d < 2; ++d) {
    const auto& row = eps.at(d == 0 ? "L" : "R");
    if (!row.is_array() || row.size() != 2) {
      throw ValidationError("eps.L and eps.R must each list two orbital energies");
    }
    p.eps[d] = {row[0].get<double>(), row[1].get<double>()};
  }
  p.mu = {j.at("mu").at("L").get<double>(), j.at("mu").at("R").get<double>()};
  p.tun = matrix_from_json(j.at("tun"), "tun");
  p.coulomb_direct = matrix_from_json(j.at("C"), "C");
  p.coulomb_exchange = matrix_from_json(j.at("K"), "K");
  if (j.contains("gamma")) {
    for (const auto& gj : j.at("gamma")) {
      GammaEntry g;
      const std::string dots = gj.at("dots").get<std::string>();
      if (dots.size() != 4) throw ValidationError("gamma dots must be 4 letters");
      for (int i = 0; i < 4; ++i) g.dots[i] = dot_from_char(dots[i]);
      const auto& orbs = gj.at("orbitals");
      if (!orbs.is_array() || orbs.size() != 4) {
        throw ValidationError("gamma orbitals must list 4 entries");
      }
      for (int i = 0; i < 4; ++i) g.orbitals[i] = orbs[i].get<int>();
      g.value = gj.at("value").get<double>();
      p.gamma_extra.push_back(g);
    }
  }
  p.validate();
}

}  // namespace hybq
