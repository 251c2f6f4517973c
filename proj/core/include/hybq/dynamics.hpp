#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hybq/schrieffer_wolff.hpp"

namespace hybq {

enum class ModulatedTerm { OffDiagonal, Detuning };
enum class DriveShape { Sine, Square };

// Time-dependent two-level Hamiltonian built on an EffectiveQubit:
//   OffDiagonal: both off-diagonal entries become sqrt(3/2)*(jp + A g(wt)),
//                i.e. the amplitude modulates the exchange coupling jp;
//   Detuning:    the (1,1) entry is shifted by A g(wt).
// g is sin for Sine and sign(sin) for Square.
struct DriveSpec {
  EffectiveQubit base;
  ModulatedTerm target = ModulatedTerm::OffDiagonal;
  DriveShape shape = DriveShape::Sine;
  double amplitude_mev = 0.0;
  double omega_rad_s = 0.0;   // drive angular frequency
  double duration_s = 0.0;
  double timestep_s = 0.0;    // <= 0 selects default_timestep()

  // h / max(gap, hbar*omega): the shortest intrinsic period.
  double fastest_period_s() const;
  double default_timestep_s() const { return fastest_period_s() / 200.0; }
  void validate() const;  // timestep must resolve the fastest period / 50
  Eigen::Matrix2cd hamiltonian_at(double t_s) const;
};

struct EvolutionTrace {
  std::vector<double> times_s;
  std::vector<double> p0;      // |<0|psi>|^2
  std::vector<double> p1;      // |<1|psi>|^2
  std::vector<double> norm;    // |<psi|psi>|

  double max_p1() const;
};

// Piecewise-constant midpoint propagation with exact 2x2 step exponentials;
// norm is preserved to machine precision by construction.
EvolutionTrace propagate(const DriveSpec& drive, const Eigen::Vector2cd& initial);

// Qubit transition frequency (E1 - E0)/h of a static 2x2, in GHz.
double resonance_frequency_ghz(const EffectiveQubit& q);

// Least-squares fit of p1(t) ~ a + c * sin^2(Omega t) returning Omega (rad/s).
// Brackets Omega from the first half-contrast crossing, scans the residual on
// a log-spaced grid, then refines with local stepping and a parabolic finish.
// Returns 0.0 for flat traces (contrast below 1e-9).
double fit_rabi_rate(const EvolutionTrace& trace);

}  // namespace hybq
