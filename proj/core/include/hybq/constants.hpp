#pragma once

namespace hybq {

// Energies are meV throughout; times are seconds.
inline constexpr double kPlanckMeVs = 4.135667696e-12;               // h in meV*s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbarMeVs = kPlanckMeVs / (2.0 * kPi);       // hbar in meV*s
inline constexpr double kMeVToGHz = 1.0 / (kPlanckMeVs * 1e9);       // E/h in GHz per meV

// Floor below which two charge-block eigenvalues coupled by tunneling are
// treated as degenerate and the generator construction refuses to divide.
inline constexpr double kDegeneracyFloorMeV = 1e-6;

}  // namespace hybq
