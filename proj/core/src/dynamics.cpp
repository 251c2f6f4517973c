#include "hybq/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hybq/constants.hpp"
#include "hybq/errors.hpp"

namespace hybq {

double DriveSpec::fastest_period_s() const {
  const double gap = qubit_from_matrix(base.h2).gap();
  const double e_fast = std::max(gap, kHbarMeVs * omega_rad_s);
  if (e_fast <= 0.0) throw ValidationError("drive has no positive energy scale");
  return kPlanckMeVs / e_fast;
}

void DriveSpec::validate() const {
  if (!(duration_s > 0.0)) throw ValidationError("duration must be positive");
  if (!(amplitude_mev >= 0.0)) throw ValidationError("amplitude must be >= 0");
  if (omega_rad_s < 0.0) throw ValidationError("angular frequency must be >= 0");
  const double dt = timestep_s > 0.0 ? timestep_s : default_timestep_s();
  if (dt > fastest_period_s() / 50.0) {
    throw ValidationError(
        "timestep too coarse: " + std::to_string(dt) + " s exceeds 1/50 of the "
        "fastest period " + std::to_string(fastest_period_s()) + " s");
  }
}

Eigen::Matrix2cd DriveSpec::hamiltonian_at(double t_s) const {
  double g = std::sin(omega_rad_s * t_s);
  if (shape == DriveShape::Square) g = (g >= 0.0) ? 1.0 : -1.0;
  Eigen::Matrix2cd h = base.h2;
  const double a = amplitude_mev * g;
  if (target == ModulatedTerm::OffDiagonal) {
    const double off = std::sqrt(1.5) * (base.jp + a);
    h(0, 1) = off;
    h(1, 0) = off;
  } else {
    h(1, 1) += a;
  }
  return h;
}

namespace {

// Exact exponential exp(-i H dt / hbar) for Hermitian 2x2 H via the Pauli
// decomposition H = a0 I + a.sigma.
Eigen::Matrix2cd step_unitary(const Eigen::Matrix2cd& h, double dt_s) {
  const double a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double ax = h(0, 1).real();
  const double ay = -h(0, 1).imag();
  const double a = std::sqrt(ax * ax + ay * ay + az * az);
  const double phi0 = a0 * dt_s / kHbarMeVs;
  const double phi = a * dt_s / kHbarMeVs;
  const Complex pref = std::exp(Complex(0.0, -phi0));
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity() * std::cos(phi);
  if (a > 0.0) {
    const Complex is = Complex(0.0, -std::sin(phi) / a);
    u(0, 0) += is * az;
    u(1, 1) -= is * az;
    u(0, 1) += is * Complex(ax, -ay);
    u(1, 0) += is * Complex(ax, ay);
  }
  return pref * u;
}

}  // namespace

EvolutionTrace propagate(const DriveSpec& drive, const Eigen::Vector2cd& initial) {
  drive.validate();
  if (std::abs(initial.norm() - 1.0) > 1e-9) {
    throw ValidationError("initial state must be normalized");
  }
  const double dt = drive.timestep_s > 0.0 ? drive.timestep_s : drive.default_timestep_s();
  const auto n_steps = static_cast<long>(std::ceil(drive.duration_s / dt));

  EvolutionTrace trace;
  trace.times_s.reserve(n_steps + 1);
  trace.p0.reserve(n_steps + 1);
  trace.p1.reserve(n_steps + 1);
  trace.norm.reserve(n_steps + 1);

  Eigen::Vector2cd psi = initial;
  double t = 0.0;
  auto record = [&] {
    trace.times_s.push_back(t);
    trace.p0.push_back(std::norm(psi(0)));
    trace.p1.push_back(std::norm(psi(1)));
    trace.norm.push_back(psi.norm());
  };
  record();
  for (long k = 0; k < n_steps; ++k) {
    const double step = std::min(dt, drive.duration_s - t);
    if (step <= 0.0) break;
    psi = step_unitary(drive.hamiltonian_at(t + 0.5 * step), step) * psi;
    t += step;
    record();
  }
  return trace;
}

double EvolutionTrace::max_p1() const {
  double m = 0.0;
  for (double v : p1) m = std::max(m, v);
  return m;
}

double resonance_frequency_ghz(const EffectiveQubit& q) { return q.resonance_ghz(); }

namespace {

// Least-squares residual of p1(t) ~ a + b cos(2wt) + d sin(2wt) at a fixed
// rate w; the linear coefficients are solved in closed form.  This model
// covers c sin^2(wt) and 1 - c sin^2(wt) alike, and the global fit is immune
// to the fast low-amplitude ripple riding on the slow population envelope.
// `stride` subsamples the trace so coarse scans stay cheap.
double sinusoid_residual(const EvolutionTrace& trace, double w, std::size_t stride) {
  Eigen::Matrix3d gram = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  double pp = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < trace.times_s.size(); i += stride) {
    const Eigen::Vector3d row(1.0, std::cos(2.0 * w * trace.times_s[i]),
                              std::sin(2.0 * w * trace.times_s[i]));
    gram += row * row.transpose();
    rhs += row * trace.p1[i];
    pp += trace.p1[i] * trace.p1[i];
    ++n;
  }
  const double nn = static_cast<double>(n);
  // Near w = 0 the cosine column is collinear with the constant one; score
  // such rates as explaining no oscillation at all.
  if (std::abs((gram / nn).determinant()) < 1e-9) {
    const double mean = rhs(0) / nn;
    return std::max(0.0, pp - mean * mean * nn);
  }
  const Eigen::Vector3d coef = gram.ldlt().solve(rhs);
  return std::max(0.0, pp - coef.dot(rhs));
}

}  // namespace

double fit_rabi_rate(const EvolutionTrace& trace) {
  const std::size_t n = trace.times_s.size();
  if (n < 8) throw ValidationError("trace too short to fit");
  const double t_end = trace.times_s.back();
  if (!(t_end > 0.0)) throw ValidationError("trace spans zero time");
  double lo = trace.p1.front(), hi = lo;
  for (double v : trace.p1) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 1e-9) return 0.0;  // population never moves: no oscillation

  // Bracket the rate.  The first crossing of the half-contrast level sits at
  // wt ~ pi/4 for a sin^2 envelope; a generous factor either side absorbs the
  // model dependence of that estimate.  If the trace never reaches half
  // contrast, scan everything the sampling can resolve.
  const double dt = t_end / static_cast<double>(n - 1);
  double w_lo = kPi / (8.0 * t_end);
  double w_hi = kPi / (2.0 * dt);
  const double half = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < n; ++i) {
    if ((trace.p1[i] >= half) != (trace.p1.front() >= half)) {
      const double w_est = 0.25 * kPi / trace.times_s[i];
      w_lo = std::max(w_lo, w_est / 6.0);
      w_hi = std::min(w_hi, w_est * 6.0);
      break;
    }
  }

  const std::size_t stride = std::max<std::size_t>(1, n / 4000);
  const int n_scan = 400;
  double best_w = w_lo;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= n_scan; ++k) {
    const double w = w_lo * std::pow(w_hi / w_lo, static_cast<double>(k) / n_scan);
    const double sse = sinusoid_residual(trace, w, stride);
    if (sse < best_sse) {
      best_sse = sse;
      best_w = w;
    }
  }

  // Descend to the local minimum on the full-resolution trace.
  double h = best_w * 0.01;
  double f1 = sinusoid_residual(trace, best_w, 1);
  for (int iter = 0; iter < 60 && h > best_w * 1e-13; ++iter) {
    const double f0 = sinusoid_residual(trace, best_w - h, 1);
    const double f2 = sinusoid_residual(trace, best_w + h, 1);
    if (f0 < f1 || f2 < f1) {
      if (f0 < f2) {
        best_w -= h;
        f1 = f0;
      } else {
        best_w += h;
        f1 = f2;
      }
      continue;
    }
    const double denom = f0 - 2.0 * f1 + f2;
    if (denom > 0.0) {
      const double shift = 0.5 * h * (f0 - f2) / denom;
      const double fs = sinusoid_residual(trace, best_w + shift, 1);
      if (fs < f1) {
        best_w += shift;
        f1 = fs;
      }
    }
    h *= 0.25;
  }
  return best_w;
}

}  // namespace hybq
