#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "trapkohn/error.hpp"
#include "trapkohn/frequency.hpp"
#include "trapkohn/geometry.hpp"
#include "trapkohn/model.hpp"
#include "trapkohn/oracle/phase_field.hpp"

namespace trapkohn::oracle {

/// Default damping of the time-domain oracle, in units of omega_l.
inline constexpr double kDefaultGammaRel = 0.05;

struct TimeDomainOptions {
  double amplitude = 1.0;
  /// Ramp duration and run length in units of 1/gamma.
  double ramp_decay_times = 5.0;
  double run_decay_times = 20.0;
  /// Number of drive periods at the end of the run used for the fit.
  double fit_periods = 5.0;
  /// Largest acceptable rms fit residual relative to the fitted amplitude.
  double max_fit_residual = 0.01;
  DeltaKind delta = DeltaKind::nearest_node;
};

struct TimeDomainResult {
  cplx mobility;
  double fit_residual = 0.0;
  std::size_t steps = 0;
};

/// Least-squares fit of samples to A cos(omega t) + B sin(omega t).
struct HarmonicFit {
  double cos_coef = 0.0;
  double sin_coef = 0.0;
  double rms_residual = 0.0;

  double amplitude() const { return std::hypot(cos_coef, sin_coef); }
};

inline HarmonicFit fit_harmonic(const std::vector<double> &t, const std::vector<double> &y, double omega) {
  if (t.size() != y.size() || t.size() < 3)
    throw DomainError("harmonic fit needs at least 3 matching samples");
  double cc = 0.0, cs = 0.0, ss = 0.0, yc = 0.0, ys = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double c = std::cos(omega * t[k]);
    const double s = std::sin(omega * t[k]);
    cc += c * c;
    cs += c * s;
    ss += s * s;
    yc += y[k] * c;
    ys += y[k] * s;
  }
  const double det = cc * ss - cs * cs;
  if (!(std::abs(det) > 0.0))
    throw DomainError("harmonic fit is singular; fit window too short");
  HarmonicFit fit;
  fit.cos_coef = (yc * ss - ys * cs) / det;
  fit.sin_coef = (ys * cc - yc * cs) / det;
  double r2 = 0.0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    const double r = y[k] - fit.cos_coef * std::cos(omega * t[k]) - fit.sin_coef * std::sin(omega * t[k]);
    r2 += r * r;
  }
  fit.rms_residual = std::sqrt(r2 / static_cast<double>(t.size()));
  return fit;
}

/// Mobility from a driven, damped simulation of the phase equation.
///
/// The force F0 sin(omega t) is ramped in over ramp_decay_times / gamma and
/// the run ends at run_decay_times / gamma. The slow current
/// j(z, t) = -(1/pi) d_t phi(u0(z), t) is fitted to A cos + B sin over the
/// final fit_periods drive periods. With e^{-i omega t} time dependence and
/// F = Re(-i F0 e^{-i omega t}), j = Re(-i mu F0 e^{-i omega t}) gives
/// mu = (B - i A) / F0.
inline TimeDomainResult timedomain_mobility(double z, double z0, double omega, double gamma,
                                            const ModelParams &p, const DerivedConstants &dc,
                                            const UniformGrid &grid, double dt,
                                            const TimeDomainOptions &opt = {}) {
  if (!(gamma > 0.0))
    throw DomainError("time-domain mobility needs gamma > 0 so transients decay");
  if (!(omega > 0.0))
    throw DomainError("time-domain mobility needs a positive drive frequency");
  const double u = u_of_z(z, p.l_fermi);

  ForceSpec force;
  force.z0 = z0;
  force.amplitude = opt.amplitude;
  force.omega = omega;
  force.ramp_time = opt.ramp_decay_times / gamma;
  force.gamma = gamma;
  force.delta = opt.delta;

  const double t_end = opt.run_decay_times / gamma;
  const double t_fit = t_end - opt.fit_periods * 2.0 * std::numbers::pi / omega;
  if (t_fit <= force.ramp_time)
    throw DomainError("fit window overlaps the force ramp; increase run_decay_times");

  std::vector<double> ts, js;
  std::size_t steps = 0;
  integrate_phase_field(PhaseField(grid), &force, p, dc, dt, t_end, [&](const PhaseField &f) {
    ++steps;
    if (f.time >= t_fit) {
      ts.push_back(f.time);
      js.push_back(-PhaseField::interpolate(f.phidot, f.grid, u) / std::numbers::pi);
    }
  });

  const HarmonicFit fit = fit_harmonic(ts, js, omega);
  TimeDomainResult r;
  r.steps = steps - 1;
  r.fit_residual = fit.rms_residual / std::max(fit.amplitude(), 1e-300);
  if (r.fit_residual > opt.max_fit_residual)
    throw IntegrationError("transient not decayed: fit residual " + std::to_string(r.fit_residual) +
                           " of amplitude; run longer or increase gamma");
  r.mobility = cplx{fit.sin_coef, -fit.cos_coef} / opt.amplitude;
  return r;
}

/// Angular frequency of a sampled oscillation from a least-squares fit of
/// its zero-crossing times t_k = t_0 + k T / 2.
inline double zero_crossing_frequency(const std::vector<double> &t, const std::vector<double> &x) {
  std::vector<double> crossings;
  for (std::size_t k = 1; k < t.size(); ++k) {
    if ((x[k - 1] < 0.0 && x[k] >= 0.0) || (x[k - 1] > 0.0 && x[k] <= 0.0)) {
      const double frac = x[k - 1] / (x[k - 1] - x[k]);
      crossings.push_back(t[k - 1] + frac * (t[k] - t[k - 1]));
    }
  }
  if (crossings.size() < 3)
    throw DomainError("need at least 3 zero crossings to fit a frequency");
  const auto m = static_cast<double>(crossings.size());
  double sk = 0.0, st = 0.0, skk = 0.0, skt = 0.0;
  for (std::size_t k = 0; k < crossings.size(); ++k) {
    const auto kk = static_cast<double>(k);
    sk += kk;
    st += crossings[k];
    skk += kk * kk;
    skt += kk * crossings[k];
  }
  const double half_period = (m * skt - sk * st) / (m * skk - sk * sk);
  return std::numbers::pi / half_period;
}

} // namespace trapkohn::oracle
