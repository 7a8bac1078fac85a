#pragma once

#include <algorithm>
#include <concepts>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <vector>

#include "trapkohn/error.hpp"
#include "trapkohn/geometry.hpp"
#include "trapkohn/model.hpp"
#include "trapkohn/spectral.hpp"

namespace trapkohn::oracle {

/// Phase profile phi(u) and its time derivative on a uniform grid of (-pi, 0).
/// Both vectors hold all grid nodes; the endpoint entries stay zero.
struct PhaseField {
  UniformGrid grid;
  std::vector<double> phi;
  std::vector<double> phidot;
  double time = 0.0;

  explicit PhaseField(UniformGrid g) : grid(g), phi(g.size(), 0.0), phidot(g.size(), 0.0) {}

  template <class F, class G>
  static PhaseField from_functions(UniformGrid g, F &&phi0, G &&phidot0) {
    PhaseField f(g);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) {
      f.phi[i] = phi0(g.node(i));
      f.phidot[i] = phidot0(g.node(i));
    }
    return f;
  }

  bool dirichlet() const { return phi.front() == 0.0 && phi.back() == 0.0 && phidot.front() == 0.0 && phidot.back() == 0.0; }

  /// Linear interpolation of a nodal vector at angle u.
  static double interpolate(const std::vector<double> &v, const UniformGrid &g, double u) {
    check_angle(u);
    const double x = (u + std::numbers::pi) / g.spacing();
    auto i = static_cast<std::size_t>(std::floor(x));
    if (i + 1 >= g.size())
      i = g.size() - 2;
    const double t = x - static_cast<double>(i);
    return (1.0 - t) * v[i] + t * v[i + 1];
  }
};

enum class DeltaKind {
  nearest_node, ///< weight 1/h on the interior node closest to u0(z0)
  linear_split, ///< weights split linearly between the two bracketing nodes
};

/// Point force F(t) = amplitude * ramp(t) * sin(omega t) applied at z0, plus
/// the linear damping rate of the phase equation.
struct ForceSpec {
  double z0 = 0.0;
  double amplitude = 1.0;
  double omega = 1.0;
  double ramp_time = 0.0;
  double gamma = 0.0;
  DeltaKind delta = DeltaKind::nearest_node;

  /// Smooth ramp (1 - cos(pi t / T)) / 2 over the ramp time.
  double envelope(double t) const {
    if (ramp_time <= 0.0 || t >= ramp_time)
      return 1.0;
    if (t <= 0.0)
      return 0.0;
    return 0.5 * (1.0 - std::cos(std::numbers::pi * t / ramp_time));
  }
  double value(double t) const { return amplitude * envelope(t) * std::sin(omega * t); }
};

/// Right-hand side of the phase equation without the damping term:
///   eps^2 phi'' - omega_l^2 V^2 sin(u) (2/pi) int sin(u') phi(u') du'
///   - F(t) (eps K / hbar) delta(u0(z0) - u) + F(t) (2 omega_l V / (pi hbar)) sin(u0(z0)) sin(u).
/// The projector integral uses the trapezoid rule on the grid.
class PhaseOperator {
public:
  PhaseOperator(UniformGrid grid, const ModelParams &p, const DerivedConstants &dc,
                const ForceSpec *force)
      : grid_(grid), p_(p), dc_(dc), sin_u_(grid.size(), 0.0), delta_(grid.size(), 0.0) {
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
      sin_u_[i] = std::sin(grid.node(i));
    if (force) {
      force_ = *force;
      if (!(std::abs(force->z0) < p.l_fermi))
        throw DomainError("force position must lie strictly inside the Fermi sea");
      const double u0 = u_of_z(force->z0, p.l_fermi);
      sin_u0_ = std::sin(u0);
      place_delta(u0, force->delta);
    }
  }

  const UniformGrid &grid() const { return grid_; }

  /// Adds the acceleration at time t to `acc` (resized and overwritten).
  void acceleration(const std::vector<double> &phi, double t, std::vector<double> &acc) const {
    const std::size_t n = grid_.size();
    acc.assign(n, 0.0);
    const double h = grid_.spacing();
    const double c2 = dc_.eps_tilde * dc_.eps_tilde / (h * h);
    const double proj = projection(phi);
    const double wl2v2 = p_.omega_l * p_.omega_l * p_.vtilde_c * p_.vtilde_c;
    for (std::size_t i = 1; i + 1 < n; ++i)
      acc[i] = c2 * (phi[i - 1] - 2.0 * phi[i] + phi[i + 1]) - wl2v2 * sin_u_[i] * proj;
    if (force_) {
      const double f = force_->value(t);
      if (f != 0.0) {
        const double point = f * dc_.eps_tilde * dc_.k_lutt / p_.hbar;
        const double smooth = f * 2.0 * p_.omega_l * p_.vtilde_c / (std::numbers::pi * p_.hbar) * sin_u0_;
        for (std::size_t i = 1; i + 1 < n; ++i)
          acc[i] += -point * delta_[i] + smooth * sin_u_[i];
      }
    }
  }

  /// (2/pi) int sin(u) phi(u) du by the trapezoid rule.
  double projection(const std::vector<double> &phi) const {
    double s = 0.0;
    for (std::size_t i = 1; i + 1 < grid_.size(); ++i)
      s += sin_u_[i] * phi[i];
    return 2.0 / std::numbers::pi * grid_.spacing() * s;
  }

  /// Conserved energy of the undriven, undamped discrete system.
  double energy(const PhaseField &f) const {
    const double h = grid_.spacing();
    double kin = 0.0;
    double grad = 0.0;
    for (std::size_t i = 1; i + 1 < grid_.size(); ++i)
      kin += f.phidot[i] * f.phidot[i];
    for (std::size_t i = 0; i + 1 < grid_.size(); ++i) {
      const double d = (f.phi[i + 1] - f.phi[i]) / h;
      grad += d * d;
    }
    const double proj = projection(f.phi);
    const double wl2v2 = p_.omega_l * p_.omega_l * p_.vtilde_c * p_.vtilde_c;
    return 0.5 * h * kin + 0.5 * dc_.eps_tilde * dc_.eps_tilde * h * grad +
           0.25 * std::numbers::pi * wl2v2 * proj * proj;
  }

  double damping() const { return force_ ? force_->gamma : 0.0; }

private:
  void place_delta(double u0, DeltaKind kind) {
    const double h = grid_.spacing();
    const double x = (u0 + std::numbers::pi) / h;
    const std::size_t last = grid_.interior();
    if (kind == DeltaKind::nearest_node) {
      auto i = static_cast<std::size_t>(std::lround(x));
      i = std::clamp<std::size_t>(i, 1, last);
      delta_[i] = 1.0 / h;
      return;
    }
    auto i = static_cast<std::size_t>(std::floor(x));
    const double t = x - static_cast<double>(i);
    if (i >= 1 && i <= last)
      delta_[i] += (1.0 - t) / h;
    if (i + 1 >= 1 && i + 1 <= last)
      delta_[i + 1] += t / h;
  }

  UniformGrid grid_;
  ModelParams p_;
  DerivedConstants dc_;
  std::vector<double> sin_u_;
  std::vector<double> delta_;
  std::optional<ForceSpec> force_;
  double sin_u0_ = 0.0;
};

/// Largest stable step for the wave part of the phase equation.
inline double cfl_limit(const UniformGrid &g, const DerivedConstants &dc) {
  return 0.5 * g.spacing() / dc.eps_tilde;
}

/// Advances the phase field with velocity Verlet (kick-drift-kick). Damping
/// enters the first half kick explicitly and the second implicitly, which
/// keeps the scheme second order. `observer(const PhaseField&)` is called
/// on the initial state and after every step.
template <std::invocable<const PhaseField &> Observer>
PhaseField integrate_phase_field(PhaseField state, const ForceSpec *force, const ModelParams &p,
                                 const DerivedConstants &dc, double dt, double t_end,
                                 Observer &&observer) {
  if (!(dt > 0.0))
    throw DomainError("time step must be positive");
  if (dt > cfl_limit(state.grid, dc) * (1.0 + 1e-12))
    throw IntegrationError("CFL violation: dt = " + std::to_string(dt) + " exceeds 0.5 h / eps = " +
                           std::to_string(cfl_limit(state.grid, dc)));
  if (!state.dirichlet())
    throw DomainError("initial phase field violates the Dirichlet condition");

  const PhaseOperator op(state.grid, p, dc, force);
  const double gamma = op.damping();
  const std::size_t n = state.grid.size();
  const auto steps = static_cast<std::size_t>(std::llround(std::ceil((t_end - state.time) / dt - 1e-9)));
  std::vector<double> acc;
  op.acceleration(state.phi, state.time, acc);
  observer(static_cast<const PhaseField &>(state));

  const double t0 = state.time;
  const double implicit = 1.0 / (1.0 + 0.5 * gamma * dt);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      state.phidot[i] += 0.5 * dt * (acc[i] - gamma * state.phidot[i]);
      state.phi[i] += dt * state.phidot[i];
    }
    state.time = t0 + dt * static_cast<double>(k + 1);
    op.acceleration(state.phi, state.time, acc);
    for (std::size_t i = 1; i + 1 < n; ++i)
      state.phidot[i] = (state.phidot[i] + 0.5 * dt * acc[i]) * implicit;
    if ((k & 255u) == 0 || k + 1 == steps) {
      for (std::size_t i = 1; i + 1 < n; ++i)
        if (!std::isfinite(state.phi[i]) || !std::isfinite(state.phidot[i]))
          throw IntegrationError("non-finite phase field at t = " + std::to_string(state.time) +
                                 " (node " + std::to_string(i) + ")");
    }
    observer(static_cast<const PhaseField &>(state));
  }
  return state;
}

/// Snapshots of an integration run, taken every `stride` steps.
struct Trajectory {
  std::vector<PhaseField> snapshots;
};

inline Trajectory integrate_phase_field(const PhaseField &initial, const ForceSpec *force,
                                        const ModelParams &p, const DerivedConstants &dc, double dt,
                                        double t_end, std::size_t stride = 1) {
  if (stride == 0)
    throw DomainError("snapshot stride must be >= 1");
  Trajectory traj;
  std::size_t count = 0;
  integrate_phase_field(initial, force, p, dc, dt, t_end, [&](const PhaseField &f) {
    if (count++ % stride == 0)
      traj.snapshots.push_back(f);
  });
  return traj;
}

/// Centre-of-mass displacement carried by the Kohn mode,
/// z_S = (2 / (pi k_F)) int sin(u) phi(u) du.
inline double center_of_mass(const PhaseField &f, double k_fermi) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < f.grid.size(); ++i)
    s += std::sin(f.grid.node(i)) * f.phi[i];
  return 2.0 / (std::numbers::pi * k_fermi) * f.grid.spacing() * s;
}

inline constexpr std::size_t kMinKohnNodes = 64;

/// Relative max-norm residual of the undriven phase operator applied to the
/// Kohn profile sin(u) at frequency omega_l:
///   || eps^2 phi'' - omega_l^2 V^2 sin(u) (2/pi) int sin phi + omega_l^2 phi || / || omega_l^2 phi ||.
inline double kohn_mode_residual(const ModelParams &p, const DerivedConstants &dc, const UniformGrid &g) {
  if (g.interior() < kMinKohnNodes)
    throw DomainError("Kohn residual needs >= 64 interior nodes");
  const PhaseOperator op(g, p, dc, nullptr);
  std::vector<double> phi(g.size(), 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i)
    phi[i] = std::sin(g.node(i));
  std::vector<double> acc;
  op.acceleration(phi, 0.0, acc);
  const double wl2 = p.omega_l * p.omega_l;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 1; i + 1 < g.size(); ++i) {
    num = std::max(num, std::abs(acc[i] + wl2 * phi[i]));
    den = std::max(den, std::abs(wl2 * phi[i]));
  }
  return num / den;
}

} // namespace trapkohn::oracle
