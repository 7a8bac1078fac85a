#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "trapkohn/error.hpp"
#include "trapkohn/frequency.hpp"
#include "trapkohn/model.hpp"

namespace trapkohn {

/// Mode number of the sine basis on (-pi, 0); always >= 1.
class ModeIndex {
public:
  explicit ModeIndex(long n) : n_(n) {
    if (n < 1)
      throw DomainError("mode index must be >= 1");
  }
  long value() const { return n_; }
  double as_double() const { return static_cast<double>(n_); }

private:
  long n_;
};

inline constexpr double kSqrt2OverPi = 0.79788456080286535588; // sqrt(2/pi)

inline void check_angle(double u) {
  if (!(u >= -std::numbers::pi && u <= 0.0))
    throw DomainError("angle outside [-pi, 0]: u = " + std::to_string(u));
}

/// phi_n(u) = sqrt(2/pi) sin(n u), orthonormal on (-pi, 0).
inline double basis_fn(ModeIndex n, double u) {
  check_angle(u);
  return kSqrt2OverPi * std::sin(n.as_double() * u);
}

/// Generates sin(n u), n = 1, 2, ... by angle addition, reseeded with exact
/// values periodically so the rounding error stays at a few ulp.
class SineSequence {
public:
  explicit SineSequence(double u) : u_(u), c1_(std::cos(u)), s1_(std::sin(u)), s_(s1_), c_(c1_) {}

  /// sin(n u) for the current n (starts at n = 1).
  double value() const { return s_; }
  long index() const { return n_; }

  void advance() {
    ++n_;
    if (n_ % kReseed == 0) {
      const double a = static_cast<double>(n_) * u_;
      s_ = std::sin(a);
      c_ = std::cos(a);
      return;
    }
    const double s = s_ * c1_ + c_ * s1_;
    const double c = c_ * c1_ - s_ * s1_;
    s_ = s;
    c_ = c;
  }

private:
  static constexpr long kReseed = 128;
  double u_;
  double c1_, s1_;
  double s_, c_;
  long n_ = 1;
};

/// lambda_n^2(omega) of the operator L_omega, real probe frequency.
inline double eigenvalue_sq(ModeIndex n, double omega, const DerivedConstants &dc,
                            const ModelParams &p) {
  const double wl2 = p.omega_l * p.omega_l;
  if (n.value() == 1)
    return 1.0 - omega * omega / wl2;
  const double nn = n.as_double();
  return (nn * nn * dc.eps_tilde * dc.eps_tilde - omega * omega) / wl2;
}

/// lambda_n^2 at a complex frequency (omega^2 -> w^2 + i gamma w).
inline cplx eigenvalue_sq(ModeIndex n, const ComplexFrequency &f, const DerivedConstants &dc,
                          const ModelParams &p) {
  const double wl2 = p.omega_l * p.omega_l;
  const cplx s = f.squared();
  if (n.value() == 1)
    return 1.0 - s / wl2;
  const double nn = n.as_double();
  return (nn * nn * dc.eps_tilde * dc.eps_tilde - s) / wl2;
}

/// Relative distance below which a real frequency counts as sitting on a pole.
inline constexpr double kPoleTolerance = 1e-12;

/// True if a real frequency (no shift, no damping) hits omega_l or n eps for
/// some 2 <= n <= n_max.
inline bool hits_real_pole(const ComplexFrequency &f, const DerivedConstants &dc,
                           const ModelParams &p, long n_max) {
  if (!f.on_real_axis())
    return false;
  const double w = std::abs(f.omega);
  if (std::abs(w - p.omega_l) <= kPoleTolerance * p.omega_l)
    return true;
  const double ratio = w / dc.eps_tilde;
  const double n = std::round(ratio);
  return n >= 2.0 && n <= static_cast<double>(n_max) &&
         std::abs(w - n * dc.eps_tilde) <= kPoleTolerance * p.omega_l;
}

/// Uniform grid on [-pi, 0] with `interior` unknowns; endpoints carry the
/// Dirichlet condition.
class UniformGrid {
public:
  explicit UniformGrid(std::size_t interior) : interior_(interior) {
    if (interior < 1)
      throw DomainError("uniform grid needs at least one interior node");
    h_ = std::numbers::pi / static_cast<double>(interior + 1);
  }

  std::size_t interior() const { return interior_; }
  /// Total node count including both endpoints.
  std::size_t size() const { return interior_ + 2; }
  double spacing() const { return h_; }
  /// Node i in 0..size()-1; node 0 is -pi, node size()-1 is 0.
  double node(std::size_t i) const {
    return i + 1 == size() ? 0.0 : -std::numbers::pi + h_ * static_cast<double>(i);
  }
  /// Same interval with the spacing halved.
  UniformGrid refined() const { return UniformGrid(2 * interior_ + 1); }

private:
  std::size_t interior_;
  double h_;
};

/// Field samples on a UniformGrid, endpoints pinned to zero.
template <class T> class GridField {
public:
  explicit GridField(UniformGrid grid) : grid_(grid), values_(grid.size(), T{}) {}

  template <class F> static GridField sample(UniformGrid grid, F &&f) {
    GridField g(grid);
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
      g.values_[i] = static_cast<T>(f(grid.node(i)));
    return g;
  }

  const UniformGrid &grid() const { return grid_; }
  std::span<const T> values() const { return values_; }
  T operator[](std::size_t i) const { return values_[i]; }
  /// Interior assignment only; endpoint writes are rejected.
  void set(std::size_t i, T v) {
    if (i == 0 || i + 1 >= values_.size())
      throw DomainError("GridField endpoints are fixed at zero");
    values_[i] = v;
  }

  /// Max-norm over the nodes.
  double max_norm() const {
    double m = 0.0;
    for (const auto &v : values_)
      m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }

private:
  UniformGrid grid_;
  std::vector<T> values_;
};

/// Trapezoid integral over (-pi, 0) of a(u) b(u); endpoint terms vanish under
/// the Dirichlet condition. Exact for products of sin(n u) up to n < size.
template <class T>
T grid_inner(const GridField<double> &a, const GridField<T> &b) {
  T acc{};
  const auto av = a.values();
  const auto bv = b.values();
  for (std::size_t i = 1; i + 1 < av.size(); ++i)
    acc += av[i] * bv[i];
  return acc * a.grid().spacing();
}

inline constexpr std::size_t kMinApplyNodes = 8;

/// L_omega phi = (eps^2/omega_l^2) phi'' + (omega^2/omega_l^2) phi
///               - V^2 phi_1(u) * int phi_1(u') phi(u') du'
/// with centered second differences and the trapezoid projector.
template <class T>
GridField<T> apply_L(double omega, const GridField<T> &field, const DerivedConstants &dc,
                     const ModelParams &p) {
  const UniformGrid &grid = field.grid();
  if (grid.interior() < kMinApplyNodes)
    throw DomainError("grid too coarse for apply_L: need >= 8 interior nodes");
  const double wl2 = p.omega_l * p.omega_l;
  const double diff_coef = dc.eps_tilde * dc.eps_tilde / wl2 / (grid.spacing() * grid.spacing());
  const double shift = omega * omega / wl2;
  const double v2 = p.vtilde_c * p.vtilde_c;

  const auto phi1 = GridField<double>::sample(grid, [](double u) { return kSqrt2OverPi * std::sin(u); });
  const T overlap = grid_inner(phi1, field);

  const auto v = field.values();
  GridField<T> out(grid);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const T lap = v[i - 1] - 2.0 * v[i] + v[i + 1];
    out.set(i, diff_coef * lap + shift * v[i] - v2 * phi1[i] * overlap);
  }
  return out;
}

/// G_omega(u, u') = -sum_{n=1}^{n_max} phi_n(u) phi_n(u') / lambda_n^2(omega).
inline cplx greens_function(const ComplexFrequency &f, double u, double uprime,
                            const DerivedConstants &dc, const ModelParams &p, long n_max) {
  check_angle(u);
  check_angle(uprime);
  if (n_max < 1)
    throw DomainError("n_max must be >= 1");
  if (hits_real_pole(f, dc, p, n_max))
    throw PoleError("pole on real axis: use eta > 0");
  const double wl2 = p.omega_l * p.omega_l;
  const cplx s = f.squared();
  const double e2 = dc.eps_tilde * dc.eps_tilde;
  SineSequence su(u), sv(uprime);
  cplx acc = su.value() * sv.value() / (1.0 - s / wl2);
  for (long n = 2; n <= n_max; ++n) {
    su.advance();
    sv.advance();
    const double nn = static_cast<double>(n);
    acc += su.value() * sv.value() * wl2 / (nn * nn * e2 - s);
  }
  return -(2.0 / std::numbers::pi) * acc;
}

} // namespace trapkohn
