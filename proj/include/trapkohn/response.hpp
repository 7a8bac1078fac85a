#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "trapkohn/error.hpp"
#include "trapkohn/frequency.hpp"
#include "trapkohn/geometry.hpp"
#include "trapkohn/model.hpp"
#include "trapkohn/parallel.hpp"
#include "trapkohn/quadrature.hpp"
#include "trapkohn/spectral.hpp"

namespace trapkohn {

inline constexpr long kDefaultModes = 10000;

enum class Method { mode_sum, closed_form, homogeneous_analytic, homogeneous_quadrature, time_domain };

inline std::string_view to_string(Method m) {
  switch (m) {
  case Method::mode_sum: return "mode_sum";
  case Method::closed_form: return "closed_form";
  case Method::homogeneous_analytic: return "homogeneous_analytic";
  case Method::homogeneous_quadrature: return "homogeneous_quadrature";
  case Method::time_domain: return "time_domain";
  }
  return "unknown";
}

struct MobilitySample {
  double z = 0.0;
  double z0 = 0.0;
  ComplexFrequency freq;
  cplx value;
  Method method = Method::mode_sum;
  /// Set when the probe frequency is within 10 eta of a resonance, where the
  /// closed form loses precision and the mode sum is reported instead.
  bool near_pole = false;
  /// |closed - mode_sum| / |closed| when both routes were evaluated.
  std::optional<double> rel_diff;
};

struct MobilitySpectrum {
  ModelParams params;
  DerivedConstants constants;
  std::vector<MobilitySample> samples;
};

namespace detail {

inline double pi2() { return std::numbers::pi * std::numbers::pi; }

/// Mode sum in terms of angles; zz0 = Z(z) Z(z0) = sin(u) sin(u0).
inline cplx modesum_angles(double u, double u0, double zz0, const ComplexFrequency &f,
                           const ModelParams &p, const DerivedConstants &dc, long n_max) {
  const cplx w = f.shifted();
  const cplx s = f.squared();
  const cplx i{0.0, 1.0};
  const double wl = p.omega_l;
  const cplx kohn = -(2.0 * i * w * wl / (pi2() * p.hbar)) * zz0 / (wl * wl - s);

  const double e2 = dc.eps_tilde * dc.eps_tilde;
  SineSequence su(u), s0(u0);
  cplx acc{};
  for (long n = 2; n <= n_max; ++n) {
    su.advance();
    s0.advance();
    const double nn = static_cast<double>(n);
    acc += su.value() * s0.value() / (nn * nn * e2 - s);
  }
  return kohn - (2.0 * i * w * dc.eps_tilde * dc.k_lutt / (pi2() * p.hbar)) * acc;
}

inline void check_real_pole(const ComplexFrequency &f, const DerivedConstants &dc,
                            const ModelParams &p, long n_max) {
  if (hits_real_pole(f, dc, p, n_max))
    throw PoleError("pole on real axis at omega = " + std::to_string(f.omega) + ": use eta > 0");
}

} // namespace detail

/// Inhomogeneous mobility mu(z, z0; omega) as the truncated mode sum over
/// the Kohn mode (n = 1, at omega_l) and the modes n >= 2 (at n eps).
inline cplx mobility_modesum(double z, double z0, const ComplexFrequency &f, const ModelParams &p,
                             const DerivedConstants &dc, long n_max = kDefaultModes) {
  if (n_max < 2)
    throw DomainError("mode sum needs n_max >= 2");
  const double u = u_of_z(z, p.l_fermi);
  const double u0 = u_of_z(z0, p.l_fermi);
  detail::check_real_pole(f, dc, p, n_max);
  const double zz0 = envelope(z, p.l_fermi) * envelope(z0, p.l_fermi);
  return detail::modesum_angles(u, u0, zz0, f, p, dc, n_max);
}

/// Closed-form mobility: the full sine series summed in closed form (with the
/// Kohn mode placed at eps) plus the rational correction that moves the n = 1
/// pole back to omega_l. With damping, a^2 = (w^2 + i gamma w)/eps^2.
inline cplx mobility_closed(double z, double z0, const ComplexFrequency &f, const ModelParams &p,
                            const DerivedConstants &dc) {
  const double u = u_of_z(z, p.l_fermi);
  const double u0 = u_of_z(z0, p.l_fermi);
  const double zz0 = envelope(z, p.l_fermi) * envelope(z0, p.l_fermi);
  const cplx w = f.shifted();
  if (w == cplx{})
    return {};
  const cplx s = f.squared();
  const cplx i{0.0, 1.0};
  const double pi = std::numbers::pi;
  const double e = dc.eps_tilde;
  const double v = p.vtilde_c;
  const double wl = p.omega_l;

  const cplx a = std::sqrt(s) / e;
  if (f.on_real_axis()) {
    const double ar = std::abs(a.real());
    const double nearest = std::round(ar);
    if (nearest >= 1.0 && std::abs(ar - nearest) <= kPoleTolerance * std::max(1.0, ar))
      throw PoleError("closed form singular at integer a = omega/eps; use mode sum near resonance");
    if (std::abs(std::abs(f.omega) - wl) <= kPoleTolerance * wl)
      throw PoleError("pole on real axis at omega = omega_l: use eta > 0");
  }

  const cplx bracket = std::cos(a * (pi + u + u0)) - std::cos(a * (pi - std::abs(u - u0)));
  // w / (eps a) is 1 without damping; kept explicit for the damped continuation.
  const cplx series = -(i * dc.k_lutt / (2.0 * pi * p.hbar)) * (w / (e * a)) * bracket / std::sin(pi * a);

  const double wl2 = wl * wl;
  const cplx correction = (2.0 * v * zz0 / (detail::pi2() * p.hbar)) *
                          (i * w * wl * ((1.0 + v) * wl2 - s) / ((wl2 - s) * ((1.0 - v * v) * wl2 - s)));
  return series + correction;
}

/// True when the closed form is numerically unreliable: within 10 eta of
/// omega_l or of any integer multiple of eps (or exactly on one if eta = 0).
inline bool closed_form_unreliable(const ComplexFrequency &f, const DerivedConstants &dc,
                                   const ModelParams &p) {
  const double window = std::max(10.0 * f.eta, kPoleTolerance * p.omega_l);
  const double w = std::abs(f.omega);
  if (std::abs(w - p.omega_l) < window)
    return true;
  const double n = std::round(w / dc.eps_tilde);
  return n >= 1.0 && std::abs(w - n * dc.eps_tilde) < window;
}

/// Homogeneous mobility, the response of the local current to a uniform force.
/// Independent of the coupling.
inline cplx mobility_homogeneous_analytic(double z, const ComplexFrequency &f, const ModelParams &p,
                                          const DerivedConstants &dc) {
  const double zenv = envelope(z, p.l_fermi);
  detail::check_real_pole(f, dc, p, 1);
  const cplx w = f.shifted();
  const cplx s = f.squared();
  const double wl = p.omega_l;
  return (p.l_fermi / (std::numbers::pi * p.hbar)) * cplx{0.0, 1.0} * w * wl / (s - wl * wl) * zenv;
}

enum class HomogeneousIntegrand { mode_sum, closed_form };

/// Homogeneous mobility by averaging mu(z, z0) over the force position:
///   mu(z) = -L_F int_{-pi}^{0} du0 sin(u0) mu(z, z0(u0)).
///
/// With the mode-sum integrand the rule is a composite Gauss-Legendre rule of
/// `quad_order` points per panel, with enough panels to resolve sin(n u0) up
/// to n_max. With the closed-form integrand the interval is split at the
/// kink u0 = u0(z) and each side uses one `quad_order` rule.
inline cplx mobility_homogeneous_quadrature(double z, const ComplexFrequency &f, const ModelParams &p,
                                            const DerivedConstants &dc,
                                            std::size_t quad_order = kDefaultQuadOrder,
                                            long n_max = 2000,
                                            HomogeneousIntegrand integrand = HomogeneousIntegrand::mode_sum) {
  const double u = u_of_z(z, p.l_fermi);
  const double zenv = envelope(z, p.l_fermi);
  const double pi = std::numbers::pi;

  if (integrand == HomogeneousIntegrand::closed_form) {
    const auto rule = composite_gauss_legendre(quad_order, {-pi, u, 0.0});
    return -p.l_fermi * rule.integrate([&](double u0) {
      const double z0 = p.l_fermi * std::cos(u0);
      return std::sin(u0) * mobility_closed(z, z0, f, p, dc);
    });
  }

  if (n_max < 2)
    throw DomainError("mode sum needs n_max >= 2");
  detail::check_real_pole(f, dc, p, n_max);
  const auto panels = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n_max + 1) * pi / (2.0 * static_cast<double>(quad_order))));
  const auto rule = composite_gauss_legendre(quad_order, {-pi, 0.0}, std::max<std::size_t>(1, panels));

  // mu(z, z0) = kohn(z) sin(u0) + sum_n coef_n sin(n u0)
  const cplx w = f.shifted();
  const cplx s = f.squared();
  const cplx i{0.0, 1.0};
  const double wl = p.omega_l;
  const double e2 = dc.eps_tilde * dc.eps_tilde;
  const cplx kohn = -(2.0 * i * w * wl / (detail::pi2() * p.hbar)) * (-zenv) / (wl * wl - s);
  const cplx pref = -(2.0 * i * w * dc.eps_tilde * dc.k_lutt / (detail::pi2() * p.hbar));
  std::vector<cplx> coef(static_cast<std::size_t>(n_max + 1));
  {
    SineSequence su(u);
    for (long n = 2; n <= n_max; ++n) {
      su.advance();
      const double nn = static_cast<double>(n);
      coef[static_cast<std::size_t>(n)] = pref * su.value() / (nn * nn * e2 - s);
    }
  }
  return -p.l_fermi * rule.integrate([&](double u0) {
    SineSequence s0(u0);
    cplx mu = kohn * s0.value();
    for (long n = 2; n <= n_max; ++n) {
      s0.advance();
      mu += coef[static_cast<std::size_t>(n)] * s0.value();
    }
    return std::sin(u0) * mu;
  });
}

/// Local maxima of |mu(z, z0; omega + i eta)| over an increasing grid.
inline std::vector<double> resonance_scan(double z, double z0, const std::vector<double> &omega_grid,
                                          const ModelParams &p, const DerivedConstants &dc, double eta,
                                          long n_max = kDefaultModes, std::size_t threads = 1) {
  if (omega_grid.size() < 3)
    throw DomainError("resonance scan needs at least 3 grid points");
  if (!(eta > 0.0))
    throw DomainError("resonance scan needs eta > 0");
  for (std::size_t k = 1; k < omega_grid.size(); ++k) {
    const double step = omega_grid[k] - omega_grid[k - 1];
    if (!(step > 0.0))
      throw DomainError("frequency grid must be strictly increasing");
    if (!(step < dc.eps_tilde / 20.0))
      throw DomainError("frequency grid too coarse: spacing must be < eps/20");
  }
  std::vector<double> mag(omega_grid.size());
  parallel_for(omega_grid.size(), threads, [&](std::size_t k) {
    mag[k] = std::abs(mobility_modesum(z, z0, ComplexFrequency(omega_grid[k], eta), p, dc, n_max));
  });
  std::vector<double> peaks;
  for (std::size_t k = 1; k + 1 < mag.size(); ++k)
    if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1])
      peaks.push_back(omega_grid[k]);
  return peaks;
}

struct SpectrumOptions {
  double eta = 0.0;
  double gamma = 0.0;
  long n_max = kDefaultModes;
  /// mode_sum, closed_form, or compare (closed form with mode-sum rel_diff).
  enum class Route { mode_sum, closed_form, compare } route = Route::mode_sum;
  std::size_t threads = 1;
};

/// Mobility samples over an increasing frequency grid. Rows within 10 eta of
/// a resonance are flagged `near_pole` and always carry the mode-sum value.
inline MobilitySpectrum mobility_spectrum(double z, double z0, const std::vector<double> &omega_grid,
                                          const ModelParams &p, const SpectrumOptions &opt) {
  const DerivedConstants dc = derive_constants(p);
  for (std::size_t k = 1; k < omega_grid.size(); ++k)
    if (!(omega_grid[k] > omega_grid[k - 1]))
      throw DomainError("frequency grid must be strictly increasing");
  MobilitySpectrum out{p, dc, std::vector<MobilitySample>(omega_grid.size())};
  using Route = SpectrumOptions::Route;
  parallel_for(omega_grid.size(), opt.threads, [&](std::size_t k) {
    MobilitySample &smp = out.samples[k];
    smp.z = z;
    smp.z0 = z0;
    smp.freq = ComplexFrequency(omega_grid[k], opt.eta, opt.gamma);
    smp.near_pole = closed_form_unreliable(smp.freq, dc, p);
    if (opt.route == Route::mode_sum || smp.near_pole) {
      smp.value = mobility_modesum(z, z0, smp.freq, p, dc, opt.n_max);
      smp.method = Method::mode_sum;
      return;
    }
    smp.value = mobility_closed(z, z0, smp.freq, p, dc);
    smp.method = Method::closed_form;
    if (opt.route == Route::compare) {
      const cplx sum = mobility_modesum(z, z0, smp.freq, p, dc, opt.n_max);
      smp.rel_diff = std::abs(smp.value - sum) / std::abs(smp.value);
    }
  });
  return out;
}

} // namespace trapkohn
