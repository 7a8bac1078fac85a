#pragma once

#include <cmath>
#include <complex>

#include "trapkohn/error.hpp"

namespace trapkohn {

using cplx = std::complex<double>;

/// Default regularization shift in units of omega_l.
inline constexpr double kDefaultEtaRel = 1e-6;

/// Probe frequency with an explicit shift into the upper half plane and an
/// optional damping rate.
///
/// Every response formula evaluates at w = omega + i eta and replaces omega^2
/// in its denominators by s = w^2 + i gamma w. With gamma = 0 this is the
/// plain retarded continuation; with eta = 0 it is the damped
/// oscillator response that the time-domain oracle reproduces.
struct ComplexFrequency {
  double omega = 0.0;
  double eta = 0.0;
  double gamma = 0.0;

  ComplexFrequency() = default;
  ComplexFrequency(double omega_, double eta_ = 0.0, double gamma_ = 0.0)
      : omega(omega_), eta(eta_), gamma(gamma_) {
    if (!std::isfinite(omega) || !(eta >= 0.0) || !(gamma >= 0.0))
      throw DomainError("ComplexFrequency requires finite omega, eta >= 0 and gamma >= 0");
  }

  cplx shifted() const { return {omega, eta}; }
  /// Effective omega^2 entering every resonant denominator.
  cplx squared() const {
    const cplx w = shifted();
    return w * w + cplx{0.0, gamma} * w;
  }
  bool on_real_axis() const { return eta == 0.0 && gamma == 0.0; }
};

} // namespace trapkohn
