#pragma once

#include <cmath>
#include <string_view>

#include <Eigen/Eigenvalues>

#include "trapkohn/error.hpp"
#include "trapkohn/model.hpp"

namespace trapkohn::oracle {

/// How the Kohn-mode (m = 1) part of the pairing interaction is treated.
enum class KohnScheme {
  none,             ///< bare interaction; mode 1 is squeezed to eps
  project_out,      ///< pairing removed from mode 1
  renormalize_trap, ///< mode-1 frequency raised to omega_l sqrt(1 + V^2)
};

inline std::string_view to_string(KohnScheme s) {
  switch (s) {
  case KohnScheme::none: return "none";
  case KohnScheme::project_out: return "project_out";
  case KohnScheme::renormalize_trap: return "renormalize_trap";
  }
  return "unknown";
}

inline KohnScheme parse_scheme(std::string_view name) {
  if (name == "none") return KohnScheme::none;
  if (name == "project_out") return KohnScheme::project_out;
  if (name == "renormalize_trap") return KohnScheme::renormalize_trap;
  throw DomainError("unknown Kohn scheme: " + std::string(name));
}

struct BogoliubovResult {
  int mode_index = 1;
  double frequency = 0.0;
  /// Rotation parameter r of b = cosh(r) d + sinh(r) d^+.
  double squeeze_param = 0.0;
  KohnScheme scheme = KohnScheme::none;
};

/// Coefficients of H_m = hbar Omega d^+ d + (hbar g / 2)(d^2 + d^+2).
struct QuadraticMode {
  double omega;
  double pairing;
};

inline QuadraticMode quadratic_mode(int m, const ModelParams &p, KohnScheme scheme) {
  if (m < 1)
    throw DomainError("mode index must be >= 1");
  const double v = p.vtilde_c;
  const double mm = static_cast<double>(m);
  QuadraticMode q{mm * p.omega_l, mm * p.omega_l * v};
  if (m == 1) {
    if (scheme == KohnScheme::project_out)
      q.pairing = 0.0;
    else if (scheme == KohnScheme::renormalize_trap)
      q.omega = p.omega_l * std::sqrt(1.0 + v * v);
  }
  return q;
}

/// Diagonalizes one quadratic boson mode through its Bogoliubov-de Gennes
/// dynamical matrix. [d, H] = Omega d + g d^+ and [d^+, H] = -Omega d^+ - g d
/// give, for b = x d + y d^+ with [b, H] = E b, the eigenproblem
///   [ Omega  -g ] [x]     [x]
///   [ g  -Omega ] [y] = E [y].
inline BogoliubovResult bogoliubov_mode(int m, const ModelParams &p, KohnScheme scheme) {
  validate(p);
  const QuadraticMode q = quadratic_mode(m, p, scheme);
  if (std::abs(q.pairing) >= q.omega)
    throw DomainError("mode unstable: |g_m| >= Omega_m for m = " + std::to_string(m));

  Eigen::Matrix2d dyn;
  dyn << q.omega, -q.pairing, q.pairing, -q.omega;
  Eigen::EigenSolver<Eigen::Matrix2d> solver(dyn);
  const auto vals = solver.eigenvalues();
  const int pos = vals(0).real() > vals(1).real() ? 0 : 1;
  const auto vec = solver.eigenvectors().col(pos);

  BogoliubovResult r;
  r.mode_index = m;
  r.scheme = scheme;
  r.frequency = vals(pos).real();
  // Positive-norm eigenvector: |x|^2 - |y|^2 = 1, x = cosh r, y = sinh r.
  const double x = vec(0).real();
  const double y = vec(1).real();
  r.squeeze_param = std::atanh(y / x);
  return r;
}

} // namespace trapkohn::oracle
