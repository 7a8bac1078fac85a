#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "trapkohn/error.hpp"

namespace trapkohn {

/// Primitive inputs of the trapped Luttinger model.
///
/// `vtilde_c` is the dimensionless pairing coupling of the Kohn-mode part of
/// the interaction (signed, |vtilde_c| < 1). Internal units default to
/// hbar = omega_l = l_fermi = 1.
struct ModelParams {
  double vtilde_c = 0.0;
  double omega_l = 1.0;
  double l_fermi = 1.0;
  double hbar = 1.0;
};

/// Renormalized constants derived from ModelParams.
struct DerivedConstants {
  double k_lutt = 1.0;
  double eps_tilde = 1.0;
  /// |omega_l 2K/(K^2+1) - omega_l sqrt(1 - V^2)| / omega_l
  double eps_form_residual = 0.0;
};

/// Residuals of the two algebraic identities used when closing the phase
/// equation of motion and when evaluating the mobility.
struct IdentityResiduals {
  /// |eps (K - 1/K) - 2 omega_l V| / omega_l
  double kohn_closure = 0.0;
  /// |eps K - omega_l (1 + V)| / omega_l
  double eps_times_k = 0.0;

  double max() const { return kohn_closure > eps_times_k ? kohn_closure : eps_times_k; }
};

inline void validate(const ModelParams &p) {
  if (!std::isfinite(p.vtilde_c) || !(std::abs(p.vtilde_c) < 1.0))
    throw DomainError("model unstable / K divergent: |vtilde_c| must be < 1, got " +
                      std::to_string(p.vtilde_c));
  if (!(p.omega_l > 0.0) || !std::isfinite(p.omega_l))
    throw DomainError("trap frequency omega_l must be positive");
  if (!(p.l_fermi > 0.0) || !std::isfinite(p.l_fermi))
    throw DomainError("Fermi-sea half-length l_fermi must be positive");
  if (!(p.hbar > 0.0) || !std::isfinite(p.hbar))
    throw DomainError("hbar must be positive");
}

/// Couplings this close to +-1 push K past ~6e2 and eps below ~5e-3 omega_l;
/// they are rejected as numerically unstable.
inline constexpr double kMaxCoupling = 1.0 - 1e-5;

inline DerivedConstants derive_constants(const ModelParams &p) {
  validate(p);
  const double v = p.vtilde_c;
  if (std::abs(v) >= kMaxCoupling)
    throw DomainError("model unstable / K divergent: |vtilde_c| too close to 1");

  DerivedConstants dc;
  dc.k_lutt = std::sqrt((1.0 + v) / (1.0 - v));
  // sqrt((1-v)(1+v)) avoids the cancellation in 1 - v*v near |v| -> 1.
  dc.eps_tilde = p.omega_l * std::sqrt((1.0 - v) * (1.0 + v));
  const double k = dc.k_lutt;
  const double eps_alt = p.omega_l * 2.0 * k / (k * k + 1.0);
  dc.eps_form_residual = std::abs(eps_alt - dc.eps_tilde) / p.omega_l;
  return dc;
}

inline IdentityResiduals check_identities(const DerivedConstants &dc, const ModelParams &p) {
  const double k = dc.k_lutt;
  const double e = dc.eps_tilde;
  const double v = p.vtilde_c;
  IdentityResiduals r;
  r.kohn_closure = std::abs(e * (k - 1.0 / k) - 2.0 * p.omega_l * v) / p.omega_l;
  r.eps_times_k = std::abs(e * k - p.omega_l * (1.0 + v)) / p.omega_l;
  return r;
}

/// Fermi-sea half-length and Fermi wave number from the fermion number N and
/// the inverse oscillator length alpha.
struct FermiScales {
  double l_fermi;
  double k_fermi;
};

inline FermiScales fermi_scales(double n_fermions, double alpha) {
  if (!(n_fermions > 0.0) || !(alpha > 0.0))
    throw DomainError("fermion number and inverse oscillator length must be positive");
  const double root = std::sqrt(2.0 * n_fermions);
  return {root / alpha, alpha * root};
}

} // namespace trapkohn
