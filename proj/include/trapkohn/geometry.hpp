#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trapkohn/error.hpp"

namespace trapkohn {

// Map between the bosonization angle u in [-pi, 0] and the trap position
// z = L_F cos(u) in [-L_F, L_F]. Endpoints are part of the domain.

inline void check_inside_sea(double z, double l_fermi) {
  if (!(std::abs(z) <= l_fermi))
    throw DomainError("position outside classical Fermi sea: |z| = " + std::to_string(std::abs(z)) +
                      " > L_F = " + std::to_string(l_fermi));
}

inline double u_of_z(double z, double l_fermi) {
  check_inside_sea(z, l_fermi);
  const double x = std::clamp(z / l_fermi, -1.0, 1.0);
  return std::asin(x) - std::numbers::pi / 2.0;
}

inline double z_of_u(double u, double l_fermi) {
  if (!(u >= -std::numbers::pi && u <= 0.0))
    throw DomainError("angle outside [-pi, 0]: u = " + std::to_string(u));
  return l_fermi * std::cos(u);
}

/// Z(z) = sqrt(1 - z^2/L_F^2) = -sin(u_of_z(z)).
inline double envelope(double z, double l_fermi) {
  check_inside_sea(z, l_fermi);
  const double x = z / l_fermi;
  return std::sqrt(std::max(0.0, (1.0 - x) * (1.0 + x)));
}

struct TrapCoordinate {
  double z;
  double u;

  static TrapCoordinate from_z(double z, double l_fermi) { return {z, u_of_z(z, l_fermi)}; }
  static TrapCoordinate from_u(double u, double l_fermi) { return {z_of_u(u, l_fermi), u}; }
};

} // namespace trapkohn
