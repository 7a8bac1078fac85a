#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "trapkohn/error.hpp"

namespace trapkohn {

/// Nodes and weights of a quadrature rule on a finite interval.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F> auto integrate(F &&f) const {
    using R = decltype(f(0.0));
    R acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

namespace detail {

struct LegendreValue {
  double p;
  double dp;
};

/// P_n(x) and P_n'(x) by the three-term recurrence.
inline LegendreValue legendre(std::size_t order, double x) {
  double p0 = 1.0;
  double p1 = x;
  for (std::size_t k = 2; k <= order; ++k) {
    const auto kk = static_cast<double>(k);
    const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = p2;
  }
  const auto n = static_cast<double>(order);
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

} // namespace detail

/// Gauss-Legendre rule of the given order on [a, b]. Nodes are found by Newton
/// iteration on P_n.
inline QuadratureRule gauss_legendre(std::size_t order, double a, double b) {
  if (order < 1)
    throw DomainError("Gauss-Legendre order must be >= 1");
  QuadratureRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const auto n = static_cast<double>(order);
  for (std::size_t i = 0; i < (order + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = detail::legendre(order, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = detail::legendre(order, x).dp;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = mid - half * x;
    rule.nodes[order - 1 - i] = mid + half * x;
    rule.weights[i] = half * w;
    rule.weights[order - 1 - i] = half * w;
  }
  return rule;
}

/// Composite Gauss-Legendre: `panels` equal panels between consecutive
/// breakpoints, each integrated with an order-`order` rule.
inline QuadratureRule composite_gauss_legendre(std::size_t order, const std::vector<double> &breaks,
                                               std::size_t panels = 1) {
  if (breaks.size() < 2)
    throw DomainError("composite rule needs at least two breakpoints");
  if (panels < 1)
    throw DomainError("composite rule needs at least one panel");
  const QuadratureRule ref = gauss_legendre(order, -1.0, 1.0);
  QuadratureRule rule;
  rule.nodes.reserve(order * panels * (breaks.size() - 1));
  rule.weights.reserve(rule.nodes.capacity());
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double width = (breaks[s + 1] - breaks[s]) / static_cast<double>(panels);
    if (width == 0.0)
      continue;
    for (std::size_t p = 0; p < panels; ++p) {
      const double lo = breaks[s] + width * static_cast<double>(p);
      const double mid = lo + 0.5 * width;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        rule.nodes.push_back(mid + 0.5 * width * ref.nodes[i]);
        rule.weights.push_back(0.5 * width * ref.weights[i]);
      }
    }
  }
  return rule;
}

/// Default order for every integral over the reduced interval (-pi, 0).
inline constexpr std::size_t kDefaultQuadOrder = 64;

inline QuadratureRule interval_rule(std::size_t order = kDefaultQuadOrder) {
  return gauss_legendre(order, -std::numbers::pi, 0.0);
}

} // namespace trapkohn
