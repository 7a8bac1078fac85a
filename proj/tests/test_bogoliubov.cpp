#include <cmath>

#include <gtest/gtest.h>

#include "trapkohn/model.hpp"
#include "trapkohn/oracle/bogoliubov.hpp"

using namespace trapkohn;
using oracle::KohnScheme;

namespace {
ModelParams coupling(double v) {
  ModelParams p;
  p.vtilde_c = v;
  return p;
}
} // namespace

TEST(Bogoliubov, BareInteractionSqueezesKohnMode) {
  const auto r = oracle::bogoliubov_mode(1, coupling(0.6), KohnScheme::none);
  EXPECT_NEAR(r.frequency, 0.8, 1e-14);
  EXPECT_GT(std::abs(r.squeeze_param), 0.0);
}

TEST(Bogoliubov, BothSubtractionSchemesRestoreKohn) {
  for (double v : {0.0, 0.3, 0.6, -0.4, 0.9}) {
    const auto p = coupling(v);
    EXPECT_NEAR(oracle::bogoliubov_mode(1, p, KohnScheme::project_out).frequency, 1.0, 1e-14) << v;
    EXPECT_NEAR(oracle::bogoliubov_mode(1, p, KohnScheme::renormalize_trap).frequency, 1.0, 1e-14) << v;
    EXPECT_NEAR(oracle::bogoliubov_mode(1, p, KohnScheme::none).frequency, std::sqrt(1.0 - v * v), 1e-14) << v;
  }
  EXPECT_EQ(oracle::bogoliubov_mode(1, coupling(0.6), KohnScheme::project_out).squeeze_param, 0.0);
}

TEST(Bogoliubov, HigherModesAtMultiplesOfEps) {
  for (double v : {0.0, 0.3, 0.6}) {
    const auto p = coupling(v);
    const double eps = derive_constants(p).eps_tilde;
    for (int m = 2; m <= 8; ++m)
      for (auto s : {KohnScheme::none, KohnScheme::project_out, KohnScheme::renormalize_trap})
        EXPECT_NEAR(oracle::bogoliubov_mode(m, p, s).frequency, m * eps, 2e-15 * m) << v << " " << m;
  }
  EXPECT_NEAR(oracle::bogoliubov_mode(3, coupling(0.6), KohnScheme::project_out).frequency, 2.4, 1e-14);
}

TEST(Bogoliubov, SqueezeParameterMatchesRotation) {
  for (double v : {0.0, 0.2, -0.5, 0.7}) {
    const auto p = coupling(v);
    for (int m : {1, 2, 5}) {
      const auto r = oracle::bogoliubov_mode(m, p, KohnScheme::none);
      // tanh(2r) = g / Omega for b = cosh(r) d + sinh(r) d^+.
      EXPECT_NEAR(std::tanh(2.0 * r.squeeze_param), v, 1e-13) << v << " " << m;
    }
  }
  EXPECT_EQ(oracle::bogoliubov_mode(4, coupling(0.0), KohnScheme::none).squeeze_param, 0.0);
}

TEST(Bogoliubov, TrapFrequencyUnitsCarryThrough) {
  ModelParams p = coupling(0.6);
  p.omega_l = 3.0;
  EXPECT_NEAR(oracle::bogoliubov_mode(1, p, KohnScheme::none).frequency, 2.4, 1e-14);
  EXPECT_NEAR(oracle::bogoliubov_mode(1, p, KohnScheme::renormalize_trap).frequency, 3.0, 1e-14);
}

TEST(Bogoliubov, InvalidInput) {
  EXPECT_THROW(oracle::bogoliubov_mode(0, coupling(0.1), KohnScheme::none), DomainError);
  EXPECT_THROW(oracle::bogoliubov_mode(1, coupling(1.0), KohnScheme::none), DomainError);
  EXPECT_THROW(oracle::parse_scheme("squeeze"), DomainError);
  EXPECT_EQ(oracle::parse_scheme("renormalize_trap"), KohnScheme::renormalize_trap);
}
