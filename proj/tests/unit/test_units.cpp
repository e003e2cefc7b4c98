#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "groupiv/units.hpp"

using namespace groupiv;

namespace {

// Independent oracle: CODATA 2018 values typed in directly.
constexpr double kH = 6.62607015e-34;
constexpr double kC = 299792458.0;
constexpr double kE = 1.602176634e-19;

const EnergyUnit kAllUnits[] = {EnergyUnit::millielectronvolt, EnergyUnit::gigahertz, EnergyUnit::terahertz,
                                EnergyUnit::nanometer, EnergyUnit::joule};

}  // namespace

TEST(Units, MilliElectronVoltToGigahertz) {
  const auto q = convert_energy({1.0, EnergyUnit::millielectronvolt}, EnergyUnit::gigahertz);
  EXPECT_EQ(q.unit, EnergyUnit::gigahertz);
  EXPECT_NEAR(q.value, 1e-3 * kE / kH / 1e9, 1e-9);
  EXPECT_NEAR(q.value, 241.799, 1e-3);
}

TEST(Units, ZeroMapsToZeroForLinearUnits) {
  EXPECT_EQ(convert_energy({0.0, EnergyUnit::millielectronvolt}, EnergyUnit::gigahertz).value, 0.0);
  EXPECT_EQ(convert_energy({0.0, EnergyUnit::terahertz}, EnergyUnit::joule).value, 0.0);
}

TEST(Units, TerahertzToWavelength) {
  const auto q = convert_energy({484.130, EnergyUnit::terahertz}, EnergyUnit::nanometer);
  EXPECT_NEAR(q.value, kC / 484.130e12 * 1e9, 1e-9);
  EXPECT_NEAR(q.value, 619.24, 0.01);
}

TEST(Units, WavelengthRequiresPositiveValue) {
  EXPECT_THROW(convert_energy({0.0, EnergyUnit::nanometer}, EnergyUnit::gigahertz), DomainError);
  EXPECT_THROW(convert_energy({-1.0, EnergyUnit::gigahertz}, EnergyUnit::nanometer), DomainError);
  EXPECT_THROW(convert_energy({0.0, EnergyUnit::nanometer}, EnergyUnit::nanometer), DomainError);
}

TEST(Units, NonFiniteInputRejected) {
  EXPECT_THROW(convert_energy({std::numeric_limits<double>::quiet_NaN(), EnergyUnit::joule}, EnergyUnit::gigahertz),
               DomainError);
  EXPECT_THROW(convert_energy({std::numeric_limits<double>::infinity(), EnergyUnit::gigahertz}, EnergyUnit::joule),
               DomainError);
}

TEST(Units, RoundTripAllPairsOverWideRange) {
  for (double v = 1e-6; v <= 1e6; v *= 3.7) {
    for (auto a : kAllUnits) {
      for (auto b : kAllUnits) {
        const auto there = convert_energy({v, a}, b);
        const auto back = convert_energy(there, a);
        EXPECT_NEAR(back.value, v, 1e-12 * v) << to_string(a) << " -> " << to_string(b) << " at " << v;
      }
    }
  }
}

TEST(Units, MonotoneInValue) {
  for (auto a : kAllUnits) {
    for (auto b : kAllUnits) {
      const bool inverted = (a == EnergyUnit::nanometer) != (b == EnergyUnit::nanometer);
      double prev = convert_energy({1e-3, a}, b).value;
      for (double v = 2e-3; v < 1e4; v *= 1.9) {
        const double cur = convert_energy({v, a}, b).value;
        if (inverted) {
          EXPECT_LT(cur, prev);
        } else {
          EXPECT_GT(cur, prev);
        }
        prev = cur;
      }
    }
  }
}

TEST(Units, FourierLimitedLinewidth) {
  EXPECT_NEAR(ftl_from_lifetime(4.0), 39.79, 0.01);
  EXPECT_NEAR(ftl_from_lifetime(8.0), 19.89, 0.01);
  EXPECT_NEAR(ftl_from_lifetime(1e9), 1.6e-7, 0.01e-7);
  EXPECT_THROW(ftl_from_lifetime(0.0), DomainError);
  EXPECT_THROW(ftl_from_lifetime(-2.0), DomainError);
}

TEST(Units, LinewidthTimesLifetimeIsConstant) {
  const double product = 1e3 / (2.0 * std::numbers::pi);
  for (double tau = 1e-3; tau < 1e6; tau *= 2.3) {
    EXPECT_NEAR(ftl_from_lifetime(tau) * tau, product, 1e-13 * product);
  }
}

TEST(Units, ForceConstantToSi) {
  const double oracle = 4.3597447222071e-18 / (5.29177210903e-11 * 5.29177210903e-11);
  EXPECT_NEAR(force_constant_to_si({1.0}).value, oracle, 1e-9);
  EXPECT_NEAR(force_constant_to_si({1.0}).value, 1556.89, 0.01);
  EXPECT_EQ(force_constant_to_si({0.0}).value, 0.0);
  EXPECT_NEAR(force_constant_to_si({0.317201}).value, 493.85, 0.01);
  const auto si = force_constant_to_si({42.0, ForceConstantUnit::newton_per_meter});
  EXPECT_EQ(si.value, 42.0);
  EXPECT_THROW(force_constant_to_si({std::numeric_limits<double>::infinity()}), DomainError);
}

TEST(Units, AtomicMassInvariants) {
  const auto m = make_atomic_mass(120, 119.902202);
  EXPECT_EQ(m.mass_number, 120);
  EXPECT_NEAR(m.kilograms(), 119.902202 * 1.66053906660e-27, 1e-40);
  EXPECT_THROW(make_atomic_mass(120, 121.5), DomainError);
  EXPECT_THROW(make_atomic_mass(1, -0.5), DomainError);
}
