#pragma once

// Physical constants (CODATA 2018) and the handful of unit conversions the
// toolkit needs. Everything is computed in SI internally.

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

#include "groupiv/error.hpp"

namespace groupiv {

namespace constants {
inline constexpr double planck = 6.62607015e-34;            // J s (exact)
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);  // 1.054571817e-34 J s
inline constexpr double speed_of_light = 299792458.0;       // m/s (exact)
inline constexpr double elementary_charge = 1.602176634e-19;  // C (exact)
inline constexpr double boltzmann = 1.380649e-23;           // J/K (exact)
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg
inline constexpr double hartree = 4.3597447222071e-18;      // J
inline constexpr double bohr_radius = 5.29177210903e-11;    // m
}  // namespace constants

enum class EnergyUnit { millielectronvolt, gigahertz, terahertz, nanometer, joule };

inline std::string_view to_string(EnergyUnit unit) {
  switch (unit) {
    case EnergyUnit::millielectronvolt: return "meV";
    case EnergyUnit::gigahertz: return "GHz";
    case EnergyUnit::terahertz: return "THz";
    case EnergyUnit::nanometer: return "nm";
    case EnergyUnit::joule: return "J";
  }
  return "?";
}

struct EnergyQuantity {
  double value = 0.0;
  EnergyUnit unit = EnergyUnit::joule;
};

namespace detail {

inline double to_joule(double value, EnergyUnit unit) {
  using namespace constants;
  switch (unit) {
    case EnergyUnit::millielectronvolt: return value * 1e-3 * elementary_charge;
    case EnergyUnit::gigahertz: return value * 1e9 * planck;
    case EnergyUnit::terahertz: return value * 1e12 * planck;
    case EnergyUnit::nanometer: return planck * speed_of_light / (value * 1e-9);
    case EnergyUnit::joule: return value;
  }
  return value;
}

inline double from_joule(double joule, EnergyUnit unit) {
  using namespace constants;
  switch (unit) {
    case EnergyUnit::millielectronvolt: return joule / (1e-3 * elementary_charge);
    case EnergyUnit::gigahertz: return joule / (1e9 * planck);
    case EnergyUnit::terahertz: return joule / (1e12 * planck);
    case EnergyUnit::nanometer: return planck * speed_of_light / joule * 1e9;
    case EnergyUnit::joule: return joule;
  }
  return joule;
}

}  // namespace detail

/// Converts a photon energy between meV, GHz, THz, vacuum wavelength (nm) and joule.
/// Wavelength conversions require a strictly positive value.
inline EnergyQuantity convert_energy(EnergyQuantity q, EnergyUnit target) {
  detail::require(std::isfinite(q.value), "convert_energy: value must be finite");
  if (q.unit == EnergyUnit::nanometer || target == EnergyUnit::nanometer) {
    detail::require(q.value > 0.0, "convert_energy: wavelength conversion requires a positive value");
  }
  if (q.unit == target) return q;
  return {detail::from_joule(detail::to_joule(q.value, q.unit), target), target};
}

/// Fourier-transform-limited linewidth (FWHM, MHz) of an emitter with lifetime `tau_ns`.
inline double ftl_from_lifetime(double tau_ns) {
  detail::require(std::isfinite(tau_ns) && tau_ns > 0.0, "ftl_from_lifetime: lifetime must be positive");
  return 1e3 / (2.0 * std::numbers::pi * tau_ns);
}

enum class ForceConstantUnit { hartree_per_bohr2, newton_per_meter };

struct ForceConstant {
  double value = 0.0;
  ForceConstantUnit unit = ForceConstantUnit::hartree_per_bohr2;
};

/// Hartree/bohr^2 expressed in N/m (about 1556.89).
inline constexpr double hartree_per_bohr2_in_si =
    constants::hartree / (constants::bohr_radius * constants::bohr_radius);

inline ForceConstant force_constant_to_si(ForceConstant k) {
  detail::require(std::isfinite(k.value), "force_constant_to_si: value must be finite");
  if (k.unit == ForceConstantUnit::newton_per_meter) return k;
  return {k.value * hartree_per_bohr2_in_si, ForceConstantUnit::newton_per_meter};
}

struct AtomicMass {
  int mass_number = 0;
  double atomic_mass_u = 0.0;

  double kilograms() const { return atomic_mass_u * constants::atomic_mass_unit; }
};

/// Checks the atomic-mass invariants: positive and within one unit of the mass number.
inline AtomicMass make_atomic_mass(int mass_number, double atomic_mass_u) {
  detail::require(std::isfinite(atomic_mass_u) && atomic_mass_u > 0.0,
                  "atomic mass must be positive");
  detail::require(std::abs(atomic_mass_u - mass_number) < 1.0,
                  "atomic mass must lie within 1 u of mass number " + std::to_string(mass_number));
  return {mass_number, atomic_mass_u};
}

}  // namespace groupiv
