#pragma once

// Quasi-local vibrational model of the impurity atom. The zero-phonon line of
// a group-IV center carries a zero-point term (hbar/2)(sum over excited-state
// modes - sum over ground-state modes); with mode frequencies sqrt(k/m) this
// makes the line position depend on the impurity isotope.

#include <algorithm>
#include <cmath>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groupiv/csv.hpp"
#include "groupiv/error.hpp"
#include "groupiv/units.hpp"

namespace groupiv {

enum class ElectronicState { ground, excited };
enum class VibrationalMode { a2u, eu };

struct VibrationalModel {
  ForceConstant k_a2u_ground;
  ForceConstant k_eu_ground;
  ForceConstant k_a2u_excited;
  ForceConstant k_eu_excited;
  AtomicMass reference_mass;

  ForceConstant constant(VibrationalMode mode, ElectronicState state) const {
    if (state == ElectronicState::ground) return mode == VibrationalMode::a2u ? k_a2u_ground : k_eu_ground;
    return mode == VibrationalMode::a2u ? k_a2u_excited : k_eu_excited;
  }

  // sqrt(k_A2u) + 2 sqrt(k_Eu) in SI units, for one electronic state.
  double root_stiffness_sum(ElectronicState state) const {
    const double a2u = force_constant_to_si(constant(VibrationalMode::a2u, state)).value;
    const double eu = force_constant_to_si(constant(VibrationalMode::eu, state)).value;
    return std::sqrt(a2u) + 2.0 * std::sqrt(eu);
  }

  /// True when the excited state is stiffer, i.e. lighter isotopes emit at higher energy.
  bool is_blue_shifting() const {
    return root_stiffness_sum(ElectronicState::excited) > root_stiffness_sum(ElectronicState::ground);
  }

  void validate() const {
    for (auto k : {k_a2u_ground, k_eu_ground, k_a2u_excited, k_eu_excited}) {
      detail::require(std::isfinite(k.value) && k.value > 0.0,
                      "vibrational model: force constants must be positive");
    }
    detail::require(reference_mass.atomic_mass_u > 0.0, "vibrational model: reference mass must be positive");
  }
};

struct IsotopeEntry {
  AtomicMass mass;
  double abundance = 0.0;
};

struct IsotopeTable {
  std::string element;
  std::vector<IsotopeEntry> entries;

  std::optional<IsotopeEntry> find(int mass_number) const {
    for (const auto& e : entries) {
      if (e.mass.mass_number == mass_number) return e;
    }
    return std::nullopt;
  }

  AtomicMass mass(int mass_number) const {
    auto e = find(mass_number);
    if (!e) {
      throw DomainError("isotope " + std::to_string(mass_number) + " not in " + element + " table");
    }
    return e->mass;
  }

  double total_abundance() const {
    double total = 0.0;
    for (const auto& e : entries) total += e.abundance;
    return total;
  }

  /// Copy with abundances scaled to sum to one. Throws when every abundance is zero.
  IsotopeTable renormalized() const {
    const double total = total_abundance();
    detail::require(total > 0.0, "isotope table '" + element + "' has no positive abundance");
    IsotopeTable out = *this;
    for (auto& e : out.entries) e.abundance /= total;
    return out;
  }

  /// Keeps only the listed mass numbers (in table order).
  IsotopeTable restricted_to(std::span<const int> mass_numbers) const {
    IsotopeTable out{element, {}};
    for (const auto& e : entries) {
      if (std::find(mass_numbers.begin(), mass_numbers.end(), e.mass.mass_number) != mass_numbers.end()) {
        out.entries.push_back(e);
      }
    }
    return out;
  }

  void validate() const {
    for (const auto& e : entries) {
      detail::require(e.abundance >= 0.0 && std::isfinite(e.abundance), "isotope abundances must be >= 0");
      make_atomic_mass(e.mass.mass_number, e.mass.atomic_mass_u);
    }
  }
};

// ---------------------------------------------------------------------------
// Built-in datasets

/// Tin isotope masses (u). Abundances are given only for the isotopes near 120Sn
/// that matter for the implanted samples (117, 118, 119, 120, 122); the others are 0.
inline IsotopeTable tin_isotopes() {
  return {"Sn",
          {
              {{112, 111.904823}, 0.0},
              {{114, 113.902783}, 0.0},
              {{115, 114.903344}, 0.0},
              {{116, 115.901742}, 0.0},
              {{117, 116.902954}, 0.077},
              {{118, 117.901607}, 0.242},
              {{119, 118.903311}, 0.086},
              {{120, 119.902202}, 0.326},
              {{122, 121.903444}, 0.046},
              {{124, 123.905277}, 0.0},
          }};
}

/// DFT force constants (Hartree/Bohr^2) for Sn in the SnV center, evaluated for 119Sn.
inline VibrationalModel snv_force_constants() {
  constexpr auto hb = ForceConstantUnit::hartree_per_bohr2;
  return {{0.317201, hb}, {0.418695, hb}, {0.386091, hb}, {0.435863, hb}, {119, 118.903311}};
}

/// Mode energies (meV) published alongside the built-in force constants.
struct ReportedModeEnergies {
  double a2u_ground = 32.1;
  double eu_ground = 37.7;
  double a2u_excited = 35.9;
  double eu_excited = 38.4;

  double get(VibrationalMode mode, ElectronicState state) const {
    if (state == ElectronicState::ground) return mode == VibrationalMode::a2u ? a2u_ground : eu_ground;
    return mode == VibrationalMode::a2u ? a2u_excited : eu_excited;
  }
};

// ---------------------------------------------------------------------------
// Operations

/// Harmonic mode energy hbar*sqrt(k/m) in meV.
inline double vibration_energy(ForceConstant k, AtomicMass m) {
  const double k_si = force_constant_to_si(k).value;
  detail::require(k_si > 0.0, "vibration_energy: force constant must be positive");
  detail::require(std::isfinite(m.atomic_mass_u) && m.atomic_mass_u > 0.0,
                  "vibration_energy: mass must be positive");
  const double omega = std::sqrt(k_si / m.kilograms());
  return constants::hbar * omega / (1e-3 * constants::elementary_charge);
}

/// Omega_A2u + 2 Omega_Eu (the Eu mode is doubly degenerate), in meV.
inline double zero_point_sum(const VibrationalModel& model, AtomicMass m, ElectronicState state) {
  return vibration_energy(model.constant(VibrationalMode::a2u, state), m) +
         2.0 * vibration_energy(model.constant(VibrationalMode::eu, state), m);
}

/// Signed ZPL shift E(m_n) - E(m_star) in GHz.
inline double isotope_shift(const VibrationalModel& model, AtomicMass m_n, AtomicMass m_star) {
  model.validate();
  detail::require(m_n.atomic_mass_u > 0.0 && m_star.atomic_mass_u > 0.0,
                  "isotope_shift: masses must be positive");
  const double stiffness = model.root_stiffness_sum(ElectronicState::excited) -
                           model.root_stiffness_sum(ElectronicState::ground);
  const double inv_root_mass = 1.0 / std::sqrt(m_n.kilograms()) - 1.0 / std::sqrt(m_star.kilograms());
  const double joule = 0.5 * constants::hbar * inv_root_mass * stiffness;
  return joule / (1e9 * constants::planck);
}

/// Ratio of the shifts ref->a and ref->b. Depends on the masses only.
inline double shift_ratio(AtomicMass m_ref, AtomicMass m_a, AtomicMass m_b) {
  detail::require(m_ref.atomic_mass_u > 0.0 && m_a.atomic_mass_u > 0.0 && m_b.atomic_mass_u > 0.0,
                  "shift_ratio: masses must be positive");
  detail::require(m_b.atomic_mass_u != m_ref.atomic_mass_u, "shift_ratio: m_b must differ from m_ref");
  return (1.0 - std::sqrt(m_ref.atomic_mass_u / m_a.atomic_mass_u)) /
         (1.0 - std::sqrt(m_ref.atomic_mass_u / m_b.atomic_mass_u));
}

struct ShiftCurvePoint {
  double mass_u = 0.0;
  double shift_ghz = 0.0;
};

struct ShiftCalibration {
  double mass_u = 0.0;
  double shift_ghz = 0.0;
};

/// Shift per unit mass change, C (1/sqrt(m) - 1/sqrt(m+1)), with C fixed by the calibration point.
inline std::vector<ShiftCurvePoint> unit_mass_shift_curve(std::span<const double> masses_u,
                                                          ShiftCalibration calibration) {
  detail::require(calibration.shift_ghz > 0.0, "unit_mass_shift_curve: calibration shift must be positive");
  detail::require(calibration.mass_u > 0.0, "unit_mass_shift_curve: calibration mass must be positive");
  for (std::size_t i = 0; i < masses_u.size(); ++i) {
    detail::require(masses_u[i] > 0.0, "unit_mass_shift_curve: masses must be positive");
    if (i > 0) detail::require(masses_u[i] > masses_u[i - 1], "unit_mass_shift_curve: masses must be ascending");
  }
  detail::require(std::find(masses_u.begin(), masses_u.end(), calibration.mass_u) != masses_u.end(),
                  "unit_mass_shift_curve: calibration mass must be one of the masses");
  auto unit_step = [](double m) { return 1.0 / std::sqrt(m) - 1.0 / std::sqrt(m + 1.0); };
  const double scale = calibration.shift_ghz / unit_step(calibration.mass_u);
  std::vector<ShiftCurvePoint> curve;
  curve.reserve(masses_u.size());
  for (double m : masses_u) curve.push_back({m, scale * unit_step(m)});
  return curve;
}

// ---------------------------------------------------------------------------
// Dataset files

/// CSV with header `mode,state,k_hartree_per_bohr2`; all four (mode, state) rows required.
inline VibrationalModel read_force_constants(std::istream& in, const std::string& source,
                                             AtomicMass reference_mass) {
  csv::Reader reader(in, source, "mode,state,k_hartree_per_bohr2");
  std::optional<double> values[2][2];
  csv::Row row;
  while (reader.next(row)) {
    reader.expect_columns(row, 3);
    const auto mode = reader.text(row, 0);
    const auto state = reader.text(row, 1);
    int mi = mode == "a2u" ? 0 : mode == "eu" ? 1 : -1;
    int si = state == "ground" ? 0 : state == "excited" ? 1 : -1;
    if (mi < 0) reader.fail(row.line, "unknown mode '" + std::string(mode) + "' (expected a2u or eu)");
    if (si < 0) reader.fail(row.line, "unknown state '" + std::string(state) + "' (expected ground or excited)");
    if (values[mi][si]) reader.fail(row.line, "duplicate entry");
    values[mi][si] = reader.number(row, 2);
  }
  for (auto& mode : values) {
    for (auto& v : mode) {
      if (!v) throw ParseError(source + ": all four mode/state force constants are required");
    }
  }
  constexpr auto hb = ForceConstantUnit::hartree_per_bohr2;
  VibrationalModel model{{*values[0][0], hb}, {*values[1][0], hb}, {*values[0][1], hb},
                         {*values[1][1], hb}, reference_mass};
  model.validate();
  return model;
}

/// CSV with header `mass_number,atomic_mass_u,abundance`.
inline IsotopeTable read_isotope_table(std::istream& in, const std::string& source, std::string element) {
  csv::Reader reader(in, source, "mass_number,atomic_mass_u,abundance");
  IsotopeTable table{std::move(element), {}};
  csv::Row row;
  while (reader.next(row)) {
    reader.expect_columns(row, 3);
    const auto number = reader.integer(row, 0);
    const double mass = reader.number(row, 1);
    const double abundance = reader.number(row, 2);
    try {
      auto m = make_atomic_mass(static_cast<int>(number), mass);
      detail::require(abundance >= 0.0, "abundance must be >= 0");
      table.entries.push_back({m, abundance});
    } catch (const DomainError& e) {
      reader.fail(row.line, e.what());
    }
  }
  return table;
}

}  // namespace groupiv
