#pragma once

// Four-line optical structure of a negatively charged group-IV center. The
// ground and excited manifolds are each split in two by spin-orbit coupling:
//   C: lower ES -> lower GS      D: lower ES -> upper GS (C - gs splitting)
//   A: upper ES -> lower GS      B: upper ES -> upper GS (A - gs splitting)
// with A = C + es splitting.

#include <cmath>
#include <numbers>
#include <span>
#include <string_view>

#include "groupiv/error.hpp"
#include "groupiv/spectrum.hpp"
#include "groupiv/units.hpp"

namespace groupiv {

struct LevelStructure {
  double zpl_center_thz = 484.130;  // C transition
  double gs_splitting_ghz = 821.0;
  // Literature value for SnV; not measured here and always overridable.
  double es_splitting_ghz = 3000.0;
  double lifetime_ns = 6.0;

  void validate() const {
    detail::require(zpl_center_thz > 0.0 && gs_splitting_ghz > 0.0 && es_splitting_ghz > 0.0 &&
                        lifetime_ns > 0.0,
                    "level structure: all fields must be positive");
  }
};

inline LevelStructure snv_levels() { return {}; }

enum class Transition { a, b, c, d };

inline std::string_view to_string(Transition t) {
  switch (t) {
    case Transition::a: return "A";
    case Transition::b: return "B";
    case Transition::c: return "C";
    case Transition::d: return "D";
  }
  return "?";
}

/// Transition frequencies kept as exact GHz offsets from the C line.
struct TransitionSet {
  double reference_thz = 0.0;
  double a_ghz = 0.0;
  double b_ghz = 0.0;
  double c_ghz = 0.0;
  double d_ghz = 0.0;

  double offset_ghz(Transition t) const {
    switch (t) {
      case Transition::a: return a_ghz;
      case Transition::b: return b_ghz;
      case Transition::c: return c_ghz;
      case Transition::d: return d_ghz;
    }
    return 0.0;
  }

  double absolute_thz(Transition t) const { return reference_thz + offset_ghz(t) * 1e-3; }
};

inline TransitionSet transition_frequencies(const LevelStructure& ls) {
  ls.validate();
  return {ls.zpl_center_thz, ls.es_splitting_ghz, ls.es_splitting_ghz - ls.gs_splitting_ghz, 0.0,
          -ls.gs_splitting_ghz};
}

/// Boltzmann occupation of the upper level of a two-level manifold split by `splitting_ghz`.
inline double thermal_population(double splitting_ghz, double temperature_k) {
  detail::require(splitting_ghz > 0.0, "thermal_population: splitting must be positive");
  detail::require(temperature_k > 0.0, "thermal_population: temperature must be positive");
  const double x = constants::planck * splitting_ghz * 1e9 / (constants::boltzmann * temperature_k);
  return 1.0 / (1.0 + std::exp(x));
}

enum class LineKind { lorentzian, gaussian };

inline std::string_view to_string(LineKind kind) {
  return kind == LineKind::lorentzian ? "lorentzian" : "gaussian";
}

/// Peak-height parameterized line shape.
struct LineShapeSpec {
  LineKind kind = LineKind::lorentzian;
  double center = 0.0;
  double fwhm = 1.0;
  double amplitude = 1.0;
};

inline double lorentzian(double f, double center, double fwhm, double amplitude) {
  const double half = 0.5 * fwhm;
  const double d = f - center;
  return amplitude * half * half / (d * d + half * half);
}

inline double gaussian(double f, double center, double fwhm, double amplitude) {
  const double d = f - center;
  return amplitude * std::exp(-4.0 * std::numbers::ln2 * d * d / (fwhm * fwhm));
}

inline double evaluate_line(const LineShapeSpec& spec, double f) {
  return spec.kind == LineKind::lorentzian ? lorentzian(f, spec.center, spec.fwhm, spec.amplitude)
                                           : gaussian(f, spec.center, spec.fwhm, spec.amplitude);
}

struct PlSpectrumOptions {
  // Intensity of D relative to C (and of B relative to A).
  double lower_branch_ratio = 1.0;
  double amplitude = 1.0;
};

/// ZPL-only photoluminescence spectrum: four Lorentzians on the given offset grid (GHz
/// relative to the C line). A/B are weighted by the thermal population of the upper
/// excited level, C/D by the remainder.
inline Spectrum pl_spectrum(const LevelStructure& ls, double temperature_k, double per_line_fwhm_ghz,
                            std::span<const double> axis_ghz, PlSpectrumOptions options = {}) {
  detail::require(!axis_ghz.empty(), "pl_spectrum: empty frequency grid");
  detail::require(per_line_fwhm_ghz > 0.0, "pl_spectrum: line width must be positive");
  detail::require(options.lower_branch_ratio >= 0.0, "pl_spectrum: branching ratio must be >= 0");
  for (std::size_t i = 1; i < axis_ghz.size(); ++i) {
    detail::require(axis_ghz[i] > axis_ghz[i - 1], "pl_spectrum: grid must be ascending");
  }
  const auto lines = transition_frequencies(ls);
  const double upper = thermal_population(ls.es_splitting_ghz, temperature_k);
  const double lower = 1.0 - upper;
  const double r = options.lower_branch_ratio;
  const double heights[4] = {options.amplitude * upper, options.amplitude * upper * r,
                             options.amplitude * lower, options.amplitude * lower * r};
  const double centers[4] = {lines.a_ghz, lines.b_ghz, lines.c_ghz, lines.d_ghz};

  Spectrum out;
  out.reference_thz = ls.zpl_center_thz;
  out.offsets_ghz.assign(axis_ghz.begin(), axis_ghz.end());
  out.counts.resize(axis_ghz.size());
  for (std::size_t i = 0; i < axis_ghz.size(); ++i) {
    double sum = 0.0;
    for (int k = 0; k < 4; ++k) sum += lorentzian(axis_ghz[i], centers[k], per_line_fwhm_ghz, heights[k]);
    out.counts[i] = sum;
  }
  return out;
}

}  // namespace groupiv
