#pragma once

// Simulation config documents (TOML) and named dataset resolution.
//
// Schema (every key optional; defaults are those of snv_default_ensemble()):
//
//   emitter_count = 160
//   rng_seed = 1
//   selectivity = 0.5              # fraction forced to selected_mass_number
//   selected_mass_number = 120
//   isotope_table = "builtin:sn"   # or a CSV path
//   isotopes = [118, 119, 120]     # optional restriction of the table
//   homogeneous_fwhm_mhz = 32.0
//   brightness = 100.0
//   reference_thz = 484.130
//
//   [scan]
//   center_ghz = 5.0
//   range_ghz = 47.0
//   step_mhz = 10.0
//   background = 0.0
//   shot_noise = true
//
//   [histogram]
//   bin_width_ghz = 1.0
//   low_ghz = -15.0
//   high_ghz = 35.0
//
//   [group_offsets_ghz]
//   120 = 0.0
//   119 = 10.9
//   118 = 17.9
//
//   [group_inhom_fwhm_ghz]
//   120 = 3.9
//   119 = 3.9
//   118 = 3.9
//
//   [position_box_um]
//   x = 20.0
//   y = 20.0
//   z = 0.0

#include <json.hpp>

#include <map>
#include <set>
#include <string>
#include <vector>

#include "groupiv/csv.hpp"
#include "groupiv/ensemble.hpp"
#include "groupiv/error.hpp"
#include "groupiv/toml_lite.hpp"
#include "groupiv/vibmodel.hpp"

namespace groupiv::config {

struct HistogramSettings {
  double bin_width_ghz = 1.0;
  double low_ghz = -15.0;
  double high_ghz = 35.0;
};

struct SimulationConfig {
  EnsembleConfig ensemble = snv_default_ensemble();
  HistogramSettings histogram;
  std::string isotope_table_source = "builtin:sn";
  std::vector<int> isotope_restriction{118, 119, 120};
};

inline IsotopeTable load_isotope_table(const std::string& name) {
  if (name == "builtin:sn") return tin_isotopes();
  if (name.rfind("builtin:", 0) == 0) throw DomainError("unknown built-in isotope table '" + name + "'");
  auto in = csv::open_input(name);
  auto table = read_isotope_table(in, name, name);
  table.validate();
  return table;
}

/// `builtin:snv-table1` or a force-constant CSV (reference mass taken from `reference`).
inline VibrationalModel load_vibrational_model(const std::string& name, AtomicMass reference) {
  if (name == "builtin:snv-table1") {
    auto model = snv_force_constants();
    model.reference_mass = reference;
    return model;
  }
  if (name.rfind("builtin:", 0) == 0) throw DomainError("unknown built-in model '" + name + "'");
  auto in = csv::open_input(name);
  return read_force_constants(in, name, reference);
}

namespace detail {

inline void check_keys(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ParseError(where + ": unknown key '" + key + "'");
  }
}

inline double number(const nlohmann::json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ParseError(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline std::int64_t integer(const nlohmann::json& obj, const char* key, std::int64_t fallback,
                            const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline std::map<int, double> mass_map(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw ParseError(where + " must be a table");
  std::map<int, double> out;
  for (const auto& [key, value] : obj.items()) {
    auto mass = csv::parse_int(key);
    if (!mass) throw ParseError(where + ": key '" + key + "' is not a mass number");
    if (!value.is_number()) throw ParseError(where + "." + key + " must be a number");
    out[static_cast<int>(*mass)] = value.get<double>();
  }
  return out;
}

}  // namespace detail

inline SimulationConfig from_json(const nlohmann::json& doc, const std::string& source) {
  using detail::integer;
  using detail::number;
  SimulationConfig cfg;
  auto& e = cfg.ensemble;
  detail::check_keys(doc,
                     {"emitter_count", "rng_seed", "selectivity", "selected_mass_number", "isotope_table", "isotopes",
                      "homogeneous_fwhm_mhz", "brightness", "reference_thz", "scan", "histogram",
                      "group_offsets_ghz", "group_inhom_fwhm_ghz", "position_box_um"},
                     source);
  e.emitter_count = static_cast<int>(integer(doc, "emitter_count", e.emitter_count, source));
  const auto seed = integer(doc, "rng_seed", static_cast<std::int64_t>(e.rng_seed), source);
  if (seed < 0) throw ParseError(source + ": rng_seed must be >= 0");
  e.rng_seed = static_cast<std::uint64_t>(seed);
  e.selectivity = number(doc, "selectivity", e.selectivity, source);
  e.selected_mass_number = static_cast<int>(integer(doc, "selected_mass_number", e.selected_mass_number, source));
  e.homogeneous_fwhm_mhz = number(doc, "homogeneous_fwhm_mhz", e.homogeneous_fwhm_mhz, source);
  e.brightness = number(doc, "brightness", e.brightness, source);
  e.reference_thz = number(doc, "reference_thz", e.reference_thz, source);

  if (doc.contains("isotope_table")) {
    if (!doc["isotope_table"].is_string()) throw ParseError(source + ": 'isotope_table' must be a string");
    cfg.isotope_table_source = doc["isotope_table"].get<std::string>();
  }
  if (doc.contains("isotopes")) {
    cfg.isotope_restriction.clear();
    for (const auto& v : doc["isotopes"]) {
      if (!v.is_number_integer()) throw ParseError(source + ": 'isotopes' must list mass numbers");
      cfg.isotope_restriction.push_back(v.get<int>());
    }
  } else if (doc.contains("isotope_table")) {
    cfg.isotope_restriction.clear();
  }
  auto table = load_isotope_table(cfg.isotope_table_source);
  e.isotope_table = cfg.isotope_restriction.empty() ? table : table.restricted_to(cfg.isotope_restriction);

  if (doc.contains("scan")) {
    const auto& s = doc["scan"];
    const std::string where = source + " [scan]";
    detail::check_keys(s, {"center_ghz", "range_ghz", "step_mhz", "background", "shot_noise"}, where);
    e.scan.center_ghz = number(s, "center_ghz", e.scan.center_ghz, where);
    e.scan.range_ghz = number(s, "range_ghz", e.scan.range_ghz, where);
    e.scan.step_mhz = number(s, "step_mhz", e.scan.step_mhz, where);
    e.scan.background = number(s, "background", e.scan.background, where);
    if (s.contains("shot_noise")) {
      if (!s["shot_noise"].is_boolean()) throw ParseError(where + ": 'shot_noise' must be true or false");
      e.scan.shot_noise = s["shot_noise"].get<bool>();
    }
  }
  if (doc.contains("histogram")) {
    const auto& h = doc["histogram"];
    const std::string where = source + " [histogram]";
    detail::check_keys(h, {"bin_width_ghz", "low_ghz", "high_ghz"}, where);
    cfg.histogram.bin_width_ghz = number(h, "bin_width_ghz", cfg.histogram.bin_width_ghz, where);
    cfg.histogram.low_ghz = number(h, "low_ghz", cfg.histogram.low_ghz, where);
    cfg.histogram.high_ghz = number(h, "high_ghz", cfg.histogram.high_ghz, where);
  }
  if (doc.contains("group_offsets_ghz")) {
    e.group_offsets_ghz = detail::mass_map(doc["group_offsets_ghz"], source + " [group_offsets_ghz]");
  }
  if (doc.contains("group_inhom_fwhm_ghz")) {
    e.group_inhom_fwhm_ghz = detail::mass_map(doc["group_inhom_fwhm_ghz"], source + " [group_inhom_fwhm_ghz]");
  }
  if (doc.contains("position_box_um")) {
    const auto& b = doc["position_box_um"];
    const std::string where = source + " [position_box_um]";
    detail::check_keys(b, {"x", "y", "z"}, where);
    e.position_box_um = {number(b, "x", 0.0, where), number(b, "y", 0.0, where), number(b, "z", 0.0, where)};
  }
  e.validate();
  return cfg;
}

inline SimulationConfig load(const std::string& path) {
  auto in = csv::open_input(path);
  return from_json(toml::parse(in, path), path);
}

/// Fully resolved config, as recorded in run manifests.
inline nlohmann::json to_json(const SimulationConfig& cfg) {
  const auto& e = cfg.ensemble;
  nlohmann::json doc;
  doc["emitter_count"] = e.emitter_count;
  doc["rng_seed"] = e.rng_seed;
  doc["selectivity"] = e.selectivity;
  doc["selected_mass_number"] = e.selected_mass_number;
  doc["isotope_table"] = cfg.isotope_table_source;
  doc["isotopes"] = cfg.isotope_restriction;
  doc["homogeneous_fwhm_mhz"] = e.homogeneous_fwhm_mhz;
  doc["brightness"] = e.brightness;
  doc["reference_thz"] = e.reference_thz;
  doc["scan"] = {{"center_ghz", e.scan.center_ghz},
                 {"range_ghz", e.scan.range_ghz},
                 {"step_mhz", e.scan.step_mhz},
                 {"background", e.scan.background},
                 {"shot_noise", e.scan.shot_noise}};
  doc["histogram"] = {{"bin_width_ghz", cfg.histogram.bin_width_ghz},
                      {"low_ghz", cfg.histogram.low_ghz},
                      {"high_ghz", cfg.histogram.high_ghz}};
  nlohmann::json offsets = nlohmann::json::object(), widths = nlohmann::json::object();
  for (const auto& [m, v] : e.group_offsets_ghz) offsets[std::to_string(m)] = v;
  for (const auto& [m, v] : e.group_inhom_fwhm_ghz) widths[std::to_string(m)] = v;
  doc["group_offsets_ghz"] = offsets;
  doc["group_inhom_fwhm_ghz"] = widths;
  doc["position_box_um"] = {{"x", e.position_box_um.x_um}, {"y", e.position_box_um.y_um}, {"z", e.position_box_um.z_um}};
  return doc;
}

}  // namespace groupiv::config
