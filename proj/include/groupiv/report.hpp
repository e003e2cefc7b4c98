#pragma once

// JSON fit reports, JSON-lines pair reports and run manifests.

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "groupiv/analysis.hpp"
#include "groupiv/lm.hpp"
#include "groupiv/peaks.hpp"

namespace groupiv {

inline constexpr const char* toolkit_version = "0.3.0";

struct RunManifest {
  std::string subcommand;
  nlohmann::json config = nlohmann::json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::uint64_t seed = 0;
  std::string version = toolkit_version;
  std::string timestamp;

  nlohmann::json to_json() const {
    return {{"subcommand", subcommand}, {"config", config}, {"inputs", inputs}, {"outputs", outputs},
            {"seed", seed},             {"version", version}, {"timestamp", timestamp}};
  }

  /// One-line form for CSV comment headers.
  std::string comment() const { return "manifest: " + to_json().dump(); }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

namespace detail {

// Field-name suffix for a peak axis unit. PLE scans are in GHz, so their widths
// are additionally given in MHz.
inline nlohmann::json peak_fields(const Peak& p, bool ple) {
  nlohmann::json j{{"center_ghz", p.center}, {"fwhm_ghz", p.fwhm}};
  if (ple) j["fwhm_mhz"] = p.fwhm * 1e3;
  j["amplitude_counts"] = p.amplitude;
  return j;
}

}  // namespace detail

/// {model, parameters[], standard_errors[], residual_norm, converged, iterations, ...}
inline nlohmann::json fit_report(const PeakFit& fit, bool ple_axis, const RunManifest* manifest = nullptr) {
  nlohmann::json report;
  report["model"] = std::string(to_string(fit.model.kind));
  report["peak_count"] = fit.model.peaks.size();
  nlohmann::json params = nlohmann::json::array();
  nlohmann::json errors = nlohmann::json::array();
  const auto& se = fit.result.standard_errors;
  for (std::size_t k = 0; k < fit.model.peaks.size(); ++k) {
    params.push_back(detail::peak_fields(fit.model.peaks[k], ple_axis));
    Peak e{};
    if (se.size() >= 3 * (k + 1)) e = {se[3 * k], se[3 * k + 1], se[3 * k + 2]};
    errors.push_back(detail::peak_fields(e, ple_axis));
  }
  report["parameters"] = params;
  report["standard_errors"] = errors;
  if (fit.model.has_baseline) {
    report["baseline_counts"] = fit.model.baseline;
    report["baseline_standard_error"] = se.empty() ? 0.0 : se.back();
  }
  report["residual_norm"] = fit.result.residual_norm;
  report["converged"] = fit.result.converged;
  report["status"] = to_string(fit.result.status);
  report["iterations"] = fit.result.iterations;
  if (!fit.result.diagnostic.empty()) report["diagnostic"] = fit.result.diagnostic;
  if (manifest) report["manifest"] = manifest->to_json();
  return report;
}

inline nlohmann::json to_json(const PairReport& p) {
  return {{"i", p.i},
          {"j", p.j},
          {"detuning_mhz", p.detuning_mhz},
          {"width_i_mhz", p.width_i_mhz},
          {"width_j_mhz", p.width_j_mhz},
          {"overlap_metric", p.overlap}};
}

inline void write_pairs_jsonl(std::ostream& out, std::span<const PairReport> pairs) {
  for (const auto& p : pairs) out << to_json(p).dump() << '\n';
}

}  // namespace groupiv
