#pragma once

// Seeded simulator of an implanted emitter population: isotope draw,
// inhomogeneous center distribution per isotope group, synthetic PLE scans
// and resonance histograms.
//
// Every stochastic step draws from its own xoshiro256** stream whose seed is
// derive_seed(rng_seed, stream id), so the result depends only on the config.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "groupiv/error.hpp"
#include "groupiv/levels.hpp"
#include "groupiv/rng.hpp"
#include "groupiv/spectrum.hpp"
#include "groupiv/vibmodel.hpp"

namespace groupiv {

inline constexpr double fwhm_per_sigma = 2.3548200450309493;  // 2 sqrt(2 ln 2)

namespace streams {
inline constexpr std::uint64_t isotopes = 1;
inline constexpr std::uint64_t centers = 2;
inline constexpr std::uint64_t positions = 3;
inline constexpr std::uint64_t shot_noise = 4;
}  // namespace streams

struct Position {
  double x_um = 0.0;
  double y_um = 0.0;
  double z_um = 0.0;
};

struct Emitter {
  AtomicMass isotope;
  double center_offset_ghz = 0.0;
  double homogeneous_fwhm_mhz = 30.0;
  double brightness = 1.0;
  Position position;
};

struct ScanParams {
  double center_ghz = 0.0;
  double range_ghz = 47.0;
  double step_mhz = 10.0;
  double background = 0.0;
  bool shot_noise = true;
};

struct EnsembleConfig {
  int emitter_count = 160;
  IsotopeTable isotope_table = tin_isotopes();
  int selected_mass_number = 120;
  double selectivity = 1.0;
  std::map<int, double> group_offsets_ghz;
  std::map<int, double> group_inhom_fwhm_ghz;
  double homogeneous_fwhm_mhz = 32.0;
  double brightness = 100.0;
  double reference_thz = 484.130;
  ScanParams scan;
  // Emitters are placed uniformly in [0, box] along each axis; a zero extent pins that axis.
  Position position_box_um;
  std::uint64_t rng_seed = 0;

  void validate() const {
    detail::require(emitter_count >= 0, "ensemble: emitter_count must be >= 0");
    detail::require(selectivity >= 0.0 && selectivity <= 1.0, "ensemble: selectivity must be in [0, 1]");
    detail::require(scan.step_mhz > 0.0, "ensemble: scan_step must be positive");
    detail::require(scan.range_ghz >= 0.0 && std::isfinite(scan.range_ghz), "ensemble: scan_range must be finite");
    detail::require(homogeneous_fwhm_mhz > 0.0, "ensemble: homogeneous_fwhm must be positive");
    detail::require(brightness >= 0.0, "ensemble: brightness must be >= 0");
    detail::require(scan.background >= 0.0, "ensemble: background must be >= 0");
    for (const auto& [mass, fwhm] : group_inhom_fwhm_ghz) {
      detail::require(fwhm >= 0.0, "ensemble: group inhomogeneous FWHM must be >= 0 (isotope " +
                                       std::to_string(mass) + ")");
    }
    isotope_table.validate();
  }
};

/// Default SnV population: groups at 0 / +10.9 / +17.9 GHz for 120/119/118Sn, 3.9 GHz wide.
inline EnsembleConfig snv_default_ensemble() {
  EnsembleConfig cfg;
  const int keep[] = {118, 119, 120};
  cfg.isotope_table = tin_isotopes().restricted_to(keep);
  cfg.selectivity = 0.5;
  cfg.group_offsets_ghz = {{120, 0.0}, {119, 10.9}, {118, 17.9}};
  cfg.group_inhom_fwhm_ghz = {{120, 3.9}, {119, 3.9}, {118, 3.9}};
  cfg.scan = {5.0, 47.0, 10.0, 0.0, true};
  return cfg;
}

/// Isotope of every emitter: with probability `selectivity` the selected isotope,
/// otherwise a draw from the renormalized natural abundances.
inline std::vector<AtomicMass> sample_isotopes(const EnsembleConfig& cfg) {
  cfg.validate();
  detail::require(!cfg.isotope_table.entries.empty(), "sample_isotopes: isotope table is empty");
  const IsotopeTable table = cfg.isotope_table.renormalized();
  const AtomicMass selected = cfg.selectivity > 0.0 ? table.mass(cfg.selected_mass_number) : AtomicMass{};

  std::vector<double> cumulative;
  double running = 0.0;
  for (const auto& e : table.entries) cumulative.push_back(running += e.abundance);

  RandomStream rng(derive_seed(cfg.rng_seed, streams::isotopes));
  std::vector<AtomicMass> out;
  out.reserve(static_cast<std::size_t>(cfg.emitter_count));
  for (int i = 0; i < cfg.emitter_count; ++i) {
    const double forced = rng.uniform();
    const double pick = rng.uniform();
    if (forced < cfg.selectivity) {
      out.push_back(selected);
      continue;
    }
    const double target = pick * running;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    const auto index = std::min(static_cast<std::size_t>(it - cumulative.begin()), table.entries.size() - 1);
    out.push_back(table.entries[index].mass);
  }
  return out;
}

inline std::vector<Emitter> sample_emitters(const EnsembleConfig& cfg) {
  const auto isotopes = sample_isotopes(cfg);
  RandomStream centers(derive_seed(cfg.rng_seed, streams::centers));
  RandomStream positions(derive_seed(cfg.rng_seed, streams::positions));

  std::vector<Emitter> out;
  out.reserve(isotopes.size());
  for (const auto& iso : isotopes) {
    const auto offset = cfg.group_offsets_ghz.find(iso.mass_number);
    const auto width = cfg.group_inhom_fwhm_ghz.find(iso.mass_number);
    if (offset == cfg.group_offsets_ghz.end() || width == cfg.group_inhom_fwhm_ghz.end()) {
      throw DomainError("sample_emitters: no group offset/width for isotope " +
                        std::to_string(iso.mass_number));
    }
    Emitter e;
    e.isotope = iso;
    e.center_offset_ghz = offset->second + centers.normal() * (width->second / fwhm_per_sigma);
    e.homogeneous_fwhm_mhz = cfg.homogeneous_fwhm_mhz;
    e.brightness = cfg.brightness;
    e.position = {positions.uniform() * cfg.position_box_um.x_um, positions.uniform() * cfg.position_box_um.y_um,
                  positions.uniform() * cfg.position_box_um.z_um};
    out.push_back(e);
  }
  return out;
}

/// Scan grid: center +- range/2 in steps of step_mhz, computed by index (no accumulation).
inline std::vector<double> scan_axis(const ScanParams& scan) {
  detail::require(scan.step_mhz > 0.0, "scan_axis: step must be positive");
  detail::require(std::isfinite(scan.range_ghz) && scan.range_ghz >= 0.0, "scan_axis: range must be finite");
  const double step_ghz = scan.step_mhz * 1e-3;
  const auto n = static_cast<std::size_t>(std::floor(scan.range_ghz / step_ghz + 1e-9)) + 1;
  const double start = scan.center_ghz - 0.5 * scan.range_ghz;
  std::vector<double> axis(n);
  for (std::size_t i = 0; i < n; ++i) axis[i] = start + static_cast<double>(i) * step_ghz;
  return axis;
}

/// Sum of peak-height Lorentzians (one per emitter) plus background on the scan grid,
/// optionally replaced sample-by-sample by Poisson deviates.
inline Spectrum synthesize_ple_scan(std::span<const Emitter> emitters, double reference_thz,
                                    const ScanParams& scan, std::uint64_t seed) {
  detail::require(scan.background >= 0.0, "synthesize_ple_scan: background must be >= 0");
  for (const auto& e : emitters) {
    detail::require(e.homogeneous_fwhm_mhz > 0.0, "synthesize_ple_scan: emitter width must be positive");
    detail::require(e.brightness >= 0.0, "synthesize_ple_scan: brightness must be >= 0");
  }
  Spectrum out;
  out.reference_thz = reference_thz;
  out.offsets_ghz = scan_axis(scan);
  out.counts.assign(out.offsets_ghz.size(), scan.background);
  for (const auto& e : emitters) {
    const double fwhm_ghz = e.homogeneous_fwhm_mhz * 1e-3;
    for (std::size_t i = 0; i < out.offsets_ghz.size(); ++i) {
      out.counts[i] += lorentzian(out.offsets_ghz[i], e.center_offset_ghz, fwhm_ghz, e.brightness);
    }
  }
  if (scan.shot_noise) {
    RandomStream rng(derive_seed(seed, streams::shot_noise));
    for (auto& c : out.counts) c = static_cast<double>(rng.poisson(c));
  }
  return out;
}

/// Histogram over [low, high) with bins of `bin_width`; a value on a bin edge goes to the bin above it.
inline HistogramData build_histogram(std::span<const double> centers, double bin_width, double low,
                                     double high) {
  detail::require(bin_width > 0.0 && std::isfinite(bin_width), "build_histogram: bin width must be positive");
  detail::require(high > low, "build_histogram: empty range");
  const auto bins = static_cast<std::size_t>(std::ceil((high - low) / bin_width - 1e-9));
  HistogramData h;
  h.bin_edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges[i] = low + static_cast<double>(i) * bin_width;
  h.counts.assign(bins, 0);
  for (double c : centers) {
    if (!(c >= h.bin_edges.front() && c < h.bin_edges.back())) continue;
    // upper_bound puts an exact edge hit into the bin that starts at that edge
    auto it = std::upper_bound(h.bin_edges.begin(), h.bin_edges.end(), c);
    const auto bin = static_cast<std::size_t>(it - h.bin_edges.begin()) - 1;
    ++h.counts[bin];
  }
  return h;
}

inline std::vector<double> center_offsets(std::span<const Emitter> emitters) {
  std::vector<double> out;
  out.reserve(emitters.size());
  for (const auto& e : emitters) out.push_back(e.center_offset_ghz);
  return out;
}

}  // namespace groupiv
