#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "groupiv/ensemble.hpp"
#include "groupiv/error.hpp"
#include "groupiv/rng.hpp"

namespace groupiv {

enum class CoincidenceWindow {
  // |f1 - f2| <= window
  full,
  // |f1 - f2| <= window / 2
  half,
};

/// Probability that two independent emitters drawn from a Gaussian of FWHM
/// `inhom_fwhm_ghz` lie within `window_mhz` of each other: erf(w / (2 sigma)).
inline double coincidence_probability_analytic(double inhom_fwhm_ghz, double window_mhz,
                                               CoincidenceWindow mode = CoincidenceWindow::full) {
  detail::require(inhom_fwhm_ghz > 0.0, "coincidence_probability: FWHM must be positive");
  detail::require(window_mhz >= 0.0, "coincidence_probability: window must be >= 0");
  const double sigma = inhom_fwhm_ghz / fwhm_per_sigma;
  double window_ghz = window_mhz * 1e-3;
  if (mode == CoincidenceWindow::half) window_ghz *= 0.5;
  return std::erf(window_ghz / (2.0 * sigma));
}

struct McEstimate {
  double probability = 0.0;
  double standard_error = 0.0;
  std::int64_t hits = 0;
  std::int64_t trials = 0;
};

/// Monte Carlo counterpart of coincidence_probability_analytic.
///
/// Trials are split into `partitions` contiguous blocks; block k draws from the
/// stream derive_seed(seed, k) and the blocks run on separate threads. The
/// estimate depends on (seed, trials, partitions) only.
inline McEstimate coincidence_probability_mc(double inhom_fwhm_ghz, double window_mhz, std::int64_t trials,
                                             std::uint64_t seed, CoincidenceWindow mode = CoincidenceWindow::full,
                                             unsigned partitions = 4) {
  detail::require(inhom_fwhm_ghz > 0.0, "coincidence_probability_mc: FWHM must be positive");
  detail::require(window_mhz >= 0.0, "coincidence_probability_mc: window must be >= 0");
  detail::require(trials >= 1000, "coincidence_probability_mc: need at least 1000 trials");
  detail::require(partitions >= 1, "coincidence_probability_mc: need at least one partition");
  McEstimate out;
  out.trials = trials;
  if (window_mhz == 0.0) return out;

  const double sigma = inhom_fwhm_ghz / fwhm_per_sigma;
  double window_ghz = window_mhz * 1e-3;
  if (mode == CoincidenceWindow::half) window_ghz *= 0.5;

  std::vector<std::int64_t> hits(partitions, 0);
  {
    std::vector<std::jthread> workers;
    workers.reserve(partitions);
    for (unsigned k = 0; k < partitions; ++k) {
      const std::int64_t begin = trials * k / partitions;
      const std::int64_t end = trials * (k + 1) / partitions;
      workers.emplace_back([&, k, begin, end] {
        RandomStream rng(derive_seed(seed, k));
        std::int64_t count = 0;
        for (std::int64_t t = begin; t < end; ++t) {
          const double a = rng.normal() * sigma;
          const double b = rng.normal() * sigma;
          if (std::abs(a - b) <= window_ghz) ++count;
        }
        hits[k] = count;
      });
    }
  }
  for (auto h : hits) out.hits += h;
  const double p = static_cast<double>(out.hits) / static_cast<double>(trials);
  out.probability = p;
  out.standard_error = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
  return out;
}

/// Normalized cross-correlation of two unit-area Lorentzians, in [0, 1].
inline double lorentzian_overlap(double center1, double fwhm1, double center2, double fwhm2) {
  detail::require(fwhm1 > 0.0 && fwhm2 > 0.0, "lorentzian_overlap: widths must be positive");
  const double g1 = 0.5 * fwhm1;
  const double g2 = 0.5 * fwhm2;
  const double sum = g1 + g2;
  const double delta = center1 - center2;
  return 2.0 * std::sqrt(g1 * g2) * sum / (sum * sum + delta * delta);
}

struct LineFeature {
  double center_ghz = 0.0;
  double fwhm_mhz = 0.0;
};

struct PairReport {
  std::size_t i = 0;
  std::size_t j = 0;
  double detuning_mhz = 0.0;
  double width_i_mhz = 0.0;
  double width_j_mhz = 0.0;
  double overlap = 0.0;
};

/// All pairs i < j detuned by at most `max_detuning_mhz`, closest first.
inline std::vector<PairReport> find_identical_pairs(std::span<const LineFeature> lines, double max_detuning_mhz) {
  detail::require(max_detuning_mhz >= 0.0, "find_identical_pairs: max detuning must be >= 0");
  std::vector<PairReport> out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const double detuning = std::abs(lines[i].center_ghz - lines[j].center_ghz) * 1e3;
      if (detuning > max_detuning_mhz) continue;
      out.push_back({i, j, detuning, lines[i].fwhm_mhz, lines[j].fwhm_mhz,
                     lorentzian_overlap(lines[i].center_ghz * 1e3, lines[i].fwhm_mhz, lines[j].center_ghz * 1e3,
                                        lines[j].fwhm_mhz)});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PairReport& a, const PairReport& b) { return a.detuning_mhz < b.detuning_mhz; });
  return out;
}

struct DepthCorrection {
  double factor = 1.0;
  double actual_depth_um = 0.0;
};

/// Confocal focal-shift correction for focusing from a medium of index `n_outside`
/// into one of index `n_inside`, using the 0.5*NA marginal-ray convention.
inline DepthCorrection depth_correction(double numerical_aperture, double n_outside, double n_inside,
                                        double observed_depth_um) {
  detail::require(numerical_aperture > 0.0, "depth_correction: NA must be positive");
  const double half_na = 0.5 * numerical_aperture;
  detail::require(half_na < n_outside && half_na < n_inside,
                  "depth_correction: 0.5*NA must be below both refractive indices");
  const double factor = std::tan(std::asin(half_na / n_outside)) / std::tan(std::asin(half_na / n_inside));
  return {factor, factor * observed_depth_um};
}

}  // namespace groupiv
