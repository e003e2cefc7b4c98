#pragma once

// Multi-peak line fitting on top of the LM solver: Lorentzian sums for PLE
// scans, Gaussian sums for resonance histograms.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "groupiv/error.hpp"
#include "groupiv/levels.hpp"
#include "groupiv/lm.hpp"
#include "groupiv/spectrum.hpp"

namespace groupiv {

struct Peak {
  double center = 0.0;
  double fwhm = 1.0;
  double amplitude = 1.0;
};

struct PeakModel {
  LineKind kind = LineKind::lorentzian;
  std::vector<Peak> peaks;
  bool has_baseline = false;
  double baseline = 0.0;

  std::size_t parameter_count() const { return 3 * peaks.size() + (has_baseline ? 1 : 0); }

  double evaluate(double x) const {
    double sum = has_baseline ? baseline : 0.0;
    for (const auto& p : peaks) sum += evaluate_line({kind, p.center, p.fwhm, p.amplitude}, x);
    return sum;
  }

  std::vector<double> to_parameters() const {
    std::vector<double> out;
    out.reserve(parameter_count());
    for (const auto& p : peaks) out.insert(out.end(), {p.center, p.fwhm, p.amplitude});
    if (has_baseline) out.push_back(baseline);
    return out;
  }

  static PeakModel from_parameters(LineKind kind, std::span<const double> params, bool has_baseline) {
    PeakModel m{kind, {}, has_baseline, 0.0};
    const std::size_t n = (params.size() - (has_baseline ? 1 : 0)) / 3;
    for (std::size_t i = 0; i < n; ++i) m.peaks.push_back({params[3 * i], params[3 * i + 1], params[3 * i + 2]});
    if (has_baseline) m.baseline = params.back();
    return m;
  }
};

enum class Weighting {
  uniform,
  // Iteratively reweighted: sigma_i^2 = max(model_i, 1) from the previous pass.
  poisson,
};

struct PeakFitOptions {
  Weighting weighting = Weighting::uniform;
  int reweight_passes = 3;
  // Minimum smoothed height above baseline for an auto-detected maximum.
  // NaN selects 10% of the largest smoothed excursion.
  double min_height = std::numeric_limits<double>::quiet_NaN();
  NllsOptions solver;
};

struct PeakFit {
  FitResult result;
  PeakModel model;
};

namespace detail {

inline std::vector<double> moving_average(std::span<const double> y, std::size_t window) {
  std::vector<double> out(y.size());
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(y.size() - 1, i + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += y[j];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

inline double percentile(std::span<const double> y, double q) {
  if (y.empty()) return 0.0;
  std::vector<double> sorted(y.begin(), y.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline void check_axis(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), "peak fit: axis and data sizes differ");
  for (std::size_t i = 1; i < x.size(); ++i) require(x[i] > x[i - 1], "peak fit: axis must be ascending");
}

// Adds d(model)/d(params) for one peak at x into row `row` starting at column `col`.
inline void line_gradient(LineKind kind, double x, const Peak& p, Eigen::MatrixXd& jac, Eigen::Index row,
                          Eigen::Index col) {
  const double d = x - p.center;
  if (kind == LineKind::lorentzian) {
    const double h = 0.5 * p.fwhm;
    const double denom = d * d + h * h;
    const double shape = h * h / denom;
    jac(row, col) = p.amplitude * h * h * 2.0 * d / (denom * denom);
    jac(row, col + 1) = p.amplitude * h * d * d / (denom * denom);
    jac(row, col + 2) = shape;
  } else {
    constexpr double k = 4.0 * std::numbers::ln2;
    const double w2 = p.fwhm * p.fwhm;
    const double shape = std::exp(-k * d * d / w2);
    jac(row, col) = p.amplitude * shape * 2.0 * k * d / w2;
    jac(row, col + 1) = p.amplitude * shape * 2.0 * k * d * d / (w2 * p.fwhm);
    jac(row, col + 2) = shape;
  }
}

}  // namespace detail

/// Peak candidates from smoothed local maxima, tallest first.
///
/// The data are smoothed with a 5-sample moving average and the baseline is the
/// 10th percentile of the raw data. Each local maximum at least `min_height` above
/// the baseline becomes a candidate with its FWHM taken from the half-height
/// crossings of the smoothed curve. When two candidates lie within one FWHM of
/// each other only the taller survives.
inline std::vector<Peak> auto_initialize(std::span<const double> x, std::span<const double> y, double min_height,
                                         double* baseline_out = nullptr) {
  detail::check_axis(x, y);
  std::vector<Peak> found;
  const double baseline = detail::percentile(y, 0.10);
  if (baseline_out) *baseline_out = baseline;
  if (y.size() < 3) return found;
  const auto s = detail::moving_average(y, 5);
  if (std::isnan(min_height)) {
    const double top = *std::max_element(s.begin(), s.end()) - baseline;
    min_height = 0.1 * top;
  }
  if (!(min_height > 0.0)) min_height = std::numeric_limits<double>::min();

  struct Candidate {
    Peak peak;
    double height;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (!(s[i] >= s[i - 1] && s[i] > s[i + 1])) continue;
    const double height = s[i] - baseline;
    if (height < min_height) continue;
    const double half = baseline + 0.5 * height;

    std::optional<double> left, right;
    for (std::size_t j = i; j > 0; --j) {
      if (s[j - 1] <= half) {
        left = x[j - 1] + (half - s[j - 1]) / (s[j] - s[j - 1]) * (x[j] - x[j - 1]);
        break;
      }
    }
    for (std::size_t j = i; j + 1 < s.size(); ++j) {
      if (s[j + 1] <= half) {
        right = x[j] + (s[j] - half) / (s[j] - s[j + 1]) * (x[j + 1] - x[j]);
        break;
      }
    }
    double fwhm = 0.0;
    if (left && right) fwhm = *right - *left;
    else if (left) fwhm = 2.0 * (x[i] - *left);
    else if (right) fwhm = 2.0 * (*right - x[i]);
    else fwhm = x.back() - x.front();
    const double spacing = x[i + 1] - x[i - 1];
    fwhm = std::max(fwhm, 0.5 * spacing);

    // raw maximum next to the smoothed one gives a better height for narrow lines
    const std::size_t lo = i >= 2 ? i - 2 : 0;
    const std::size_t hi = std::min(y.size() - 1, i + 2);
    std::size_t best = i;
    for (std::size_t j = lo; j <= hi; ++j) {
      if (y[j] > y[best]) best = j;
    }
    const double amplitude = std::max(height, y[best] - baseline);
    candidates.push_back({{x[i], fwhm, amplitude}, height});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.height > b.height; });
  for (const auto& c : candidates) {
    const bool shadowed = std::any_of(found.begin(), found.end(), [&](const Peak& kept) {
      return std::abs(kept.center - c.peak.center) < std::max(kept.fwhm, c.peak.fwhm);
    });
    if (!shadowed) found.push_back(c.peak);
  }
  return found;
}

/// Fits `initial` (peak count, kind, baseline flag and starting values) to (x, y).
/// Peaks in the result are ordered by ascending center; widths are in axis units.
inline PeakFit fit_peaks(std::span<const double> x, std::span<const double> y, const PeakModel& initial,
                         const PeakFitOptions& options = {}) {
  detail::check_axis(x, y);
  detail::require(!initial.peaks.empty(), "fit_peaks: at least one peak is required");
  const std::size_t n_params = initial.parameter_count();
  if (x.size() < n_params) {
    throw DomainError("fit_peaks: " + std::to_string(x.size()) + " points for " + std::to_string(n_params) +
                      " parameters");
  }
  if (x.size() < 5 * n_params) {
    throw DomainError("fit_peaks: need at least 5 points per free parameter (" + std::to_string(5 * n_params) +
                      "), got " + std::to_string(x.size()));
  }

  const LineKind kind = initial.kind;
  const bool baseline = initial.has_baseline;
  const std::size_t n_peaks = initial.peaks.size();
  const double span = x.back() - x.front();

  NllsOptions solver = options.solver;
  if (solver.lower_bounds.empty()) {
    solver.lower_bounds.assign(n_params, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_peaks; ++i) {
      solver.lower_bounds[3 * i + 1] = span * 1e-9;
      solver.lower_bounds[3 * i + 2] = 0.0;
    }
  }

  Eigen::VectorXd weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(x.size()));
  auto residual = [&](const Eigen::VectorXd& p) {
    const auto model = PeakModel::from_parameters(kind, {p.data(), static_cast<std::size_t>(p.size())}, baseline);
    Eigen::VectorXd r(static_cast<Eigen::Index>(x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      r[row] = (model.evaluate(x[i]) - y[i]) * weights[row];
    }
    return r;
  };
  auto jacobian = [&](const Eigen::VectorXd& p) {
    const auto model = PeakModel::from_parameters(kind, {p.data(), static_cast<std::size_t>(p.size())}, baseline);
    Eigen::MatrixXd jac(static_cast<Eigen::Index>(x.size()), p.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      for (std::size_t k = 0; k < n_peaks; ++k) {
        detail::line_gradient(kind, x[i], model.peaks[k], jac, row, static_cast<Eigen::Index>(3 * k));
      }
      if (baseline) jac(row, p.size() - 1) = 1.0;
      jac.row(row) *= weights[row];
    }
    return jac;
  };

  auto params = initial.to_parameters();
  for (std::size_t i = 0; i < n_peaks; ++i) {
    params[3 * i + 1] = std::abs(params[3 * i + 1]);
  }
  FitResult result = nlls_solve(residual, jacobian, params, solver);
  if (options.weighting == Weighting::poisson) {
    for (int pass = 0; pass < options.reweight_passes && result.status != FitStatus::singular; ++pass) {
      const auto model = PeakModel::from_parameters(kind, result.parameters, baseline);
      for (std::size_t i = 0; i < x.size(); ++i) {
        weights[static_cast<Eigen::Index>(i)] = 1.0 / std::sqrt(std::max(model.evaluate(x[i]), 1.0));
      }
      result = nlls_solve(residual, jacobian, result.parameters, solver);
    }
  }

  // order peaks by center, carrying the standard errors along
  std::vector<std::size_t> order(n_peaks);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.parameters[3 * a] < result.parameters[3 * b];
  });
  auto sorted_params = result.parameters;
  auto sorted_errors = result.standard_errors;
  for (std::size_t k = 0; k < n_peaks; ++k) {
    for (std::size_t j = 0; j < 3; ++j) {
      sorted_params[3 * k + j] = result.parameters[3 * order[k] + j];
      sorted_errors[3 * k + j] = result.standard_errors[3 * order[k] + j];
    }
  }
  result.parameters = std::move(sorted_params);
  result.standard_errors = std::move(sorted_errors);
  PeakFit fit{result, PeakModel::from_parameters(kind, result.parameters, baseline)};
  return fit;
}

/// Auto-initialized variant: seeds `peak_count` peaks from auto_initialize. If fewer
/// maxima are found the fit is not attempted and the result says so.
inline PeakFit fit_peaks(std::span<const double> x, std::span<const double> y, LineKind kind,
                         std::size_t peak_count, bool with_baseline, const PeakFitOptions& options = {}) {
  detail::require(peak_count >= 1, "fit_peaks: peak_count must be >= 1");
  double baseline = 0.0;
  auto candidates = auto_initialize(x, y, options.min_height, &baseline);
  PeakModel initial{kind, {}, with_baseline, with_baseline ? baseline : 0.0};
  if (candidates.size() < peak_count) {
    initial.peaks = candidates;
    PeakFit fit{{}, initial};
    fit.result.status = FitStatus::not_attempted;
    fit.result.diagnostic = "auto-initialization found " + std::to_string(candidates.size()) + " of " +
                            std::to_string(peak_count) + " requested maxima";
    fit.result.parameters = initial.to_parameters();
    fit.result.standard_errors.assign(fit.result.parameters.size(), 0.0);
    return fit;
  }
  candidates.resize(peak_count);
  if (!with_baseline) {
    for (auto& c : candidates) c.amplitude += baseline;
  }
  initial.peaks = candidates;
  return fit_peaks(x, y, initial, options);
}

inline PeakFit fit_peaks(const Spectrum& spectrum, LineKind kind, std::size_t peak_count, bool with_baseline,
                         const PeakFitOptions& options = {}) {
  return fit_peaks(spectrum.offsets_ghz, spectrum.counts, kind, peak_count, with_baseline, options);
}

inline PeakFit fit_peaks(const HistogramData& histogram, LineKind kind, std::size_t peak_count, bool with_baseline,
                         const PeakFitOptions& options = {}) {
  const auto centers = histogram.bin_centers();
  std::vector<double> counts(histogram.counts.begin(), histogram.counts.end());
  return fit_peaks(centers, counts, kind, peak_count, with_baseline, options);
}

namespace detail {

// Unresolved neighbours: fit the detected peaks, then split whichever peak
// lowers the residual most, until `target` peaks are in the model.
inline PeakFit fit_by_splitting(std::span<const double> x, std::span<const double> y, PeakModel seed,
                                std::size_t target, const PeakFitOptions& options) {
  auto fit = fit_peaks(x, y, seed, options);
  while (fit.model.peaks.size() < target) {
    const PeakModel& base = fit.result.converged ? fit.model : seed;
    std::optional<PeakFit> best;
    for (std::size_t i = 0; i < base.peaks.size(); ++i) {
      PeakModel trial = base;
      const Peak p = trial.peaks[i];
      trial.peaks[i] = {p.center - 0.25 * p.fwhm, 0.5 * p.fwhm, 0.6 * p.amplitude};
      trial.peaks.insert(trial.peaks.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                         Peak{p.center + 0.25 * p.fwhm, 0.5 * p.fwhm, 0.6 * p.amplitude});
      auto candidate = fit_peaks(x, y, trial, options);
      if (candidate.result.converged && (!best || candidate.result.residual_norm < best->result.residual_norm)) {
        best = std::move(candidate);
      }
    }
    if (!best) return fit;
    seed = best->model;
    fit = std::move(*best);
  }
  return fit;
}

}  // namespace detail

struct Resonance {
  double center_ghz = 0.0;
  double fwhm_mhz = 0.0;
  double amplitude = 0.0;
};

/// Resonances of a PLE scan (axis in GHz).
///
/// Without `peak_count`, every auto-detected maximum at least `threshold` above the
/// baseline is refined by a local Lorentzian fit; maxima whose fit windows overlap are
/// fitted together. With `peak_count`, one global fit of that many peaks is tried first.
/// Fitted lines with amplitude below `threshold` are dropped.
inline std::vector<Resonance> extract_resonances(const Spectrum& spectrum, double threshold,
                                                 std::optional<std::size_t> peak_count = std::nullopt,
                                                 const PeakFitOptions& base_options = {}) {
  detail::require(threshold > 0.0, "extract_resonances: threshold must be positive");
  std::vector<Resonance> out;
  if (spectrum.size() < 3) return out;
  const auto& x = spectrum.offsets_ghz;
  const auto& y = spectrum.counts;
  PeakFitOptions options = base_options;
  options.min_height = threshold;

  auto collect = [&](const PeakModel& model) {
    for (const auto& p : model.peaks) {
      if (p.amplitude >= threshold) out.push_back({p.center, p.fwhm * 1e3, p.amplitude});
    }
  };

  if (peak_count) {
    const std::size_t params = 3 * *peak_count + 1;
    if (x.size() >= 5 * params) {
      auto fit = fit_peaks(spectrum, LineKind::lorentzian, *peak_count, true, options);
      if (fit.result.status == FitStatus::not_attempted && !fit.model.peaks.empty()) {
        fit = detail::fit_by_splitting(x, y, fit.model, *peak_count, options);
      }
      if (fit.result.converged) {
        collect(fit.model);
        return out;
      }
    }
  }

  double baseline = 0.0;
  auto candidates = auto_initialize(x, y, threshold, &baseline);
  std::sort(candidates.begin(), candidates.end(),
            [](const Peak& a, const Peak& b) { return a.center < b.center; });

  std::size_t i = 0;
  while (i < candidates.size()) {
    std::vector<Peak> cluster{candidates[i]};
    double lo = candidates[i].center - 5.0 * candidates[i].fwhm;
    double hi = candidates[i].center + 5.0 * candidates[i].fwhm;
    std::size_t j = i + 1;
    while (j < candidates.size() && candidates[j].center - 5.0 * candidates[j].fwhm < hi) {
      cluster.push_back(candidates[j]);
      hi = std::max(hi, candidates[j].center + 5.0 * candidates[j].fwhm);
      ++j;
    }
    i = j;

    const std::size_t needed = 5 * (3 * cluster.size() + 1);
    auto first = std::lower_bound(x.begin(), x.end(), lo) - x.begin();
    auto last = std::upper_bound(x.begin(), x.end(), hi) - x.begin();
    while (static_cast<std::size_t>(last - first) < needed &&
           (first > 0 || static_cast<std::size_t>(last) < x.size())) {
      if (first > 0) --first;
      if (static_cast<std::size_t>(last) < x.size()) ++last;
    }
    PeakModel seed{LineKind::lorentzian, cluster, true, baseline};
    if (static_cast<std::size_t>(last - first) < needed) {
      collect(seed);
      continue;
    }
    const std::span<const double> xs(x.data() + first, static_cast<std::size_t>(last - first));
    const std::span<const double> ys(y.data() + first, static_cast<std::size_t>(last - first));
    auto fit = fit_peaks(xs, ys, seed, options);
    collect(fit.result.converged ? fit.model : seed);
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) { return a.center_ghz < b.center_ghz; });
  return out;
}

}  // namespace groupiv
