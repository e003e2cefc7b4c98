#pragma once

// Batch command-line front end. Exit codes: 0 success, 1 user error (bad flags,
// unreadable or malformed files), 2 numerical failure (fit did not converge;
// partial results are still written).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "groupiv/analysis.hpp"
#include "groupiv/config.hpp"
#include "groupiv/ensemble.hpp"
#include "groupiv/io.hpp"
#include "groupiv/levels.hpp"
#include "groupiv/peaks.hpp"
#include "groupiv/report.hpp"
#include "groupiv/svg.hpp"
#include "groupiv/vibmodel.hpp"

namespace groupiv::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_user_error = 1;
inline constexpr int exit_numeric_failure = 2;

inline constexpr const char* seed_env_var = "GROUPIV_SPECTRA_SEED";

namespace detail {

inline std::string format(const char* fmt, ...) {
  char buffer[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buffer, sizeof(buffer), fmt, args);
  va_end(args);
  return buffer;
}

inline bool is_svg(const std::string& path) { return std::filesystem::path(path).extension() == ".svg"; }
inline bool is_json(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension();
  return ext == ".json" || ext == ".jsonl";
}

template <class Writer>
void write_file(const std::string& path, Writer&& writer) {
  auto out = csv::open_output(path);
  writer(out);
  out.flush();
  if (!out) throw IoError("failed writing '" + path + "'");
}

inline std::optional<std::uint64_t> env_seed() {
  const char* value = std::getenv(seed_env_var);
  if (!value || !*value) return std::nullopt;
  auto parsed = csv::parse_int(value);
  if (!parsed || *parsed < 0) throw DomainError(std::string(seed_env_var) + " must be a non-negative integer");
  return static_cast<std::uint64_t>(*parsed);
}

inline LineKind parse_kind(const std::string& name) {
  if (name == "lorentzian") return LineKind::lorentzian;
  if (name == "gaussian") return LineKind::gaussian;
  throw DomainError("unknown line shape '" + name + "' (expected lorentzian or gaussian)");
}

inline Weighting parse_weighting(const std::string& name) {
  if (name == "uniform") return Weighting::uniform;
  if (name == "poisson") return Weighting::poisson;
  throw DomainError("unknown weighting '" + name + "' (expected uniform or poisson)");
}

inline RunManifest make_manifest(std::string subcommand, nlohmann::json config, std::vector<std::string> inputs,
                                 std::vector<std::string> outputs, std::uint64_t seed = 0) {
  RunManifest m;
  m.subcommand = std::move(subcommand);
  m.config = std::move(config);
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.seed = seed;
  m.timestamp = utc_timestamp();
  return m;
}

inline std::vector<std::string> present(std::initializer_list<std::string> paths) {
  std::vector<std::string> out;
  for (const auto& p : paths) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

inline void print_fit(std::ostream& out, const PeakFit& fit, bool ple) {
  const auto& se = fit.result.standard_errors;
  out << format("%s fit: %s after %d iterations, |r| = %.6g\n", std::string(to_string(fit.model.kind)).c_str(),
                to_string(fit.result.status), fit.result.iterations, fit.result.residual_norm);
  if (!fit.result.diagnostic.empty()) out << "  " << fit.result.diagnostic << '\n';
  for (std::size_t k = 0; k < fit.model.peaks.size(); ++k) {
    const auto& p = fit.model.peaks[k];
    const double sc = se.size() > 3 * k ? se[3 * k] : 0.0;
    const double sw = se.size() > 3 * k + 1 ? se[3 * k + 1] : 0.0;
    const double sa = se.size() > 3 * k + 2 ? se[3 * k + 2] : 0.0;
    if (ple) {
      out << format("  peak %zu: center %+.6f +- %.6f GHz, fwhm %.3f +- %.3f MHz, amplitude %.4g +- %.2g\n", k + 1,
                    p.center, sc, p.fwhm * 1e3, sw * 1e3, p.amplitude, sa);
    } else {
      out << format("  peak %zu: center %+.4f +- %.4f GHz, fwhm %.4f +- %.4f GHz, amplitude %.4g +- %.2g\n", k + 1,
                    p.center, sc, p.fwhm, sw, p.amplitude, sa);
    }
  }
  if (fit.model.has_baseline) out << format("  baseline %.4g\n", fit.model.baseline);
}

}  // namespace detail

inline int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectroscopy toolkit for group-IV color centers in diamond", "groupiv"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(toolkit_version));

  std::function<int()> action;

  // ---------------------------------------------------------------- simulate
  struct {
    std::string config, emitters, spectrum, histogram;
    std::optional<std::uint64_t> seed;
    std::optional<int> count;
    std::optional<double> selectivity, bin_width;
    bool no_noise = false;
  } sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate an emitter ensemble, its PLE scan and histogram");
  simulate->add_option("--config", sim.config, "TOML ensemble config")->check(CLI::ExistingFile);
  simulate->add_option("--seed", sim.seed, "RNG seed (overrides config and $GROUPIV_SPECTRA_SEED)");
  simulate->add_option("--count", sim.count, "number of emitters");
  simulate->add_option("--selectivity", sim.selectivity, "fraction forced to the selected isotope");
  simulate->add_option("--bin-width", sim.bin_width, "histogram bin width (GHz)");
  simulate->add_flag("--no-noise", sim.no_noise, "disable Poisson shot noise");
  simulate->add_option("--emitters", sim.emitters, "emitter list output (.csv)");
  simulate->add_option("--spectrum", sim.spectrum, "PLE scan output (.csv or .svg)");
  simulate->add_option("--histogram", sim.histogram, "resonance histogram output (.csv or .svg)");
  simulate->callback([&] {
    action = [&]() -> int {
      config::SimulationConfig cfg;
      bool config_has_seed = false;
      if (!sim.config.empty()) {
        auto in = csv::open_input(sim.config);
        const auto doc = toml::parse(in, sim.config);
        config_has_seed = doc.contains("rng_seed");
        cfg = config::from_json(doc, sim.config);
      }
      auto& e = cfg.ensemble;
      if (sim.count) e.emitter_count = *sim.count;
      if (sim.selectivity) e.selectivity = *sim.selectivity;
      if (sim.bin_width) cfg.histogram.bin_width_ghz = *sim.bin_width;
      if (sim.no_noise) e.scan.shot_noise = false;
      if (sim.seed) {
        e.rng_seed = *sim.seed;
      } else if (!config_has_seed) {
        e.rng_seed = detail::env_seed().value_or(0);
      }
      e.validate();

      const auto emitters = sample_emitters(e);
      const auto spectrum = synthesize_ple_scan(emitters, e.reference_thz, e.scan, e.rng_seed);
      const auto centers = center_offsets(emitters);
      const auto histogram =
          build_histogram(centers, cfg.histogram.bin_width_ghz, cfg.histogram.low_ghz, cfg.histogram.high_ghz);

      const auto manifest =
          detail::make_manifest("simulate", config::to_json(cfg), detail::present({sim.config}),
                                detail::present({sim.emitters, sim.spectrum, sim.histogram}), e.rng_seed);
      const std::vector<std::string> comments{manifest.comment()};

      if (!sim.emitters.empty()) {
        detail::write_file(sim.emitters, [&](std::ostream& o) { io::write_emitters_csv(o, emitters, comments); });
      }
      if (!sim.spectrum.empty()) {
        detail::write_file(sim.spectrum, [&](std::ostream& o) {
          if (detail::is_svg(sim.spectrum)) {
            svg::write(o, {"Simulated PLE scan", "Detuning from reference (GHz)", "Counts",
                           {svg::spectrum_series(spectrum)}, manifest.comment()});
          } else {
            io::write_spectrum_csv(o, spectrum, comments);
          }
        });
      }
      if (!sim.histogram.empty()) {
        detail::write_file(sim.histogram, [&](std::ostream& o) {
          if (detail::is_svg(sim.histogram)) {
            svg::write(o, {"Resonance histogram", "Detuning from reference (GHz)", "Emitters",
                           {svg::histogram_series(histogram)}, manifest.comment()});
          } else {
            io::write_histogram_csv(o, histogram, comments);
          }
        });
      }

      std::map<int, int> per_isotope;
      for (const auto& em : emitters) ++per_isotope[em.isotope.mass_number];
      out << detail::format("simulated %zu emitters (seed %llu)\n", emitters.size(),
                            static_cast<unsigned long long>(e.rng_seed));
      for (const auto& [mass, n] : per_isotope) out << detail::format("  %dSn: %d\n", mass, n);
      out << detail::format("histogram: %lld of %zu centers in range\n", static_cast<long long>(histogram.total()),
                            emitters.size());
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- fit-ple / fit-hist
  struct FitArgs {
    std::string input, out, svg, kind, weighting;
    std::optional<std::size_t> peaks;
    std::optional<double> min_height;
    bool baseline = false;
    bool no_baseline = false;
  };
  FitArgs ple, hist;
  ple.kind = "lorentzian";
  hist.kind = "gaussian";
  ple.weighting = hist.weighting = "poisson";

  auto run_fit = [&](const FitArgs& a, bool is_ple, const std::string& name) -> int {
    PeakFitOptions options;
    options.weighting = detail::parse_weighting(a.weighting);
    if (a.min_height) options.min_height = *a.min_height;
    const LineKind kind = detail::parse_kind(a.kind);
    std::vector<double> x, y;
    if (is_ple) {
      const auto s = io::parse_scan_csv(a.input);
      x = s.offsets_ghz;
      y = s.counts;
    } else {
      const auto h = io::parse_histogram_csv(a.input);
      x = h.bin_centers();
      y.assign(h.counts.begin(), h.counts.end());
    }
    const bool with_baseline = is_ple ? !a.no_baseline : a.baseline;
    std::size_t count = a.peaks.value_or(0);
    if (count == 0) {
      count = auto_initialize(x, y, options.min_height).size();
      if (count == 0) throw DomainError("no peaks detected in '" + a.input + "'");
    }
    const auto fit = fit_peaks(x, y, kind, count, with_baseline, options);

    nlohmann::json cfg{{"kind", a.kind}, {"peaks", count}, {"baseline", with_baseline}, {"weighting", a.weighting}};
    const auto manifest = detail::make_manifest(name, cfg, {a.input}, detail::present({a.out, a.svg}));
    if (!a.out.empty()) {
      detail::write_file(a.out, [&](std::ostream& o) { o << fit_report(fit, is_ple, &manifest).dump(2) << '\n'; });
    }
    if (!a.svg.empty() && !x.empty()) {
      detail::write_file(a.svg, [&](std::ostream& o) {
        svg::Plot plot{is_ple ? "PLE fit" : "Histogram fit", "Detuning from reference (GHz)",
                       is_ple ? "Counts" : "Emitters", {}, manifest.comment()};
        if (is_ple) {
          plot.series.push_back({x, y, "#1f4e9c", "data", false});
        } else {
          const auto h = io::parse_histogram_csv(a.input);
          plot.series.push_back(svg::histogram_series(h, "data"));
        }
        plot.series.push_back(svg::curve_series([&](double f) { return fit.model.evaluate(f); }, x.front(),
                                                x.back(), 2000, "#c0392b", "fit"));
        svg::write(o, plot);
      });
    }
    detail::print_fit(out, fit, is_ple);
    return fit.result.converged ? exit_ok : exit_numeric_failure;
  };

  auto add_fit_options = [](CLI::App* sub, FitArgs& a, bool is_ple) {
    sub->add_option("--input", a.input, is_ple ? "scan CSV (frequency_offset_ghz,counts)"
                                               : "histogram CSV (bin_low_ghz,bin_high_ghz,count)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--peaks", a.peaks, is_ple ? "number of peaks (default: all detected maxima)"
                                               : "number of peaks (default: 3, one per isotope group)");
    sub->add_option("--kind", a.kind, "lorentzian or gaussian")->capture_default_str();
    sub->add_option("--weighting", a.weighting, "uniform or poisson")->capture_default_str();
    sub->add_option("--min-height", a.min_height, "auto-detection threshold above baseline");
    if (is_ple) {
      sub->add_flag("--no-baseline", a.no_baseline, "fit without a constant baseline");
    } else {
      sub->add_flag("--baseline", a.baseline, "fit a constant baseline");
    }
    sub->add_option("--out", a.out, "JSON fit report");
    sub->add_option("--svg", a.svg, "SVG plot with the fitted curve");
  };

  auto* fit_ple = app.add_subcommand("fit-ple", "Fit a multi-Lorentzian model to a PLE scan");
  add_fit_options(fit_ple, ple, true);
  fit_ple->callback([&] { action = [&] { return run_fit(ple, true, "fit-ple"); }; });

  auto* fit_hist = app.add_subcommand("fit-hist", "Fit a multi-Gaussian model to a resonance histogram");
  add_fit_options(fit_hist, hist, false);
  hist.peaks = 3;
  fit_hist->callback([&] { action = [&] { return run_fit(hist, false, "fit-hist"); }; });

  // ---------------------------------------------------------------- extract
  struct {
    std::string input, out;
    double threshold = 0.0;
    std::optional<std::size_t> peaks;
  } ext;
  auto* extract = app.add_subcommand("extract", "Extract resonances from a PLE scan");
  extract->add_option("--input", ext.input, "scan CSV")->required()->check(CLI::ExistingFile);
  extract->add_option("--threshold", ext.threshold, "minimum peak height above baseline (counts)")->required();
  extract->add_option("--peaks", ext.peaks, "fit exactly this many peaks globally");
  extract->add_option("--out", ext.out, "resonance list (.csv or .json)");
  extract->callback([&] {
    action = [&]() -> int {
      const auto spectrum = io::parse_scan_csv(ext.input);
      const auto lines = extract_resonances(spectrum, ext.threshold, ext.peaks);
      nlohmann::json cfg{{"threshold", ext.threshold}};
      if (ext.peaks) cfg["peaks"] = *ext.peaks;
      const auto manifest = detail::make_manifest("extract", cfg, {ext.input}, detail::present({ext.out}));
      if (!ext.out.empty()) {
        detail::write_file(ext.out, [&](std::ostream& o) {
          if (detail::is_json(ext.out)) {
            nlohmann::json doc{{"manifest", manifest.to_json()}, {"resonances", nlohmann::json::array()}};
            for (const auto& r : lines) {
              doc["resonances"].push_back(
                  {{"center_ghz", r.center_ghz}, {"fwhm_mhz", r.fwhm_mhz}, {"amplitude_counts", r.amplitude}});
            }
            o << doc.dump(2) << '\n';
          } else {
            const std::vector<std::string> comments{manifest.comment()};
            io::write_resonances_csv(o, lines, comments);
          }
        });
      }
      out << detail::format("%zu resonances\n", lines.size());
      for (const auto& r : lines) {
        out << detail::format("  %+.6f GHz  fwhm %.2f MHz  amplitude %.4g\n", r.center_ghz, r.fwhm_mhz, r.amplitude);
      }
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- isotope-shift / vibfreq
  struct {
    std::string model = "builtin:snv-table1", isotopes = "builtin:sn";
    int from = 0, to = 0, mass = 119;
  } vib;
  auto* shift = app.add_subcommand("isotope-shift", "ZPL shift between two isotopes from force constants");
  shift->add_option("--model", vib.model, "builtin:snv-table1 or force-constant CSV")->capture_default_str();
  shift->add_option("--isotopes", vib.isotopes, "builtin:sn or isotope CSV")->capture_default_str();
  shift->add_option("--from", vib.from, "mass number n")->required();
  shift->add_option("--to", vib.to, "mass number n*")->required();
  shift->callback([&] {
    action = [&]() -> int {
      const auto table = config::load_isotope_table(vib.isotopes);
      const auto m_n = table.mass(vib.from);
      const auto m_star = table.mass(vib.to);
      const auto model = config::load_vibrational_model(vib.model, m_n);
      const double shift_ghz = isotope_shift(model, m_n, m_star);
      out << detail::format("E(%d) - E(%d) = %+.3f GHz\n", vib.from, vib.to, shift_ghz);
      out << detail::format("  masses %.6f u -> %.6f u; model is %s\n", m_n.atomic_mass_u, m_star.atomic_mass_u,
                            model.is_blue_shifting() ? "blue-shifting (lighter isotope higher in energy)"
                                                     : "not blue-shifting");
      return exit_ok;
    };
  });

  auto* vibfreq = app.add_subcommand("vibfreq", "Quasi-local mode energies from force constants");
  vibfreq->add_option("--model", vib.model, "builtin:snv-table1 or force-constant CSV")->capture_default_str();
  vibfreq->add_option("--isotopes", vib.isotopes, "builtin:sn or isotope CSV")->capture_default_str();
  vibfreq->add_option("--mass", vib.mass, "mass number")->capture_default_str();
  vibfreq->callback([&] {
    action = [&]() -> int {
      const auto table = config::load_isotope_table(vib.isotopes);
      const auto m = table.mass(vib.mass);
      const auto model = config::load_vibrational_model(vib.model, m);
      const bool builtin = vib.model == "builtin:snv-table1";
      const ReportedModeEnergies reported;
      out << detail::format("mode energies for mass %.6f u (meV)\n", m.atomic_mass_u);
      for (auto state : {ElectronicState::ground, ElectronicState::excited}) {
        for (auto mode : {VibrationalMode::a2u, VibrationalMode::eu}) {
          const double e = vibration_energy(model.constant(mode, state), m);
          out << detail::format("  %-3s %-7s %8.3f", mode == VibrationalMode::a2u ? "A2u" : "Eu",
                                state == ElectronicState::ground ? "ground" : "excited", e);
          if (builtin) {
            const double ref = reported.get(mode, state);
            const double rel = (e - ref) / ref;
            out << detail::format("   published %.1f (%+.2f%%)%s", ref, 100.0 * rel,
                                  std::abs(rel) > 0.02 ? "  <- discrepancy" : "");
          }
          out << '\n';
        }
      }
      out << detail::format("  zero-point sums: ground %.3f, excited %.3f\n",
                            zero_point_sum(model, m, ElectronicState::ground),
                            zero_point_sum(model, m, ElectronicState::excited));
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- shift-curve
  struct {
    double cal_mass = 28.0, cal_shift = 87.0;
    std::vector<double> masses{28.0, 72.0, 119.0};
    std::string out;
  } curve;
  auto* shift_curve = app.add_subcommand("shift-curve", "Unit-mass isotope shift scaling across elements");
  shift_curve->add_option("--calibration-mass", curve.cal_mass, "calibration mass (u)")->capture_default_str();
  shift_curve->add_option("--calibration-shift", curve.cal_shift, "calibration shift (GHz)")->capture_default_str();
  shift_curve->add_option("--masses", curve.masses, "ascending masses (u)")->delimiter(',')->capture_default_str();
  shift_curve->add_option("--out", curve.out, "curve output (.csv or .svg)");
  shift_curve->callback([&] {
    action = [&]() -> int {
      const auto points = unit_mass_shift_curve(curve.masses, {curve.cal_mass, curve.cal_shift});
      if (!curve.out.empty()) {
        const auto manifest = detail::make_manifest(
            "shift-curve", {{"calibration_mass_u", curve.cal_mass}, {"calibration_shift_ghz", curve.cal_shift}}, {},
            {curve.out});
        detail::write_file(curve.out, [&](std::ostream& o) {
          if (detail::is_svg(curve.out)) {
            svg::Series s{{}, {}, "#1f4e9c", "C (1/sqrt(m) - 1/sqrt(m+1))", false};
            for (const auto& p : points) s.x.push_back(p.mass_u), s.y.push_back(p.shift_ghz);
            svg::write(o, {"Isotope shift per unit mass", "Mass (u)", "Shift (GHz)", {s}, manifest.comment()});
          } else {
            o << "# " << manifest.comment() << "\nmass_u,shift_ghz\n";
            for (const auto& p : points) {
              o << csv::format_number(p.mass_u) << ',' << csv::format_number(p.shift_ghz) << '\n';
            }
          }
        });
      }
      out << detail::format("calibrated at m = %.3f u, shift = %.3f GHz\n", curve.cal_mass, curve.cal_shift);
      for (const auto& p : points) out << detail::format("  m = %8.3f u  shift = %8.3f GHz\n", p.mass_u, p.shift_ghz);
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- overlap-prob
  struct {
    double fwhm = 3.9, window = 30.0;
    bool half = false;
    std::int64_t trials = 0;
    std::optional<std::uint64_t> seed;
  } prob;
  auto* overlap = app.add_subcommand("overlap-prob", "Probability that two emitters coincide spectrally");
  overlap->add_option("--fwhm", prob.fwhm, "inhomogeneous FWHM (GHz)")->capture_default_str();
  overlap->add_option("--window", prob.window, "coincidence window (MHz)")->capture_default_str();
  overlap->add_flag("--half-window", prob.half, "count |df| <= window/2 instead of |df| <= window");
  overlap->add_option("--trials", prob.trials, "Monte Carlo trials (0 = analytic only)");
  overlap->add_option("--seed", prob.seed, "Monte Carlo seed");
  overlap->callback([&] {
    action = [&]() -> int {
      const auto mode = prob.half ? CoincidenceWindow::half : CoincidenceWindow::full;
      const double p = coincidence_probability_analytic(prob.fwhm, prob.window, mode);
      out << detail::format("analytic: %.4f%%\n", 100.0 * p);
      if (prob.trials > 0) {
        const auto seed = prob.seed ? *prob.seed : detail::env_seed().value_or(0);
        const auto mc = coincidence_probability_mc(prob.fwhm, prob.window, prob.trials, seed, mode);
        out << detail::format("monte carlo: %.4f%% +- %.4f%% (%lld trials, seed %llu)\n", 100.0 * mc.probability,
                              100.0 * mc.standard_error, static_cast<long long>(mc.trials),
                              static_cast<unsigned long long>(seed));
      }
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- pairs
  struct {
    std::string input, out;
    double max_detuning = 30.0;
  } pairs;
  auto* pair_cmd = app.add_subcommand("pairs", "Find spectrally identical emitter pairs");
  pair_cmd->add_option("--input", pairs.input, "resonance or emitter CSV")->required()->check(CLI::ExistingFile);
  pair_cmd->add_option("--max-detuning", pairs.max_detuning, "maximum detuning (MHz)")->capture_default_str();
  pair_cmd->add_option("--out", pairs.out, "pair report (.jsonl)");
  pair_cmd->callback([&] {
    action = [&]() -> int {
      auto in = csv::open_input(pairs.input);
      const auto lines = io::parse_line_features(in, pairs.input);
      const auto found = find_identical_pairs(lines, pairs.max_detuning);
      if (!pairs.out.empty()) {
        detail::write_file(pairs.out, [&](std::ostream& o) { write_pairs_jsonl(o, found); });
        const auto manifest = detail::make_manifest("pairs", {{"max_detuning_mhz", pairs.max_detuning}},
                                                    {pairs.input}, {pairs.out});
        detail::write_file(pairs.out + ".manifest.json",
                           [&](std::ostream& o) { o << manifest.to_json().dump(2) << '\n'; });
      }
      out << detail::format("%zu pairs within %.3g MHz\n", found.size(), pairs.max_detuning);
      for (const auto& p : found) {
        out << detail::format("  (%zu, %zu) detuning %.3f MHz  widths %.2f / %.2f MHz  overlap %.4f\n", p.i, p.j,
                              p.detuning_mhz, p.width_i_mhz, p.width_j_mhz, p.overlap);
      }
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- depth
  struct {
    double na = 0.95, n_outside = 1.0, n_inside = 2.4, observed = 0.0;
  } depth;
  auto* depth_cmd = app.add_subcommand("depth", "Correct a confocal depth for refractive-index mismatch");
  depth_cmd->add_option("--na", depth.na, "objective numerical aperture")->capture_default_str();
  depth_cmd->add_option("--n-outside", depth.n_outside, "refractive index above the surface")->capture_default_str();
  depth_cmd->add_option("--n-inside", depth.n_inside, "refractive index of the sample")->capture_default_str();
  depth_cmd->add_option("--observed", depth.observed, "observed (stage) depth in um")->required();
  depth_cmd->callback([&] {
    action = [&]() -> int {
      const auto r = depth_correction(depth.na, depth.n_outside, depth.n_inside, depth.observed);
      out << detail::format("correction factor D/d = %.2f\n", r.factor);
      out << detail::format("actual depth = %.1f um (observed %.3g um, factor %.6f)\n", r.actual_depth_um,
                            depth.observed, r.factor);
      return exit_ok;
    };
  });

  // ---------------------------------------------------------------- pl-spectrum
  struct {
    LevelStructure levels = snv_levels();
    double temperature = 6.0, fwhm = 20.0, from = -1200.0, to = 3500.0, step = 1.0, branching = 1.0;
    std::string out;
  } pl;
  auto* pl_cmd = app.add_subcommand("pl-spectrum", "ZPL photoluminescence spectrum of the four A-D lines");
  pl_cmd->add_option("--zpl", pl.levels.zpl_center_thz, "C-line frequency (THz)")->capture_default_str();
  pl_cmd->add_option("--gs", pl.levels.gs_splitting_ghz, "ground-state splitting (GHz)")->capture_default_str();
  auto* es_flag = pl_cmd->add_option("--es", pl.levels.es_splitting_ghz,
                                     "excited-state splitting (GHz), literature default")
                       ->capture_default_str();
  pl_cmd->add_option("--temperature", pl.temperature, "temperature (K)")->capture_default_str();
  pl_cmd->add_option("--fwhm", pl.fwhm, "per-line FWHM (GHz)")->capture_default_str();
  pl_cmd->add_option("--from", pl.from, "grid start, offset from C (GHz)")->capture_default_str();
  pl_cmd->add_option("--to", pl.to, "grid end, offset from C (GHz)")->capture_default_str();
  pl_cmd->add_option("--step", pl.step, "grid step (GHz)")->capture_default_str();
  pl_cmd->add_option("--branching", pl.branching, "D:C and B:A intensity ratio")->capture_default_str();
  pl_cmd->add_option("--out", pl.out, "spectrum output (.csv or .svg)");
  pl_cmd->callback([&] {
    action = [&]() -> int {
      if (!(pl.step > 0.0) || !(pl.to > pl.from)) throw DomainError("pl-spectrum: need --step > 0 and --to > --from");
      const auto n = static_cast<std::size_t>(std::floor((pl.to - pl.from) / pl.step + 1e-9)) + 1;
      std::vector<double> axis(n);
      for (std::size_t i = 0; i < n; ++i) axis[i] = pl.from + static_cast<double>(i) * pl.step;
      const auto spectrum = pl_spectrum(pl.levels, pl.temperature, pl.fwhm, axis, {pl.branching, 1.0});
      const auto lines = transition_frequencies(pl.levels);
      const double upper = thermal_population(pl.levels.es_splitting_ghz, pl.temperature);
      if (!pl.out.empty()) {
        const auto manifest = detail::make_manifest(
            "pl-spectrum",
            {{"zpl_thz", pl.levels.zpl_center_thz}, {"gs_ghz", pl.levels.gs_splitting_ghz},
             {"es_ghz", pl.levels.es_splitting_ghz}, {"temperature_k", pl.temperature}, {"fwhm_ghz", pl.fwhm},
             {"branching", pl.branching}},
            {}, {pl.out});
        detail::write_file(pl.out, [&](std::ostream& o) {
          if (detail::is_svg(pl.out)) {
            svg::write(o, {"ZPL photoluminescence", "Offset from C line (GHz)", "Intensity (arb.)",
                           {svg::spectrum_series(spectrum, "PL")}, manifest.comment()});
          } else {
            const std::vector<std::string> comments{manifest.comment()};
            io::write_spectrum_csv(o, spectrum, comments);
          }
        });
      }
      for (auto t : {Transition::a, Transition::b, Transition::c, Transition::d}) {
        out << detail::format("  %s: %.6f THz (%+.1f GHz)\n", std::string(to_string(t)).c_str(), lines.absolute_thz(t),
                              lines.offset_ghz(t));
      }
      out << detail::format("excited-state splitting: %.1f GHz%s\n", pl.levels.es_splitting_ghz,
                            es_flag->count() ? "" : " (literature default, set with --es)");
      out << detail::format("upper excited-level population at %.3g K: %.3e\n", pl.temperature, upper);
      out << detail::format("A/B to C/D peak ratio: %.3e\n", upper / (1.0 - upper));
      return exit_ok;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::CallForVersion& e) {
    out << toolkit_version << '\n';
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return exit_user_error;
  }

  try {
    return action ? action() : exit_user_error;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
  }
  return exit_user_error;
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace groupiv::cli
