#pragma once

// CSV formats for spectra, histograms, emitter lists and resonance lists.

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "groupiv/analysis.hpp"
#include "groupiv/csv.hpp"
#include "groupiv/ensemble.hpp"
#include "groupiv/peaks.hpp"
#include "groupiv/spectrum.hpp"

namespace groupiv::io {

inline constexpr const char* scan_header = "frequency_offset_ghz,counts";
inline constexpr const char* histogram_header = "bin_low_ghz,bin_high_ghz,count";
inline constexpr const char* emitter_header = "isotope,center_offset_ghz,fwhm_mhz,brightness,x_um,y_um,z_um";
inline constexpr const char* resonance_header = "center_ghz,fwhm_mhz,amplitude";

namespace detail {

inline void write_comments(std::ostream& out, std::span<const std::string> comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
}

}  // namespace detail

/// `comments` are emitted as leading '#' lines (used for the run manifest).
inline void write_spectrum_csv(std::ostream& out, const Spectrum& s, std::span<const std::string> comments = {}) {
  detail::write_comments(out, comments);
  if (s.reference_thz) out << "# reference_thz=" << csv::format_number(*s.reference_thz) << '\n';
  out << scan_header << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << csv::format_number(s.offsets_ghz[i]) << ',' << csv::format_number(s.counts[i]) << '\n';
  }
}

/// Reads a scan. The axis must be strictly ascending; an unsorted file is rejected.
inline Spectrum parse_scan_csv(std::istream& in, const std::string& source) {
  Spectrum s;
  csv::Reader reader(in, source, scan_header);
  reader.on_comment = [&](std::size_t line, std::string_view text) {
    constexpr std::string_view key = "reference_thz=";
    if (text.substr(0, key.size()) != key) return;
    auto value = csv::parse_double(text.substr(key.size()));
    if (!value) throw ParseError(source, line, "invalid reference_thz value");
    s.reference_thz = *value;
  };
  csv::Row row;
  while (reader.next(row)) {
    reader.expect_columns(row, 2);
    const double x = reader.number(row, 0);
    const double y = reader.number(row, 1);
    if (!s.offsets_ghz.empty() && !(x > s.offsets_ghz.back())) {
      reader.fail(row.line, "frequency axis is not strictly ascending");
    }
    s.offsets_ghz.push_back(x);
    s.counts.push_back(y);
  }
  return s;
}

inline Spectrum parse_scan_csv(const std::string& path) {
  auto in = csv::open_input(path);
  return parse_scan_csv(in, path);
}

inline void write_histogram_csv(std::ostream& out, const HistogramData& h,
                                std::span<const std::string> comments = {}) {
  detail::write_comments(out, comments);
  out << histogram_header << '\n';
  for (std::size_t i = 0; i < h.bins(); ++i) {
    out << csv::format_number(h.bin_edges[i]) << ',' << csv::format_number(h.bin_edges[i + 1]) << ','
        << h.counts[i] << '\n';
  }
}

/// Bins must be contiguous: each bin starts where the previous one ends.
inline HistogramData parse_histogram_csv(std::istream& in, const std::string& source) {
  HistogramData h;
  csv::Reader reader(in, source, histogram_header);
  csv::Row row;
  while (reader.next(row)) {
    reader.expect_columns(row, 3);
    const double lo = reader.number(row, 0);
    const double hi = reader.number(row, 1);
    const auto count = reader.integer(row, 2);
    if (!(hi > lo)) reader.fail(row.line, "bin upper edge must exceed lower edge");
    if (count < 0) reader.fail(row.line, "negative count");
    if (h.bin_edges.empty()) {
      h.bin_edges.push_back(lo);
    } else if (lo != h.bin_edges.back()) {
      reader.fail(row.line, "bins are not contiguous");
    }
    h.bin_edges.push_back(hi);
    h.counts.push_back(count);
  }
  return h;
}

inline HistogramData parse_histogram_csv(const std::string& path) {
  auto in = csv::open_input(path);
  return parse_histogram_csv(in, path);
}

inline void write_emitters_csv(std::ostream& out, std::span<const Emitter> emitters,
                               std::span<const std::string> comments = {}) {
  detail::write_comments(out, comments);
  out << emitter_header << '\n';
  for (const auto& e : emitters) {
    out << e.isotope.mass_number << ',' << csv::format_number(e.center_offset_ghz) << ','
        << csv::format_number(e.homogeneous_fwhm_mhz) << ',' << csv::format_number(e.brightness) << ','
        << csv::format_number(e.position.x_um) << ',' << csv::format_number(e.position.y_um) << ','
        << csv::format_number(e.position.z_um) << '\n';
  }
}

/// Isotope masses are resolved through `isotopes`.
inline std::vector<Emitter> parse_emitters_csv(std::istream& in, const std::string& source,
                                               const IsotopeTable& isotopes) {
  std::vector<Emitter> out;
  csv::Reader reader(in, source, emitter_header);
  csv::Row row;
  while (reader.next(row)) {
    reader.expect_columns(row, 7);
    Emitter e;
    const auto number = static_cast<int>(reader.integer(row, 0));
    auto entry = isotopes.find(number);
    if (!entry) reader.fail(row.line, "unknown isotope " + std::to_string(number));
    e.isotope = entry->mass;
    e.center_offset_ghz = reader.number(row, 1);
    e.homogeneous_fwhm_mhz = reader.number(row, 2);
    e.brightness = reader.number(row, 3);
    e.position = {reader.number(row, 4), reader.number(row, 5), reader.number(row, 6)};
    if (!(e.homogeneous_fwhm_mhz > 0.0)) reader.fail(row.line, "fwhm must be positive");
    if (e.brightness < 0.0) reader.fail(row.line, "brightness must be >= 0");
    out.push_back(e);
  }
  return out;
}

inline void write_resonances_csv(std::ostream& out, std::span<const Resonance> lines,
                                 std::span<const std::string> comments = {}) {
  detail::write_comments(out, comments);
  out << resonance_header << '\n';
  for (const auto& r : lines) {
    out << csv::format_number(r.center_ghz) << ',' << csv::format_number(r.fwhm_mhz) << ','
        << csv::format_number(r.amplitude) << '\n';
  }
}

/// Accepts either a resonance list or an emitter list and returns (center, width) features.
inline std::vector<LineFeature> parse_line_features(std::istream& in, const std::string& source) {
  std::string first_data_line;
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  std::istringstream scan(text);
  std::string line;
  while (std::getline(scan, line)) {
    auto t = csv::trim(line);
    if (t.empty() || t.front() == '#') continue;
    first_data_line = std::string(t);
    break;
  }
  std::istringstream body(text);
  std::vector<LineFeature> out;
  csv::Row row;
  if (first_data_line.rfind("isotope,", 0) == 0) {
    csv::Reader reader(body, source, emitter_header);
    while (reader.next(row)) {
      reader.expect_columns(row, 7);
      out.push_back({reader.number(row, 1), reader.number(row, 2)});
    }
  } else {
    csv::Reader reader(body, source, resonance_header);
    while (reader.next(row)) {
      reader.expect_columns(row, 3);
      out.push_back({reader.number(row, 0), reader.number(row, 1)});
    }
  }
  for (const auto& f : out) {
    if (!(f.fwhm_mhz > 0.0)) throw ParseError(source + ": line widths must be positive");
  }
  return out;
}

}  // namespace groupiv::io
