#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "groupiv/config.hpp"
#include "groupiv/io.hpp"
#include "groupiv/toml_lite.hpp"

using namespace groupiv;

namespace {

std::string write_spectrum(const Spectrum& s) {
  std::ostringstream out;
  io::write_spectrum_csv(out, s);
  return out.str();
}

Spectrum read_spectrum(const std::string& text) {
  std::istringstream in(text);
  return io::parse_scan_csv(in, "scan.csv");
}

std::size_t error_line(const std::string& text) {
  try {
    read_spectrum(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(ScanCsv, TwoRows) {
  const auto s = read_spectrum("# reference_thz=484.13\nfrequency_offset_ghz,counts\n-0.5,3\n0.5,7\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.offsets_ghz[1], 0.5);
  EXPECT_EQ(s.counts[0], 3.0);
  ASSERT_TRUE(s.reference_thz);
  EXPECT_EQ(*s.reference_thz, 484.13);
}

TEST(ScanCsv, HeaderOnlyIsEmpty) {
  const auto s = read_spectrum("frequency_offset_ghz,counts\n");
  EXPECT_TRUE(s.empty());
  EXPECT_FALSE(s.reference_thz);
}

TEST(ScanCsv, NonNumericCellNamesLine) {
  EXPECT_EQ(error_line("frequency_offset_ghz,counts\nabc,1\n"), 2u);
  try {
    read_spectrum("frequency_offset_ghz,counts\nabc,1\n");
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("scan.csv:2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos) << e.what();
  }
}

TEST(ScanCsv, RejectsMalformedFiles) {
  EXPECT_THROW(read_spectrum(""), ParseError);
  EXPECT_THROW(read_spectrum("freq,counts\n1,2\n"), ParseError);
  EXPECT_EQ(error_line("frequency_offset_ghz,counts\n1,2\n0.5,3\n"), 3u);
  EXPECT_EQ(error_line("frequency_offset_ghz,counts\n1,2\n1,3\n"), 3u);
  EXPECT_EQ(error_line("frequency_offset_ghz,counts\n1,2,3\n"), 2u);
  EXPECT_EQ(error_line("# note\n\nfrequency_offset_ghz,counts\n1\n"), 4u);
}

TEST(ScanCsv, WriteParseIsBitIdentical) {
  Spectrum s;
  s.reference_thz = 484.130;
  for (int i = 0; i < 500; ++i) {
    s.offsets_ghz.push_back(-18.5 + 0.01 * i);
    s.counts.push_back(1.0 / 3.0 * i + 1e-17 * i * i);
  }
  const auto text = write_spectrum(s);
  const auto back = read_spectrum(text);
  EXPECT_EQ(back.offsets_ghz, s.offsets_ghz);
  EXPECT_EQ(back.counts, s.counts);
  EXPECT_EQ(back.reference_thz, s.reference_thz);
  EXPECT_EQ(write_spectrum(back), text);
}

TEST(HistogramCsv, RoundTripAndContiguity) {
  const std::vector<double> centers{0.1, 0.2, 3.3, -4.0, 12.0};
  const auto h = build_histogram(centers, 0.7, -5.0, 10.0);
  std::ostringstream out;
  io::write_histogram_csv(out, h);
  std::istringstream in(out.str());
  const auto back = io::parse_histogram_csv(in, "h.csv");
  EXPECT_EQ(back.bin_edges, h.bin_edges);
  EXPECT_EQ(back.counts, h.counts);
  std::ostringstream again;
  io::write_histogram_csv(again, back);
  EXPECT_EQ(again.str(), out.str());

  std::istringstream gap("bin_low_ghz,bin_high_ghz,count\n0,1,2\n1.5,2,1\n");
  EXPECT_THROW(io::parse_histogram_csv(gap, "h.csv"), ParseError);
  std::istringstream negative("bin_low_ghz,bin_high_ghz,count\n0,1,-2\n");
  EXPECT_THROW(io::parse_histogram_csv(negative, "h.csv"), ParseError);
  std::istringstream fractional("bin_low_ghz,bin_high_ghz,count\n0,1,2.5\n");
  EXPECT_THROW(io::parse_histogram_csv(fractional, "h.csv"), ParseError);
}

TEST(EmitterCsv, RoundTrip) {
  auto cfg = snv_default_ensemble();
  cfg.emitter_count = 40;
  cfg.rng_seed = 3;
  cfg.position_box_um = {5.0, 5.0, 1.0};
  const auto emitters = sample_emitters(cfg);
  std::ostringstream out;
  io::write_emitters_csv(out, emitters);
  std::istringstream in(out.str());
  const auto back = io::parse_emitters_csv(in, "e.csv", tin_isotopes());
  ASSERT_EQ(back.size(), emitters.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].isotope.atomic_mass_u, emitters[i].isotope.atomic_mass_u);
    EXPECT_EQ(back[i].center_offset_ghz, emitters[i].center_offset_ghz);
    EXPECT_EQ(back[i].position.y_um, emitters[i].position.y_um);
  }
  std::istringstream features(out.str());
  const auto lines = io::parse_line_features(features, "e.csv");
  ASSERT_EQ(lines.size(), emitters.size());
  EXPECT_EQ(lines[5].center_ghz, emitters[5].center_offset_ghz);
}

TEST(ResonanceCsv, FeedsPairSearch) {
  const std::vector<Resonance> r{{0.0, 35.0, 100.0}, {0.004, 38.0, 90.0}};
  std::ostringstream out;
  const std::vector<std::string> comments{"made by a test"};
  io::write_resonances_csv(out, r, comments);
  EXPECT_EQ(out.str().rfind("# made by a test\n", 0), 0u);
  std::istringstream in(out.str());
  const auto lines = io::parse_line_features(in, "r.csv");
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1].fwhm_mhz, 38.0);
}

TEST(Toml, ParsesSupportedSubset) {
  const auto doc = toml::parse_string(R"(
# comment
emitter_count = 1_600   # trailing comment
name = "snv \"demo\""
literal = 'C:\path'
ratio = 0.5
exp = 1e-3
neg = -2
flag = true
list = [118, 119, 120,]
[scan]
step_mhz = 10.0
[group_offsets_ghz]
120 = 0.0
119 = 10.9
[a.b]
c.d = "deep"
)");
  EXPECT_EQ(doc["emitter_count"], 1600);
  EXPECT_EQ(doc["name"], "snv \"demo\"");
  EXPECT_EQ(doc["literal"], "C:\\path");
  EXPECT_EQ(doc["ratio"], 0.5);
  EXPECT_EQ(doc["exp"], 1e-3);
  EXPECT_EQ(doc["neg"], -2);
  EXPECT_EQ(doc["flag"], true);
  EXPECT_EQ(doc["list"].size(), 3u);
  EXPECT_EQ(doc["scan"]["step_mhz"], 10.0);
  EXPECT_EQ(doc["group_offsets_ghz"]["119"], 10.9);
  EXPECT_EQ(doc["a"]["b"]["c"]["d"], "deep");
  EXPECT_TRUE(doc["emitter_count"].is_number_integer());
}

TEST(Toml, ErrorsCarryLineNumbers) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      toml::parse_string(text, "cfg.toml");
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  EXPECT_EQ(line_of("a = 1\nb = \n"), 2u);
  EXPECT_EQ(line_of("a = 1\na = 2\n"), 2u);
  EXPECT_EQ(line_of("\n\nx = {y = 1}\n"), 3u);
  EXPECT_EQ(line_of("x = \"open\n"), 1u);
  EXPECT_EQ(line_of("[t\n"), 1u);
  EXPECT_EQ(line_of("x = 1 2\n"), 1u);
  EXPECT_EQ(line_of("x = 1\n[x]\n"), 2u);
}

TEST(Config, DefaultsAndOverrides) {
  const auto doc = toml::parse_string(R"(
emitter_count = 80
rng_seed = 12
selectivity = 0.25
[scan]
shot_noise = false
[histogram]
bin_width_ghz = 0.5
[group_inhom_fwhm_ghz]
118 = 6.0
119 = 3.9
120 = 3.9
)");
  const auto cfg = config::from_json(doc, "cfg.toml");
  EXPECT_EQ(cfg.ensemble.emitter_count, 80);
  EXPECT_EQ(cfg.ensemble.rng_seed, 12u);
  EXPECT_EQ(cfg.ensemble.selectivity, 0.25);
  EXPECT_FALSE(cfg.ensemble.scan.shot_noise);
  EXPECT_EQ(cfg.ensemble.scan.range_ghz, 47.0);
  EXPECT_EQ(cfg.histogram.bin_width_ghz, 0.5);
  EXPECT_EQ(cfg.ensemble.group_inhom_fwhm_ghz.at(118), 6.0);
  EXPECT_EQ(cfg.ensemble.group_offsets_ghz.at(119), 10.9);
  EXPECT_EQ(cfg.ensemble.isotope_table.entries.size(), 3u);

  const auto json = config::to_json(cfg);
  const auto again = config::from_json(json, "manifest");
  EXPECT_EQ(config::to_json(again), json);
}

TEST(Config, RejectsUnknownKeysAndBadTypes) {
  EXPECT_THROW(config::from_json(toml::parse_string("emiter_count = 5\n"), "c"), ParseError);
  EXPECT_THROW(config::from_json(toml::parse_string("[scan]\nstep = 5\n"), "c"), ParseError);
  EXPECT_THROW(config::from_json(toml::parse_string("emitter_count = 5.5\n"), "c"), ParseError);
  EXPECT_THROW(config::from_json(toml::parse_string("selectivity = 2.0\n"), "c"), DomainError);
  EXPECT_THROW(config::from_json(toml::parse_string("isotope_table = \"builtin:xx\"\n"), "c"), DomainError);
  EXPECT_THROW(config::from_json(toml::parse_string("[group_offsets_ghz]\nabc = 1.0\n"), "c"), ParseError);
}

TEST(Config, NamedDatasets) {
  EXPECT_EQ(config::load_isotope_table("builtin:sn").entries.size(), 10u);
  const auto m = config::load_vibrational_model("builtin:snv-table1", {120, 119.902202});
  EXPECT_EQ(m.reference_mass.mass_number, 120);
  EXPECT_THROW(config::load_isotope_table("/nonexistent/table.csv"), IoError);
  EXPECT_THROW(config::load_vibrational_model("builtin:nope", {120, 119.9}), DomainError);
}
