#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "groupiv/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = groupiv::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string payload(const fs::path& p) {
  std::ifstream in(p);
  std::string line, out;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') out += line + '\n';
  }
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("groupiv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ::unsetenv(groupiv::cli::seed_env_var);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, DepthExample) {
  const auto r = run({"depth", "--na", "0.95", "--n-outside", "1.0", "--n-inside", "2.4", "--observed", "1.2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("2.67"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("3.2 um"), std::string::npos) << r.out;
}

TEST_F(Cli, IsotopeShiftExample) {
  const auto r = run({"isotope-shift", "--model", "builtin:snv-table1", "--from", "119", "--to", "120"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("+2.490 GHz"), std::string::npos) << r.out;
}

TEST_F(Cli, VibfreqFlagsTheDiscrepantEntry) {
  const auto r = run({"vibfreq"});
  EXPECT_EQ(r.code, 0);
  std::istringstream lines(r.out);
  std::string line;
  int flagged = 0;
  while (std::getline(lines, line)) {
    if (line.find("discrepancy") != std::string::npos) {
      ++flagged;
      EXPECT_NE(line.find("A2u ground"), std::string::npos) << line;
    }
  }
  EXPECT_EQ(flagged, 1);
}

TEST_F(Cli, UserErrorsExitOne) {
  auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  r = run({"depth", "--observed", "1", "--bogus"});
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(r.err.empty());
  r = run({});
  EXPECT_EQ(r.code, 1);
  r = run({"depth", "--na", "5", "--observed", "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("0.5*NA"), std::string::npos) << r.err;
  r = run({"fit-ple", "--input", path("missing.csv")});
  EXPECT_EQ(r.code, 1);
  r = run({"isotope-shift", "--from", "119", "--to", "121"});
  EXPECT_EQ(r.code, 1);
}

TEST_F(Cli, HelpExitsZero) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("pl-spectrum"), std::string::npos);
}

TEST_F(Cli, MalformedCsvReportsLine) {
  {
    std::ofstream f(path("bad.csv"));
    f << "frequency_offset_ghz,counts\n0,1\nabc,1\n";
  }
  const auto r = run({"fit-ple", "--input", path("bad.csv")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.csv:3"), std::string::npos) << r.err;
}

TEST_F(Cli, SimulateWritesManifestAndIsDeterministic) {
  const std::vector<std::string> base{"simulate", "--seed", "7", "--count", "60"};
  auto args = base;
  args.insert(args.end(), {"--emitters", path("e1.csv"), "--spectrum", path("s1.csv"), "--histogram", path("h1.csv")});
  ASSERT_EQ(run(args).code, 0);
  args = base;
  args.insert(args.end(), {"--emitters", path("e2.csv"), "--spectrum", path("s2.csv"), "--histogram", path("h2.csv")});
  ASSERT_EQ(run(args).code, 0);
  for (const auto& [a, b] : {std::pair{"e1.csv", "e2.csv"}, {"s1.csv", "s2.csv"}, {"h1.csv", "h2.csv"}}) {
    const auto pa = payload(path(a));
    EXPECT_FALSE(pa.empty());
    EXPECT_EQ(pa, payload(path(b))) << a;
    const auto text = slurp(path(a));
    ASSERT_EQ(text.rfind("# manifest: ", 0), 0u);
    const auto manifest = nlohmann::json::parse(text.substr(12, text.find('\n') - 12));
    EXPECT_EQ(manifest["subcommand"], "simulate");
    EXPECT_EQ(manifest["seed"], 7);
    EXPECT_EQ(manifest["config"]["emitter_count"], 60);
    EXPECT_EQ(manifest["version"], groupiv::toolkit_version);
    EXPECT_TRUE(manifest.contains("timestamp"));
  }
  const auto spectrum = groupiv::io::parse_scan_csv(path("s1.csv"));
  ASSERT_TRUE(spectrum.reference_thz);
  EXPECT_EQ(*spectrum.reference_thz, 484.13);
}

TEST_F(Cli, SeedPrecedence) {
  {
    std::ofstream f(path("cfg.toml"));
    f << "emitter_count = 20\nrng_seed = 5\n[scan]\nrange_ghz = 1.0\n";
  }
  {
    std::ofstream f(path("noseed.toml"));
    f << "emitter_count = 20\n[scan]\nrange_ghz = 1.0\n";
  }
  auto seed_of = [&](std::vector<std::string> args) {
    args.insert(args.end(), {"--emitters", path("e.csv")});
    EXPECT_EQ(run(args).code, 0);
    const auto text = slurp(path("e.csv"));
    return nlohmann::json::parse(text.substr(12, text.find('\n') - 12))["seed"].get<std::uint64_t>();
  };
  EXPECT_EQ(seed_of({"simulate", "--config", path("cfg.toml")}), 5u);
  EXPECT_EQ(seed_of({"simulate", "--config", path("cfg.toml"), "--seed", "9"}), 9u);
  EXPECT_EQ(seed_of({"simulate", "--config", path("noseed.toml")}), 0u);
  ::setenv(groupiv::cli::seed_env_var, "31", 1);
  EXPECT_EQ(seed_of({"simulate", "--config", path("noseed.toml")}), 31u);
  EXPECT_EQ(seed_of({"simulate", "--config", path("cfg.toml")}), 5u);
  ::setenv(groupiv::cli::seed_env_var, "minus one", 1);
  EXPECT_EQ(run({"simulate", "--config", path("noseed.toml")}).code, 1);
  ::unsetenv(groupiv::cli::seed_env_var);
}

TEST_F(Cli, FlagsOverrideConfig) {
  {
    std::ofstream f(path("cfg.toml"));
    f << "emitter_count = 20\nselectivity = 1.0\n[scan]\nrange_ghz = 1.0\n";
  }
  ASSERT_EQ(run({"simulate", "--config", path("cfg.toml"), "--count", "33", "--emitters", path("e.csv")}).code, 0);
  std::ifstream in(path("e.csv"));
  const auto emitters = groupiv::io::parse_emitters_csv(in, "e.csv", groupiv::tin_isotopes());
  EXPECT_EQ(emitters.size(), 33u);
  for (const auto& e : emitters) EXPECT_EQ(e.isotope.mass_number, 120);
}

TEST_F(Cli, FitPleReportsJson) {
  using namespace groupiv;
  std::vector<Emitter> e(3);
  const double centers[] = {-0.4, 0.0, 0.4};
  for (int k = 0; k < 3; ++k) e[k] = {{120, 119.902202}, centers[k], 32.0, 100.0, {}};
  const auto s = synthesize_ple_scan(e, 484.13, {0.0, 1.6, 2.0, 0.0, true}, 3);
  {
    std::ofstream f(path("scan.csv"));
    io::write_spectrum_csv(f, s);
  }
  const auto r = run({"fit-ple", "--input", path("scan.csv"), "--peaks", "3", "--out", path("fit.json"), "--svg",
                      path("fit.svg")});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  const auto report = nlohmann::json::parse(slurp(path("fit.json")));
  EXPECT_TRUE(report["converged"].get<bool>());
  EXPECT_EQ(report["parameters"].size(), 3u);
  EXPECT_NEAR(report["parameters"][1]["fwhm_mhz"].get<double>(), 32.0, 4.0);
  EXPECT_EQ(report["manifest"]["subcommand"], "fit-ple");
  const auto svg = slurp(path("fit.svg"));
  EXPECT_NE(svg.find("<desc>manifest: "), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(Cli, NonConvergedFitExitsTwoWithPartialResults) {
  {
    std::ofstream f(path("h.csv"));
    f << "bin_low_ghz,bin_high_ghz,count\n";
    for (int i = 0; i < 40; ++i) f << i - 20 << ',' << i - 19 << ',' << (std::abs(i - 20) < 3 ? 10 - std::abs(i - 20) : 0) << '\n';
  }
  const auto r = run({"fit-hist", "--input", path("h.csv"), "--peaks", "3", "--out", path("fit.json")});
  EXPECT_EQ(r.code, 2);
  const auto report = nlohmann::json::parse(slurp(path("fit.json")));
  EXPECT_FALSE(report["converged"].get<bool>());
  EXPECT_EQ(report["status"], "not_attempted");
}

TEST_F(Cli, ExtractThenPairs) {
  using namespace groupiv;
  std::vector<Emitter> e(3);
  const double centers[] = {-0.3, 0.0, 0.004};
  const double widths[] = {33.0, 35.0, 38.0};
  for (int k = 0; k < 3; ++k) e[k] = {{120, 119.902202}, centers[k], widths[k], 100.0, {}};
  {
    std::ofstream f(path("emitters.csv"));
    io::write_emitters_csv(f, e);
  }
  auto r = run({"pairs", "--input", path("emitters.csv"), "--max-detuning", "30", "--out", path("pairs.jsonl")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(path("pairs.jsonl"));
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  const auto first = nlohmann::json::parse(line);
  EXPECT_EQ(first["i"], 1);
  EXPECT_EQ(first["j"], 2);
  EXPECT_NEAR(first["detuning_mhz"].get<double>(), 4.0, 1e-9);
  EXPECT_TRUE(fs::exists(path("pairs.jsonl.manifest.json")));

  const auto s = synthesize_ple_scan(e, 484.13, {0.0, 1.0, 1.0, 0.0, false}, 1);
  {
    std::ofstream f(path("scan.csv"));
    io::write_spectrum_csv(f, s);
  }
  r = run({"extract", "--input", path("scan.csv"), "--threshold", "20", "--out", path("res.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream res(path("res.csv"));
  const auto features = io::parse_line_features(res, "res.csv");
  EXPECT_EQ(features.size(), 2u);
}

TEST_F(Cli, SvgOutputsCarryManifest) {
  ASSERT_EQ(run({"simulate", "--seed", "1", "--count", "30", "--spectrum", path("s.svg"), "--histogram", path("h.svg")}).code, 0);
  ASSERT_EQ(run({"pl-spectrum", "--out", path("pl.svg")}).code, 0);
  ASSERT_EQ(run({"shift-curve", "--masses", "28,72,119", "--out", path("curve.svg")}).code, 0);
  for (const char* name : {"s.svg", "h.svg", "pl.svg", "curve.svg"}) {
    const auto svg = slurp(path(name));
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u) << name;
    EXPECT_NE(svg.find("<desc>manifest: "), std::string::npos) << name;
  }
}

TEST_F(Cli, OverlapProbability) {
  const auto r = run({"overlap-prob", "--fwhm", "3.9", "--window", "30", "--trials", "100000", "--seed", "4"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("analytic: 1.0219%"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("monte carlo"), std::string::npos);
  EXPECT_EQ(run({"overlap-prob", "--trials", "10"}).code, 1);
}
