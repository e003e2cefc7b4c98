#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace groupiv {

/// Sampled spectrum on a frequency axis stored as GHz offsets from a THz reference.
struct Spectrum {
  std::optional<double> reference_thz;
  std::vector<double> offsets_ghz;
  std::vector<double> counts;

  std::size_t size() const { return offsets_ghz.size(); }
  bool empty() const { return offsets_ghz.empty(); }
};

/// Histogram of resonance offsets (GHz). counts.size() == bin_edges.size() - 1.
struct HistogramData {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;

  std::size_t bins() const { return counts.size(); }

  std::vector<double> bin_centers() const {
    std::vector<double> centers;
    centers.reserve(counts.size());
    for (std::size_t i = 0; i + 1 < bin_edges.size(); ++i) {
      centers.push_back(0.5 * (bin_edges[i] + bin_edges[i + 1]));
    }
    return centers;
  }

  std::int64_t total() const {
    std::int64_t sum = 0;
    for (auto c : counts) sum += c;
    return sum;
  }
};

}  // namespace groupiv
