#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace coalgene {

/// Gene frequency spectrum of a sample: counts[k-1] genes are carried by
/// exactly k of the n individuals.
struct SpectrumCounts {
  int sample_size = 0;
  std::vector<std::uint64_t> counts;

  SpectrumCounts() = default;
  explicit SpectrumCounts(int n)
      : sample_size(n), counts(static_cast<std::size_t>(n), 0) {
    if (n < 1) throw std::invalid_argument("SpectrumCounts: sample size must be >= 1");
  }

  std::uint64_t at(int k) const {
    if (k < 1 || k > sample_size) {
      throw std::invalid_argument("SpectrumCounts::at: class out of range");
    }
    return counts[static_cast<std::size_t>(k) - 1];
  }

  std::uint64_t total_genes() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
  }

  bool operator==(const SpectrumCounts&) const = default;
};

}  // namespace coalgene
