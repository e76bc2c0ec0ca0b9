#include "coalgene/stats.hpp"

#include <bit>
#include <stdexcept>

namespace coalgene {

namespace {

void require_index(const PresenceMatrix& m, int i) {
  if (i < 0 || i >= m.sample_size()) {
    throw std::invalid_argument("individual index out of range");
  }
}

std::uint64_t popcount_words(std::span<const std::uint64_t> words) {
  std::uint64_t c = 0;
  for (std::uint64_t w : words) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

}  // namespace

double average_gene_number(const PresenceMatrix& m) {
  std::uint64_t total = 0;
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    total += static_cast<std::uint64_t>(m.carrier_count(g));
  }
  return static_cast<double>(total) / m.sample_size();
}

double mean_pairwise_differences(const PresenceMatrix& m) {
  const int n = m.sample_size();
  if (n < 2) {
    throw std::invalid_argument("mean_pairwise_differences: need n >= 2");
  }
  std::uint64_t weighted = 0;
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    const auto k = static_cast<std::uint64_t>(m.carrier_count(g));
    weighted += k * (static_cast<std::uint64_t>(n) - k);
  }
  return static_cast<double>(weighted) /
         (static_cast<double>(n) * static_cast<double>(n - 1));
}

std::uint64_t gene_count_of(const PresenceMatrix& m, int individual) {
  require_index(m, individual);
  std::uint64_t count = 0;
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    count += m.carried(g, individual) ? 1 : 0;
  }
  return count;
}

std::uint64_t one_sided_difference(const PresenceMatrix& m, int i, int j) {
  require_index(m, i);
  require_index(m, j);
  if (i == j) {
    throw std::invalid_argument("one_sided_difference: indices must differ");
  }
  std::uint64_t count = 0;
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    count += (m.carried(g, i) && !m.carried(g, j)) ? 1 : 0;
  }
  return count;
}

std::uint64_t quadruple_difference(const PresenceMatrix& m, int i, int j, int k, int l) {
  const int idx[4] = {i, j, k, l};
  for (int a = 0; a < 4; ++a) {
    require_index(m, idx[a]);
    for (int b = a + 1; b < 4; ++b) {
      if (idx[a] == idx[b]) {
        throw std::invalid_argument("quadruple_difference: indices must be distinct");
      }
    }
  }
  std::uint64_t count = 0;
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    count += (m.carried(g, i) && m.carried(g, j) && !m.carried(g, k) &&
              !m.carried(g, l))
                 ? 1
                 : 0;
  }
  return count;
}

std::uint64_t incongruence_numerator(const PresenceMatrix& m) {
  if (m.sample_size() < 4) {
    throw std::invalid_argument("incongruence_statistic: need n >= 4");
  }
  const std::size_t genes = m.gene_count();
  const auto n = static_cast<std::uint64_t>(m.sample_size());
  std::uint64_t sum = 0;
  for (std::size_t u = 0; u < genes; ++u) {
    const auto wu = m.carrier_words(u);
    const auto cu = popcount_words(wu);
    for (std::size_t v = u + 1; v < genes; ++v) {
      const auto wv = m.carrier_words(v);
      std::uint64_t both = 0, only_v = 0;
      for (std::size_t w = 0; w < wu.size(); ++w) {
        both += static_cast<std::uint64_t>(std::popcount(wu[w] & wv[w]));
        only_v += static_cast<std::uint64_t>(std::popcount(~wu[w] & wv[w]));
      }
      const std::uint64_t only_u = cu - both;
      const std::uint64_t neither = n - both - only_u - only_v;
      // The ordered pair (v, u) contributes the same product.
      sum += 2 * both * only_u * only_v * neither;
    }
  }
  return sum;
}

double incongruence_statistic(const PresenceMatrix& m) {
  const double n = m.sample_size();
  return static_cast<double>(incongruence_numerator(m)) /
         (n * (n - 1) * (n - 2) * (n - 3));
}

std::uint64_t incongruence_bruteforce_numerator(const PresenceMatrix& m) {
  const int n = m.sample_size();
  if (n < 4) {
    throw std::invalid_argument("incongruence_bruteforce: need n >= 4");
  }
  std::uint64_t sum = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          if (i == j || i == k || i == l || j == k || j == l || k == l) continue;
          sum += quadruple_difference(m, i, j, k, l) *
                 quadruple_difference(m, i, k, j, l);
        }
  return sum;
}

double incongruence_bruteforce(const PresenceMatrix& m) {
  const double n = m.sample_size();
  return static_cast<double>(incongruence_bruteforce_numerator(m)) /
         (n * (n - 1) * (n - 2) * (n - 3));
}

SpectrumCounts gene_frequency_spectrum(const PresenceMatrix& m) {
  SpectrumCounts spectrum(m.sample_size());
  for (std::size_t g = 0; g < m.gene_count(); ++g) {
    ++spectrum.counts[static_cast<std::size_t>(m.carrier_count(g)) - 1];
  }
  return spectrum;
}

std::uint64_t pangenome_size(const PresenceMatrix& m) { return m.gene_count(); }

StatReport compute_stats(const PresenceMatrix& m) {
  StatReport report;
  report.sample_size = m.sample_size();
  report.average_genes = average_gene_number(m);
  if (m.sample_size() >= 2) {
    report.pairwise_differences = mean_pairwise_differences(m);
  }
  if (m.sample_size() >= 4) {
    report.incongruence = incongruence_statistic(m);
  }
  report.pangenome = pangenome_size(m);
  report.spectrum = gene_frequency_spectrum(m);
  return report;
}

StatReport with_core(const StatReport& report, std::uint64_t core_size) {
  StatReport out = report;
  out.average_genes += static_cast<double>(core_size);
  out.pangenome += core_size;
  out.spectrum.counts.back() += core_size;
  out.core_size = report.core_size + core_size;
  return out;
}

}  // namespace coalgene
