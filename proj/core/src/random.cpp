#include "coalgene/random.hpp"

#include <cmath>
#include <stdexcept>

namespace coalgene {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

Rng Rng::for_replicate(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(splitmix64(master_seed ^ splitmix64(index + 0x51ed2701)));
}

double Rng::exponential(double rate) {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("Rng::exponential: rate must be > 0");
  }
  return -std::log1p(-uniform01()) / rate;
}

std::uint64_t Rng::uniform_below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::uniform_below: n must be >= 1");
  }
  // Lemire's multiply-shift with rejection of the biased low range.
  unsigned __int128 m =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) {
    throw std::invalid_argument("Rng::poisson: mean must be >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean < 10.0) return poisson_inversion(mean);
  return poisson_transformed_rejection(mean);
}

std::uint64_t Rng::poisson_inversion(double mean) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double prod = uniform01();
  while (prod > limit) {
    ++k;
    prod *= uniform01();
  }
  return k;
}

// Hoermann's transformed rejection (PTRS); valid for mean >= 10.
std::uint64_t Rng::poisson_transformed_rejection(double mean) {
  const double log_mean = std::log(mean);
  const double b = 0.931 + 2.53 * std::sqrt(mean);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform01() - 0.5;
    const double v = uniform01();
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= v_r) {
      return static_cast<std::uint64_t>(kf);
    }
    if (kf < 0.0 || (us < 0.013 && v > us)) {
      continue;
    }
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
        kf * log_mean - mean - std::lgamma(kf + 1.0)) {
      return static_cast<std::uint64_t>(kf);
    }
  }
}

std::pair<int, int> Rng::uniform_pair(int k) {
  if (k < 2) {
    throw std::invalid_argument("Rng::uniform_pair: need k >= 2");
  }
  auto idx = uniform_below(static_cast<std::uint64_t>(k) * (k - 1) / 2);
  for (int i = 0; i < k - 1; ++i) {
    const std::uint64_t row = static_cast<std::uint64_t>(k - 1 - i);
    if (idx < row) {
      return {i, i + 1 + static_cast<int>(idx)};
    }
    idx -= row;
  }
  // Unreachable: the index is always consumed by some row.
  throw std::logic_error("Rng::uniform_pair: index out of range");
}

}  // namespace coalgene
