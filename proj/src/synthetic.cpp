#include "phida/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace phida {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SplitMix64::below(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("below: empty range");
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t r = next();
  while (r >= limit) r = next();
  return static_cast<std::size_t>(r % bound);
}

Dataset generate_blobs(const BlobSpec& spec) {
  const std::size_t k = spec.centers.size();
  if (k == 0 || spec.stds.size() != k || spec.counts.size() != k) throw std::invalid_argument("generate_blobs: bad spec");
  const std::size_t d = spec.centers.front().size();
  if (d == 0) throw std::invalid_argument("generate_blobs: zero dimension");
  SplitMix64 rng(spec.seed);
  Dataset out;
  out.name = "blobs";
  for (std::size_t b = 0; b < k; ++b) {
    if (spec.centers[b].size() != d) throw std::invalid_argument("generate_blobs: center dimension mismatch");
    if (!(spec.stds[b] > 0.0)) throw std::invalid_argument("generate_blobs: std must be positive");
    if (spec.counts[b] == 0) throw std::invalid_argument("generate_blobs: count must be positive");
    out.class_names.push_back(std::to_string(b));
    for (std::size_t i = 0; i < spec.counts[b]; ++i) {
      Vector x(d);
      for (std::size_t j = 0; j < d; ++j) x[j] = spec.centers[b][j] + spec.stds[b] * rng.normal();
      out.features.push_back(std::move(x));
      out.labels.push_back(static_cast<long>(b));
    }
  }
  return out;
}

Dataset generate_bridged_modes(std::size_t gap_support, std::size_t mode_support, std::uint64_t seed) {
  if (mode_support <= gap_support) throw std::invalid_argument("generate_bridged_modes: need mode_support > gap_support");
  SplitMix64 rng(seed);
  Dataset out;
  out.name = "bridged_modes";
  out.class_names = {"0", "1"};
  for (std::size_t m = 0; m < 2; ++m) {
    const double center = m == 0 ? 0.0 : kBridgedModeSeparation;
    for (std::size_t i = 0; i < mode_support; ++i) {
      out.features.push_back({center + rng.normal()});
      out.labels.push_back(static_cast<long>(m));
    }
  }
  if (gap_support > 0) out.class_names.push_back("2");
  const double step = kBridgedModeSeparation / static_cast<double>(gap_support + 1);
  for (std::size_t i = 0; i < gap_support; ++i) {
    const double jitter = 0.05 * step * (rng.uniform() - 0.5);
    out.features.push_back({step * static_cast<double>(i + 1) + jitter});
    out.labels.push_back(2);
  }
  return out;
}

}  // namespace phida
