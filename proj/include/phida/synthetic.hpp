#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "phida/dataset.hpp"
#include "phida/types.hpp"

namespace phida {

// splitmix64 (Steele, Lea, Flood 2014). Constants:
//   increment 0x9e3779b97f4a7c15
//   mix       0xbf58476d1ce4e5b9, 0x94d049bb133111eb, shifts 30/27/31
// uniform() takes the top 53 bits; normal() is Box-Muller using one pair of
// uniforms per call (the second variate is discarded to keep the stream
// position a simple function of the call count).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  double uniform();                      // [0, 1)
  double normal();                       // N(0, 1)
  std::size_t below(std::size_t bound);  // uniform integer in [0, bound)

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

struct BlobSpec {
  Points centers;
  std::vector<double> stds;
  std::vector<std::size_t> counts;
  std::uint64_t seed = 0;
};

// Isotropic Gaussian blobs, emitted blob by blob; label = blob index.
// Throws on inconsistent sizes, non-positive stds or zero counts.
Dataset generate_blobs(const BlobSpec& spec);

// Two dense 1-D Gaussian modes (mode_support points each, centred at 0 and
// kBridgedModeSeparation, std 1) joined by gap_support evenly spaced bridge
// points with a small jitter. Labels: 0 left mode, 1 right mode, 2 bridge.
// Throws unless mode_support > gap_support.
inline constexpr double kBridgedModeSeparation = 8.0;
Dataset generate_bridged_modes(std::size_t gap_support, std::size_t mode_support, std::uint64_t seed);

}  // namespace phida
