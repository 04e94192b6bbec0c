#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace phida {

// Robust and streaming statistics shared by the transform, graph builder and
// learner.
//
// Quantiles use the Hazen plotting position: the q-quantile of n sorted
// values sits at (1-based) position h = q*n + 0.5, clamped to [1, n], and is
// linearly interpolated between the neighbouring order statistics.

// Throws std::invalid_argument("empty sample") on empty input.
double hazen_quantile(std::span<const double> values, double q);

// Same as hazen_quantile but for input that is already sorted ascending.
double hazen_quantile_sorted(std::span<const double> sorted, double q);

inline double hazen_median(std::span<const double> values) {
  return hazen_quantile(values, 0.5);
}

// Q75 - Q25 (Hazen). Always >= 0.
double hazen_iqr(std::span<const double> values);

// Population standard deviation over mean. Entries are expected to be
// positive and finite; an empty input has no defined cv and yields nullopt.
std::optional<double> coefficient_of_variation(std::span<const double> values);

/// Per-feature single-pass mean and sum of squared deviations.
///
/// stddev() uses the n-1 denominator and reports zeros until two samples
/// have been seen.
class WelfordState {
 public:
  WelfordState() = default;
  explicit WelfordState(std::size_t dim) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  // Throws std::invalid_argument on dimension mismatch.
  void update(std::span<const double> x);

  std::size_t dim() const { return mean_.size(); }
  std::size_t count() const { return count_; }
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& m2() const { return m2_; }
  std::vector<double> stddev() const;

  // Restores a previously serialized state verbatim.
  static WelfordState restore(std::size_t count, std::vector<double> mean, std::vector<double> m2);

  bool operator==(const WelfordState&) const = default;

 private:
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

}  // namespace phida
