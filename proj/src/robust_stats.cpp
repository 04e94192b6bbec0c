#include "phida/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phida {

double hazen_quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw std::invalid_argument("empty sample");
  const double n = static_cast<double>(sorted.size());
  const double h = std::clamp(q * n + 0.5, 1.0, n);
  const double lo = std::floor(h);
  const auto i = static_cast<std::size_t>(lo) - 1;
  const auto j = static_cast<std::size_t>(std::ceil(h)) - 1;
  if (i == j) return sorted[i];
  return sorted[i] + (h - lo) * (sorted[j] - sorted[i]);
}

double hazen_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return hazen_quantile_sorted(v, q);
}

double hazen_iqr(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  return std::max(0.0, hazen_quantile_sorted(v, 0.75) - hazen_quantile_sorted(v, 0.25));
}

std::optional<double> coefficient_of_variation(std::span<const double> values) {
  if (values.empty()) return std::nullopt;
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  if (!(mean > 0.0) || !std::isfinite(mean)) return std::nullopt;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n) / mean;
}

void WelfordState::update(std::span<const double> x) {
  if (x.size() != mean_.size()) throw std::invalid_argument("welford: dimension mismatch");
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double delta = x[j] - mean_[j];
    mean_[j] += delta / n;
    m2_[j] += delta * (x[j] - mean_[j]);
    if (m2_[j] < 0.0) m2_[j] = 0.0;
  }
}

std::vector<double> WelfordState::stddev() const {
  std::vector<double> out(mean_.size(), 0.0);
  if (count_ < 2) return out;
  const double denom = static_cast<double>(count_ - 1);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = std::sqrt(m2_[j] / denom);
  return out;
}

WelfordState WelfordState::restore(std::size_t count, std::vector<double> mean, std::vector<double> m2) {
  if (mean.size() != m2.size()) throw std::invalid_argument("welford: inconsistent restore");
  WelfordState s;
  s.count_ = count;
  s.mean_ = std::move(mean);
  s.m2_ = std::move(m2);
  return s;
}

}  // namespace phida
