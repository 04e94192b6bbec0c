#include "phida/transform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "phida/robust_stats.hpp"

namespace phida {

Vector TransformState::apply(std::span<const double> x) const {
  Vector out(x.size());
  apply_into(x, out);
  return out;
}

void TransformState::apply_into(std::span<const double> x, std::span<double> out) const {
  if (x.size() != median.size() || out.size() != x.size()) {
    throw std::invalid_argument("transform: dimension mismatch");
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double denom = gamma == 0.0 ? 1.0 : std::pow(sigma_hat[j], gamma);
    out[j] = (x[j] - median[j]) / denom;
  }
}

TransformState TransformState::identity(std::size_t dim) {
  return TransformState{Vector(dim, 0.0), Vector(dim, 1.0), 0.0};
}

double scale_exponent(std::span<const double> scales) {
  std::vector<double> usable;
  usable.reserve(scales.size());
  for (double s : scales) {
    if (std::isfinite(s) && s > 0.0) usable.push_back(s);
  }
  const auto cv = coefficient_of_variation(usable);
  if (!cv || *cv == 0.0 || !std::isfinite(*cv)) return 0.0;
  return std::max(1.0 - 1.0 / (*cv * *cv), 0.0);
}

TransformState fit_transform_state(std::span<const Vector> points) {
  if (points.empty()) throw std::invalid_argument("transform: empty point set");
  const std::size_t d = points.front().size();
  TransformState st;
  st.median.resize(d);
  st.sigma_hat.resize(d);
  Vector raw_scales(d);
  std::vector<double> column(points.size());
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != d) throw std::invalid_argument("transform: ragged point set");
      column[i] = points[i][j];
    }
    std::sort(column.begin(), column.end());
    st.median[j] = hazen_quantile_sorted(column, 0.5);
    const double iqr = hazen_quantile_sorted(column, 0.75) - hazen_quantile_sorted(column, 0.25);
    raw_scales[j] = iqr / kIqrToSigma;
    st.sigma_hat[j] = std::max(raw_scales[j], kSigmaFloor);
  }
  st.gamma = scale_exponent(raw_scales);
  return st;
}

}  // namespace phida
