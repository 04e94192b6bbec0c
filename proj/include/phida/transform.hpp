#pragma once

#include <span>

#include "phida/types.hpp"

namespace phida {

// Robust centering plus partial scale normalisation.
//
//   out_j = (x_j - median_j) / sigma_hat_j ^ gamma
//
// sigma_hat_j = HazenIQR_j / 1.349 (floored at 1e-12). gamma grows from 0
// towards 1 as the per-feature scales become heterogeneous, so homogeneous
// data is only centred and distances are preserved exactly.
struct TransformState {
  Vector median;
  Vector sigma_hat;
  double gamma = 0.0;

  std::size_t dim() const { return median.size(); }

  // Throws std::invalid_argument on dimension mismatch.
  Vector apply(std::span<const double> x) const;
  void apply_into(std::span<const double> x, std::span<double> out) const;

  static TransformState identity(std::size_t dim);

  bool operator==(const TransformState&) const = default;
};

inline constexpr double kSigmaFloor = 1e-12;
inline constexpr double kIqrToSigma = 1.349;

// Fits median, scales and gamma from a point set. Throws on empty input.
TransformState fit_transform_state(std::span<const Vector> points);

// gamma = max(1 - 1/cv^2, 0) over the positive finite entries of `scales`;
// 0 when cv is zero or undefined.
double scale_exponent(std::span<const double> scales);

}  // namespace phida
