#include "phida/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#ifdef PHIDA_HAVE_OPENMP
#include <omp.h>
#endif

namespace phida::kernels {

bool openmp_enabled() {
#ifdef PHIDA_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef PHIDA_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

Exec default_exec() { return openmp_enabled() ? Exec::parallel : Exec::serial; }

double squared_euclidean(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double t = a[j] - b[j];
    s += t * t;
  }
  return s;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(squared_euclidean(a, b));
}

namespace {

void pairwise_serial(std::span<const Vector> points, std::vector<double>& out) {
  const std::size_t n = points.size();
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = p + 1; q < n; ++q) {
      const double d = euclidean(points[p], points[q]);
      out[p * n + q] = d;
      out[q * n + p] = d;
    }
  }
}

void pairwise_parallel(std::span<const Vector> points, std::vector<double>& out) {
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  // Full rows per thread; each (p,q) is written once from its own row so no
  // two threads touch the same element.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t p = 0; p < n; ++p) {
    for (std::ptrdiff_t q = 0; q < n; ++q) {
      if (q == p) continue;
      // Evaluate in (min,max) order so the result matches the serial kernel.
      const auto lo = static_cast<std::size_t>(std::min(p, q));
      const auto hi = static_cast<std::size_t>(std::max(p, q));
      out[static_cast<std::size_t>(p * n + q)] = euclidean(points[lo], points[hi]);
    }
  }
}

}  // namespace

std::vector<double> pairwise_distances(std::span<const Vector> points, Exec exec) {
  const std::size_t n = points.size();
  std::vector<double> out(n * n, 0.0);
  if (n < 2) return out;
  const std::size_t d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("pairwise_distances: ragged input");
  }
  if (exec == Exec::parallel && openmp_enabled() && n * n * d >= kParallelGrain) {
    pairwise_parallel(points, out);
  } else {
    pairwise_serial(points, out);
  }
  return out;
}

void distances_to(std::span<const double> query, std::span<const Vector> points,
                  std::span<double> out, Exec exec) {
  if (out.size() != points.size()) throw std::invalid_argument("distances_to: output size mismatch");
  for (const auto& p : points) {
    if (p.size() != query.size()) throw std::invalid_argument("distances_to: dimension mismatch");
  }
  const auto n = static_cast<std::ptrdiff_t>(points.size());
  if (exec == Exec::parallel && openmp_enabled() && points.size() * query.size() >= kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      out[static_cast<std::size_t>(i)] = euclidean(query, points[static_cast<std::size_t>(i)]);
    }
    return;
  }
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = euclidean(query, points[i]);
}

}  // namespace phida::kernels
