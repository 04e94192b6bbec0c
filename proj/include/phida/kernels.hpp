#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phida/types.hpp"

// Data-parallel distance kernels.
//
// Every kernel has a serial reference and an OpenMP variant selected by
// Exec. Both produce bit-identical results: each output element is computed
// by exactly one thread with the same summation order, so the parallel path
// can be checked against the serial one with exact equality.
namespace phida::kernels {

enum class Exec { serial, parallel };

// Default execution policy; parallel when the library was built with OpenMP.
Exec default_exec();

bool openmp_enabled();
int max_threads();

// Euclidean distance between two equal-length vectors.
double euclidean(std::span<const double> a, std::span<const double> b);
double squared_euclidean(std::span<const double> a, std::span<const double> b);

// Dense row-major n x n matrix of pairwise Euclidean distances. The diagonal
// is left at 0; callers that need +inf there set it themselves.
std::vector<double> pairwise_distances(std::span<const Vector> points, Exec exec);

// out[i] = ||query - points[i]||.
void distances_to(std::span<const double> query, std::span<const Vector> points,
                  std::span<double> out, Exec exec);

// Work below this many scalar operations stays on the calling thread.
inline constexpr std::size_t kParallelGrain = 1u << 14;

}  // namespace phida::kernels
