#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace phida {

// Chance-corrected agreement between two labelings of the same samples.
// Labels are arbitrary integers; only equality matters.

// Adjusted Rand index (Hubert-Arabie). Returns 1 when the expected and
// maximum index coincide (both labelings trivial in the same way).
double adjusted_rand_index(std::span<const long> truth, std::span<const long> pred);

// Adjusted mutual information with the exact hypergeometric expected MI and
// max(H(U), H(V)) normalisation. 1 when both labelings have a single
// cluster; 0 when exactly one side does.
double adjusted_mutual_information(std::span<const long> truth, std::span<const long> pred);

double mutual_information(std::span<const long> truth, std::span<const long> pred);
double expected_mutual_information(std::span<const long> truth, std::span<const long> pred);
double entropy(std::span<const long> labels);

// Mean of per-stage scores. Throws on empty input.
double avg_inc(std::span<const double> per_stage);

// R[i][j]: score on stage i after training through stage j (0-based, j >= i).
// Entries with j < i are ignored.
using StageScoreMatrix = std::vector<std::vector<std::optional<double>>>;

// (1/(J-1)) * sum_{i<J} (R[i][J] - R[i][i]). Throws for J < 2 or missing
// entries.
double backward_transfer(const StageScoreMatrix& r);

}  // namespace phida
