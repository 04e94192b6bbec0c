#pragma once

#include <cstdint>
#include <vector>

namespace phida {

using Vector = std::vector<double>;
using Points = std::vector<Vector>;

// Stable identity of a learned node; survives deletions of other nodes.
using NodeId = std::uint64_t;

}  // namespace phida
