#pragma once

#include <filesystem>
#include <string>

#include "phida/learner.hpp"

namespace phida {

inline constexpr int kSnapshotVersion = 1;

// Line-oriented text snapshot of a ModelState. Reals are written as C99 hex
// floats so a save/load round trip is exact. Layout:
//
//   phida-snapshot <version>
//   dim <d>
//   flags <refresh> <remove> <prune_ph_input> <use_ph>
//   counters <samples_seen> <maintenance_epoch> <next_id>
//   stats <10 instrumentation counters>
//   welford <count> <mean x d> <m2 x d>
//   vigilance <lambda> <tau> <smoothed_ratio> <ratio_initialized> <recalc_counter> <retention> <buffer size>
//   sample <x x d>                      (one line per buffered sample, oldest first)
//   nodes <K>
//   node <id> <support> <scale> <active> <created_epoch> <n weights> <rep x d> <weights>
//   view <0|1>
//   ... view cache (see snapshot.cpp), then
//   end
//
// Only the cache part of the PH view is stored; graph, tree and hierarchy
// are rebuilt by the next maintenance cycle.
std::string serialize_model(const ModelState& model);
ModelState deserialize_model(const std::string& text);

void save_model(const ModelState& model, const std::filesystem::path& path);
ModelState load_model(const std::filesystem::path& path);

}  // namespace phida
