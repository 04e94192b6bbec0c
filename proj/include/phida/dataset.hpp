#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "phida/types.hpp"

namespace phida {

struct Dataset {
  std::string name;
  Points features;                       // n x d, row order of the source
  std::vector<long> labels;              // dense codes 0..C-1
  std::vector<std::string> class_names;  // class_names[c] is the source label of code c

  std::size_t size() const { return features.size(); }
  std::size_t dim() const { return features.empty() ? 0 : features.front().size(); }
  std::size_t class_count() const { return class_names.size(); }
};

// Which column holds the label: a header name, or a 0-based index where -1
// means the last column. An all-digit string (optionally with a leading '-')
// is read as an index.
struct LabelColumn {
  std::string spec = "-1";
};

// Reads a delimited text file (comma, tab or semicolon; detected from the
// first line). A header row is recognised when any of its feature cells is
// not numeric. Labels are coded in sorted order: numerically when every
// label parses as a number, lexicographically otherwise.
//
// Errors name the 1-based line and column of the offending cell.
Dataset load_dataset(const std::string& path, const LabelColumn& label_column = {});

// Numeric matrix without labels (prediction input). A non-numeric first row
// is treated as a header.
Points load_features(const std::string& path);

// Rescales every feature to [0, 1]; constant features become 0.
void min_max_scale(Dataset& data);

// Writes features plus a trailing "label" column in the format load_dataset
// reads back.
void write_dataset_csv(const Dataset& data, const std::string& path);

}  // namespace phida
