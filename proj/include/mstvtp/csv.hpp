// Licensed under the Apache License 2.0 (see LICENSE file).

#pragma once

#include <string>
#include <vector>

#include "mstvtp/types.hpp"

namespace mstvtp {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

/// Numeric parse with an error naming the offending cell.
double parse_cell(const std::string& value, const std::string& column, size_t row);

/// Dataset from a CSV with a "y" column and an optional "x" column; other
/// columns are ignored (so simulator exports load back directly).
Dataset dataset_from_csv(const std::string& path);

void dataset_to_csv(const Dataset& data, const std::string& path);

std::string format_double(double v);

}  // namespace mstvtp
