// Licensed under the Apache License 2.0 (see LICENSE file).

#include "mstvtp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace mstvtp {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    size_t start = field.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? "" : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  CsvTable t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto fields = split_line(line);
    if (first) {
      t.header = fields;
      first = false;
    } else {
      t.rows.push_back(fields);
    }
  }
  if (first) fail(ErrorCode::Io, "'" + path + "' is empty");
  return t;
}

double parse_cell(const std::string& value, const std::string& column,
                  size_t row) {
  try {
    size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size())
      fail(ErrorCode::Io, "trailing characters");
    return v;
  } catch (...) {
    fail(ErrorCode::Io, "cannot parse '" + value + "' in column '" + column +
                            "', data row " + std::to_string(row + 1));
  }
}

Dataset dataset_from_csv(const std::string& path) {
  CsvTable t = read_csv(path);
  int yc = t.column("y");
  if (yc < 0) fail(ErrorCode::Io, "'" + path + "' has no 'y' column");
  int xc = t.column("x");
  Dataset d;
  d.label = path;
  for (size_t r = 0; r < t.rows.size(); ++r) {
    if (yc >= static_cast<int>(t.rows[r].size()))
      fail(ErrorCode::Io, "short row " + std::to_string(r + 1) + " in '" + path + "'");
    d.y.push_back(parse_cell(t.rows[r][yc], "y", r));
    if (xc >= 0) {
      if (xc >= static_cast<int>(t.rows[r].size()))
        fail(ErrorCode::Io, "short row " + std::to_string(r + 1) + " in '" + path + "'");
      d.x.push_back(parse_cell(t.rows[r][xc], "x", r));
    }
  }
  d.validate();
  return d;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void dataset_to_csv(const Dataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write '" + path + "'");
  out << (data.has_covariate() ? "t,y,x\n" : "t,y\n");
  for (size_t t = 0; t < data.y.size(); ++t) {
    out << (t + 1) << ',' << format_double(data.y[t]);
    if (data.has_covariate()) out << ',' << format_double(data.x[t]);
    out << '\n';
  }
}

}  // namespace mstvtp
