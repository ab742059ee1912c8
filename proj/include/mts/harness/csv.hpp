#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mts/dataset.hpp"
#include "mts/errors.hpp"
#include "mts/matrix.hpp"
#include "mts/rng.hpp"

namespace mts::harness {

// How to read one dataset file.  Fields are plain so a schema can live in a
// JSON config or the dataset manifest.
struct CsvSchema {
  // Zero-based position of the label column; negative counts from the end,
  // so the default -1 is "last column".
  int label_column = -1;
  bool has_header = false;
  // Maps label cell text to class indices.  Empty means labels are numeric
  // and already in 0..L.
  std::map<std::string, int> class_names;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t line_no,
                         std::size_t col) {
  double value = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty())
    throw IngestionError("csv: line " + std::to_string(line_no) + ", column " +
                         std::to_string(col + 1) + ": cannot parse '" + cell +
                         "' as a number");
  return value;
}

}  // namespace detail

// Loads a comma-separated numeric table into a Dataset.  Row order is
// preserved.  Quoting is not supported: the expected inputs are plain numeric
// tables with at most a textual label column.
inline Dataset load_csv(const std::string& path, const CsvSchema& schema = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("csv: cannot open " + path);

  Dataset data;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim(line).empty()) continue;
    if (schema.has_header && !saw_header) {
      saw_header = true;
      continue;
    }
    auto cells = detail::split_csv_line(line);
    if (width == 0) {
      width = cells.size();
      if (width < 2)
        throw IngestionError("csv: line " + std::to_string(line_no) +
                             ": need at least one feature and a label");
    } else if (cells.size() != width) {
      throw IngestionError("csv: line " + std::to_string(line_no) + ": got " +
                           std::to_string(cells.size()) + " cells, expected " +
                           std::to_string(width));
    }

    int label_col = schema.label_column;
    if (label_col < 0) label_col += static_cast<int>(width);
    if (label_col < 0 || label_col >= static_cast<int>(width))
      throw IngestionError("csv: label column " +
                           std::to_string(schema.label_column) +
                           " outside a " + std::to_string(width) +
                           "-column file");

    int label;
    const std::string& raw = cells[static_cast<std::size_t>(label_col)];
    if (!schema.class_names.empty()) {
      auto it = schema.class_names.find(raw);
      if (it == schema.class_names.end())
        throw IngestionError("csv: line " + std::to_string(line_no) +
                             ": label '" + raw +
                             "' is not in the class-name mapping");
      label = it->second;
    } else {
      const double v = detail::parse_cell(
          raw, line_no, static_cast<std::size_t>(label_col));
      const double rounded = std::round(v);
      if (std::abs(v - rounded) > 1e-9 || rounded < 0.0 || rounded > 1e6)
        throw IngestionError("csv: line " + std::to_string(line_no) +
                             ": label '" + raw +
                             "' is not a non-negative integer");
      label = static_cast<int>(rounded);
    }

    std::vector<double> feat;
    feat.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == static_cast<std::size_t>(label_col)) continue;
      feat.push_back(detail::parse_cell(cells[c], line_no, c));
    }
    rows.push_back(std::move(feat));
    data.labels.push_back(label);
  }
  if (rows.empty()) throw IngestionError("csv: " + path + " has no data rows");

  int max_label = 0;
  for (int l : data.labels) max_label = std::max(max_label, l);
  if (!schema.class_names.empty()) {
    for (const auto& [name, idx] : schema.class_names) {
      if (idx < 0)
        throw ConfigurationError("csv: class '" + name +
                                 "' maps to a negative index");
      max_label = std::max(max_label, idx);
    }
  }
  data.num_classes = max_label + 1;
  data.features = Matrix::from_rows(rows);

  // Every class in 0..L must actually occur; a gap would silently starve the
  // stratified split.
  std::vector<int> counts(static_cast<std::size_t>(data.num_classes), 0);
  for (int l : data.labels) ++counts[static_cast<std::size_t>(l)];
  for (int c = 0; c < data.num_classes; ++c)
    if (counts[static_cast<std::size_t>(c)] == 0)
      throw IngestionError("csv: " + path + " has no rows with class " +
                           std::to_string(c));

  data.validate();
  return data;
}

// FNV-1a over the raw file bytes; used to pin dataset files once ingested.
inline std::uint64_t file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("checksum: cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();
  return mts::detail::fnv1a64(bytes);
}

}  // namespace mts::harness
