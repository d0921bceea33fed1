#pragma once

#include <Eigen/Dense>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "gprop/errors.hpp"
#include "gprop/gp.hpp"

namespace gprop::io {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd data;

  Eigen::Index column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw DataError("CSV is missing a required column: " + name);
  }

  bool has_column(const std::string& name) const {
    for (const std::string& h : header) {
      if (h == name) return true;
    }
    return false;
  }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

inline double parse_double(std::string_view field, const std::string& path,
                           std::size_t line_no) {
  // Tolerate surrounding whitespace; reject anything else trailing.
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) {
    field.remove_prefix(1);
  }
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const auto res =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": malformed numeric field '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace detail

/// Reads a comma-separated file with one header row. Errors carry the file
/// path and 1-based line number.
inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  std::size_t line_no = 0;
  CsvTable table;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = detail::split_fields(line);
    if (table.header.empty()) {
      for (std::string_view f : fields) table.header.emplace_back(f);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      row[i] = detail::parse_double(fields[i], path, line_no);
    }
    rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw DataError(path + ": empty file");

  table.data.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      table.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          rows[i][j];
    }
  }
  return table;
}

inline void write_csv(const std::string& path,
                      const std::vector<std::string>& header,
                      const Eigen::MatrixXd& data) {
  if (static_cast<Eigen::Index>(header.size()) != data.cols()) {
    throw std::invalid_argument("write_csv: header/data width mismatch");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (j) out << ',';
      out << format_double(data(i, j));
    }
    out << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

/// Dataset files use columns x0..x{D-1} followed by y.
inline void write_dataset_csv(const std::string& path, const Dataset& data) {
  std::vector<std::string> header;
  for (Eigen::Index j = 0; j < data.dim(); ++j) {
    header.push_back("x" + std::to_string(j));
  }
  header.push_back("y");
  Eigen::MatrixXd table(data.n(), data.dim() + 1);
  table.leftCols(data.dim()) = data.inputs;
  table.col(data.dim()) = data.targets;
  write_csv(path, header, table);
}

inline Dataset read_dataset_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() < 2 || table.header.back() != "y") {
    throw DataError(path + ": expected columns x0..x{D-1},y");
  }
  const Eigen::Index d = static_cast<Eigen::Index>(table.header.size()) - 1;
  for (Eigen::Index j = 0; j < d; ++j) {
    if (table.header[static_cast<std::size_t>(j)] != "x" + std::to_string(j)) {
      throw DataError(path + ": expected columns x0..x{D-1},y");
    }
  }
  Dataset data;
  data.inputs = table.data.leftCols(d);
  data.targets = table.data.col(d);
  if (data.n() < 1) throw DataError(path + ": no data rows");
  return data;
}

/// Feature matrix for prediction: either a plain x0..x{D-1} file or a full
/// dataset file whose trailing y column is ignored.
inline Eigen::MatrixXd read_inputs_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  Eigen::Index d = static_cast<Eigen::Index>(table.header.size());
  if (!table.header.empty() && table.header.back() == "y") --d;
  if (d < 1) throw DataError(path + ": no feature columns");
  for (Eigen::Index j = 0; j < d; ++j) {
    if (table.header[static_cast<std::size_t>(j)] != "x" + std::to_string(j)) {
      throw DataError(path + ": expected feature columns x0..x{D-1}");
    }
  }
  if (table.data.rows() < 1) throw DataError(path + ": no data rows");
  return table.data.leftCols(d);
}

/// Single-column target file (header "y"), as written for clean truth
/// values. A trailing y column of a dataset file works too.
inline Eigen::VectorXd read_targets_csv(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.data.rows() < 1) throw DataError(path + ": no data rows");
  if (table.has_column("y")) return table.data.col(table.column("y"));
  if (table.header.size() == 1) return table.data.col(0);
  throw DataError(path + ": expected a 'y' column");
}

inline void write_targets_csv(const std::string& path,
                              const Eigen::VectorXd& targets) {
  write_csv(path, {"y"}, targets);
}

}  // namespace gprop::io
