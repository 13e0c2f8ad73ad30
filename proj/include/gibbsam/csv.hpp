#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "gibbsam/risk.hpp"

namespace gibbsam {

/// Shortest decimal string that round-trips the double.
inline std::string double_to_string(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& field, const std::string& where) {
  double v = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::runtime_error(where + ": cannot parse number '" + field + "'");
  return v;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline std::ofstream open_for_write(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  return f;
}

/// Data file: header x1,...,xp,y then one row per observation.
inline void write_data_csv(const std::string& path, const Dataset& data) {
  data.validate();
  std::ofstream f = open_for_write(path);
  for (int j = 1; j <= data.p(); ++j) f << "x" << j << ",";
  f << "y\n";
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j)
      f << double_to_string(data.x(i, j)) << ",";
    f << double_to_string(data.y(i)) << "\n";
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

struct DataCsv {
  Dataset data;
  bool has_response = true;
};

/// Reads a data file. Accepts either x1..xp,y or bare x1..xp columns;
/// errors carry the 1-based offending line number.
inline DataCsv read_data_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(f, line))
    throw std::runtime_error(path + ": line 1: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw std::runtime_error(path + ": line 1: empty header");
  DataCsv out;
  out.has_response = header.back() == "y";
  const int p = static_cast<int>(header.size()) - (out.has_response ? 1 : 0);
  if (p < 1) throw std::runtime_error(path + ": line 1: no covariate columns");
  for (int j = 0; j < p; ++j) {
    const std::string expected = "x" + std::to_string(j + 1);
    if (header[j] != expected)
      throw std::runtime_error(path + ": line 1: expected column '" + expected +
                               "', found '" + header[j] + "'");
  }
  std::vector<std::vector<double>> rows;
  long line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                               ": expected " + std::to_string(header.size()) +
                               " fields, found " + std::to_string(fields.size()));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row[c] = parse_double(fields[c],
                            path + ": line " + std::to_string(line_no));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw std::runtime_error(path + ": no data rows");
  const int n = static_cast<int>(rows.size());
  out.data.x.resize(n, p);
  out.data.y.resize(out.has_response ? n : 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) out.data.x(i, j) = rows[i][j];
    if (out.has_response) out.data.y(i) = rows[i][p];
  }
  return out;
}

/// Single-column file of noise-free truth values.
inline void write_truth_csv(const std::string& path, const Eigen::VectorXd& truth) {
  std::ofstream f = open_for_write(path);
  f << "psi_star\n";
  for (Eigen::Index i = 0; i < truth.size(); ++i)
    f << double_to_string(truth(i)) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

/// Single-column file of predictions.
inline void write_predictions_csv(const std::string& path,
                                  const Eigen::VectorXd& y_hat) {
  std::ofstream f = open_for_write(path);
  f << "y_hat\n";
  for (Eigen::Index i = 0; i < y_hat.size(); ++i)
    f << double_to_string(y_hat(i)) << "\n";
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace gibbsam
