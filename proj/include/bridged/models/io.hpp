#pragma once

// Loaders for character-separated numeric tables with a header row.

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bridged/error.hpp"
#include "bridged/models/bmmc.hpp"
#include "bridged/models/harmonization.hpp"

namespace bridged {

struct NumericTable {
  std::vector<std::string> header;
  MatrixXd values;

  Index column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw InvalidInput("table has no column '" + name + "'");
    return static_cast<Index>(it - header.begin());
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

inline double parse_number(const std::string& s, const std::string& where) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (s.empty() || r.ec != std::errc() || r.ptr != end) throw InvalidInput(where + ": '" + s + "' is not a number");
  return v;
}

}  // namespace detail

inline NumericTable parse_numeric_table(std::istream& in, char delim = ',', const std::string& name = "table") {
  NumericTable t;
  std::string line;
  // Leading '#' lines carry run stamps and are skipped.
  int lineno = 0;
  do {
    if (!std::getline(in, line)) throw InvalidInput(name + ": empty input");
    ++lineno;
  } while (!line.empty() && line[0] == '#');
  t.header = detail::split(line, delim);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto cells = detail::split(line, delim);
    if (cells.size() != t.header.size())
      throw InvalidInput(name + ": line " + std::to_string(lineno) + " has " + std::to_string(cells.size()) +
                         " fields, expected " + std::to_string(t.header.size()));
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(detail::parse_number(c, name + ":" + std::to_string(lineno)));
    rows.push_back(std::move(r));
  }
  t.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(t.header.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) t.values(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  return t;
}

inline NumericTable read_numeric_table(const std::filesystem::path& path, char delim = ',') {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path.string());
  return parse_numeric_table(in, delim, path.string());
}

/// Columns scaled to zero mean and unit (population) variance; constant
/// columns are only centered.
inline MatrixXd standardize_columns(const MatrixXd& x) {
  MatrixXd out = x.rowwise() - x.colwise().mean();
  for (Index j = 0; j < out.cols(); ++j) {
    const double sd = std::sqrt(out.col(j).squaredNorm() / static_cast<double>(out.rows()));
    if (sd > 0.0) out.col(j) /= sd;
  }
  return out;
}

/// Labeled classification table: every column except `label_column` is a
/// standardized feature; labels must be 0/1 and are mapped to −1/+1.
struct LabeledTable {
  MatrixXd x;
  VectorXd y;  // ±1
  std::vector<std::string> feature_names;
  NumericTable raw;
};

inline LabeledTable load_labeled_table(const std::filesystem::path& path, const std::string& label_column,
                                       char delim = ',') {
  LabeledTable out;
  out.raw = read_numeric_table(path, delim);
  const Index lc = out.raw.column(label_column);
  const Index n = out.raw.values.rows(), p = out.raw.values.cols();
  if (n < 2) throw InvalidInput(path.string() + ": need at least two rows");
  MatrixXd feats(n, p - 1);
  for (Index j = 0, k = 0; j < p; ++j) {
    if (j == lc) continue;
    feats.col(k++) = out.raw.values.col(j);
    out.feature_names.push_back(out.raw.header[static_cast<std::size_t>(j)]);
  }
  out.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double v = out.raw.values(i, lc);
    if (v != 0.0 && v != 1.0) throw InvalidInput(path.string() + ": label column must be 0/1");
    out.y(i) = v == 1.0 ? 1.0 : -1.0;
  }
  out.x = standardize_columns(feats);
  return out;
}

/// Square matrix stored as a table; the header row is ignored.
inline MatrixXd read_square_matrix(const std::filesystem::path& path, char delim = ',') {
  const NumericTable t = read_numeric_table(path, delim);
  if (t.values.rows() != t.values.cols()) throw InvalidInput(path.string() + ": matrix is not square");
  return t.values;
}

/// All regular files in `dir` in lexicographic order, one Laplacian each.
inline HarmonizationData load_harmonization_directory(const std::filesystem::path& dir, char delim = ',') {
  if (!std::filesystem::is_directory(dir)) throw FileError(dir.string() + " is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  HarmonizationData d;
  for (const auto& f : files) d.laplacians.push_back(read_square_matrix(f, delim));
  d.validate();
  return d;
}

}  // namespace bridged
