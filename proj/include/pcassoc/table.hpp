#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace pcassoc {

/// Rectangular numeric table with a header row. The interchange dialect is
/// tab-separated, '\n' line endings, '.' decimal point, no quoting; numbers
/// are written with 17 significant digits so a round trip is lossless.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  Eigen::Index n_rows() const { return static_cast<Eigen::Index>(rows.size()); }
  int column_index(const std::string& name) const;  // -1 when absent
  Eigen::MatrixXd to_matrix() const;

  static Table from_matrix(const std::vector<std::string>& columns, const Eigen::MatrixXd& m);
};

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

void write_tsv(const Table& t, const std::string& path);

/// Reads a TSV written by write_tsv (or any conforming file). Ragged rows and
/// non-numeric cells raise std::runtime_error naming the line.
Table read_tsv(const std::string& path);

/// Numeric table with a leading string-label column (used by model and
/// report files, where the first column names a trait or a test).
struct LabeledTable {
  std::string label_header;
  std::vector<std::string> labels;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_labeled_tsv(const LabeledTable& t, const std::string& path);
LabeledTable read_labeled_tsv(const std::string& path);

}  // namespace pcassoc
