#include "pcassoc/table.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pcassoc {

int Table::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

Eigen::MatrixXd Table::to_matrix() const {
  Eigen::MatrixXd m(n_rows(), static_cast<Eigen::Index>(columns.size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      m(i, j) = rows[i][j];
    }
  }
  return m;
}

Table Table::from_matrix(const std::vector<std::string>& columns, const Eigen::MatrixXd& m) {
  if (static_cast<Eigen::Index>(columns.size()) != m.cols()) {
    throw std::invalid_argument("table: header width does not match matrix");
  }
  Table t;
  t.columns = columns;
  t.rows.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    t.rows[i].resize(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) t.rows[i][j] = m(i, j);
  }
  return t;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_tsv(const Table& t, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  for (size_t j = 0; j < t.columns.size(); ++j) {
    if (j > 0) out << '\t';
    out << t.columns[j];
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) {
      if (j > 0) out << '\t';
      out << format_double(row[j]);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t pos = line.find('\t', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

}  // namespace

Table read_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);

  Table t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.columns = split_tabs(line);

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != t.columns.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(t.columns.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    std::vector<double> row(fields.size());
    for (size_t j = 0; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      char* end = nullptr;
      row[j] = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": non-numeric cell '" + f + "' in column " +
                                 t.columns[j]);
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_labeled_tsv(const LabeledTable& t, const std::string& path) {
  if (t.labels.size() != t.rows.size()) {
    throw std::invalid_argument("table: label count does not match row count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << t.label_header;
  for (const auto& c : t.columns) out << '\t' << c;
  out << '\n';
  for (size_t i = 0; i < t.rows.size(); ++i) {
    out << t.labels[i];
    for (double v : t.rows[i]) out << '\t' << format_double(v);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

LabeledTable read_labeled_tsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);

  LabeledTable t;
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_tabs(line);
  if (header.empty()) throw std::runtime_error("missing header: " + path);
  t.label_header = header.front();
  t.columns.assign(header.begin() + 1, header.end());

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_tabs(line);
    if (fields.size() != header.size()) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " fields, got " +
                               std::to_string(fields.size()));
    }
    t.labels.push_back(fields.front());
    std::vector<double> row(fields.size() - 1);
    for (size_t j = 1; j < fields.size(); ++j) {
      const std::string& f = fields[j];
      char* end = nullptr;
      row[j - 1] = std::strtod(f.c_str(), &end);
      if (f.empty() || end != f.c_str() + f.size()) {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": non-numeric cell '" + f + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pcassoc
