#include "splinestab/text_io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splinestab/errors.hpp"

namespace splinestab {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_row(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_g17(values[i]);
  }
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

Eigen::MatrixXd read_points(std::istream& in, const std::string& name) {
  std::vector<std::vector<double>> rows;
  std::string line;
  Eigen::Index width = -1;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof()) {
      throw IoError(name + ":" + std::to_string(lineno) + ": malformed coordinate");
    }
    if (row.empty()) continue;
    if (width < 0) width = static_cast<Eigen::Index>(row.size());
    if (static_cast<Eigen::Index>(row.size()) != width) {
      throw IoError(name + ":" + std::to_string(lineno) + ": inconsistent dimension");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError(name + ": no points found");
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(rows.size()), width);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < width; ++j) pts(i, j) = rows[i][j];
  return pts;
}

Eigen::MatrixXd read_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open point file: " + path);
  return read_points(in, path);
}

void write_points(std::ostream& out, const Eigen::MatrixXd& pts) {
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (j) out << ' ';
      out << format_g17(pts(i, j));
    }
    out << '\n';
  }
}

void write_point_file(const std::string& path, const Eigen::MatrixXd& pts) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file: " + path);
  write_points(out, pts);
  if (!out) throw IoError("write failed: " + path);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

} // namespace splinestab
