#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

namespace splinestab {

/// Shortest representation that round-trips a double (17 significant digits).
std::string format_g17(double v);

/// One comma-separated row, doubles formatted with format_g17.
std::string csv_row(const std::vector<double>& values);
std::string csv_row(const std::vector<std::string>& fields);

/// Point-set file: one point per line, whitespace-separated coordinates,
/// '#' lines ignored. All rows must have the same width.
Eigen::MatrixXd read_points(std::istream& in, const std::string& name = "<stream>");
Eigen::MatrixXd read_point_file(const std::string& path);
void write_points(std::ostream& out, const Eigen::MatrixXd& pts);
void write_point_file(const std::string& path, const Eigen::MatrixXd& pts);

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint configs in reports.
std::string fnv1a_hex(const std::string& text);

} // namespace splinestab
