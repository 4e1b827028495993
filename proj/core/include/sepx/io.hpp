#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sepx/dynamics.hpp"
#include "sepx/models.hpp"

namespace sepx::io {

/// 17 significant digits ("%.17g"), enough to round-trip a double.
std::string format_double(double v);

/// Column names for a state of the given dimension: N,E or N,A,E.
std::vector<std::string> state_columns(int dim);

/// One header line, then one row per point.
void write_points_csv(const std::filesystem::path& path, const std::vector<State>& points,
                      int dim);
/// Inverse of write_points_csv; the dimension comes from the header.
std::vector<State> read_points_csv(const std::filesystem::path& path, int& dim);

/// Rows (t, x1, ..., xdim).
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          int dim);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace sepx::io
