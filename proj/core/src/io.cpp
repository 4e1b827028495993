#include "sepx/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sepx/errors.hpp"

namespace sepx::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> state_columns(int dim) {
  if (dim == 2) return {"N", "E"};
  if (dim == 3) return {"N", "A", "E"};
  throw ContractError("state dimension must be 2 or 3");
}

void write_points_csv(const std::filesystem::path& path, const std::vector<State>& points,
                      int dim) {
  auto out = open_out(path);
  const auto cols = state_columns(dim);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (const auto& p : points) {
    for (Eigen::Index k = 0; k < p.size(); ++k) out << (k ? "," : "") << format_double(p(k));
    out << '\n';
  }
}

std::vector<State> read_points_csv(const std::filesystem::path& path, int& dim) {
  std::ifstream in(path);
  if (!in) throw StageDependencyError("missing upstream file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV file " + path.string());
  dim = static_cast<int>(split(line).size());
  state_columns(dim);

  std::vector<State> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (static_cast<int>(cells.size()) != dim) {
      throw ConfigError("malformed row in " + path.string() + ": " + line);
    }
    State p(dim);
    try {
      for (int k = 0; k < dim; ++k) p(k) = std::stod(cells[static_cast<std::size_t>(k)]);
    } catch (const std::exception&) {
      throw ConfigError("non-numeric value in " + path.string() + ": " + line);
    }
    points.push_back(std::move(p));
  }
  return points;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& trajectory,
                          int dim) {
  auto out = open_out(path);
  out << 't';
  for (const auto& c : state_columns(dim)) out << ',' << c;
  out << '\n';
  for (const auto& [t, x] : trajectory) {
    out << format_double(t);
    for (Eigen::Index k = 0; k < x.size(); ++k) out << ',' << format_double(x(k));
    out << '\n';
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  auto out = open_out(path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StageDependencyError("missing upstream file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace sepx::io
