// SPDX-License-Identifier: Apache-2.0
#include "starfrac/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace starfrac {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {
std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}
}  // namespace

void write_density_csv(const std::string& path, const Grid& grid,
                       const std::vector<DensityField>& snapshots) {
  std::ofstream out = open_out(path);
  out << (grid.dim == 1 ? "snapshot_time,cell_index,cell_x,mass\n"
                        : "snapshot_time,cell_index,cell_x,cell_y,mass\n");
  const double vol = grid.cell_volume();
  for (const DensityField& f : snapshots) {
    if (static_cast<int>(f.values.size()) != grid.n_cells())
      throw std::invalid_argument("snapshot does not match the grid");
    for (int i = 0; i < grid.n_cells(); ++i) {
      out << format_g17(f.time) << ',' << i << ',' << format_g17(grid.centers[i].x);
      if (grid.dim == 2) out << ',' << format_g17(grid.centers[i].y);
      out << ',' << format_g17(f.values[i] * vol) << '\n';
    }
  }
}

void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  std::ofstream out = open_out(path);
  for (size_t c = 0; c < header.size(); ++c)
    out << header[c] << (c + 1 < header.size() ? ',' : '\n');
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("csv row width does not match the header");
    for (size_t c = 0; c < row.size(); ++c)
      out << format_g17(row[c]) << (c + 1 < row.size() ? ',' : '\n');
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace starfrac
