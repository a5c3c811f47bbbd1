// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "starfrac/grid.hpp"

namespace starfrac {

/// Lossless text form of a double (17 significant digits).
std::string format_g17(double v);

/// Shared snapshot schema, one row per (snapshot, cell), LF line endings:
///   snapshot_time,cell_index,cell_x[,cell_y],mass
/// where mass is the cell value times the cell volume.
void write_density_csv(const std::string& path, const Grid& grid,
                       const std::vector<DensityField>& snapshots);

/// Generic small-table CSV: header columns, rows of doubles, 17 digits.
void write_table_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace starfrac
