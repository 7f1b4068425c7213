#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nlsnorm/scalar_ground.hpp"
#include "nlsnorm/solution.hpp"

namespace nlsnorm
{

/// Writes to a temporary file in the same directory, then renames it over
/// path. Parent directories are created. Throws IoError.
void write_atomic(const std::string &path, const std::string &content);

/// Indented JSON with every double in 17 significant digits.
std::string dump_json(const nlohmann::json &j);

/// Rows of numbers in 12 significant digits under a header line.
std::string csv_table(const std::vector<std::string> &header,
                      const std::vector<std::vector<double>> &rows);

std::string field_csv(const RadialField &u);

nlohmann::json ground_json(const GroundState &gs);
/// Scalars, regime, flags and history; fields go to CSV separately.
nlohmann::json solution_json(const SystemParams &params, const Solution &sol);
nlohmann::json params_json(const SystemParams &params);

}  // namespace nlsnorm
