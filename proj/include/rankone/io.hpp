#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "rankone/dynamics.hpp"

namespace rankone {

using json = nlohmann::json;

/// { "h1": int, "j_max": int, "r_prime": [int,...] | "j+1", "r": [int,...],
///   "spacers": "paper" | [[int,...],...], "base_width": "p/q" }
/// Missing keys take the defaults. Throws ParseError / InvalidParams.
ConstructionParams params_from_json(const json& doc);
ConstructionParams load_params(const std::string& path);
json params_to_json(const ConstructionParams& params);

/// "stage=J,levels=a..b,c,d" (ranges inclusive). "stage=J" alone is the full
/// stage-J tower; "stage=J,levels=" is empty.
LevelSet parse_level_set(std::string_view text, const StageTable& table);

/// {stage, ranges: [[lo, hi], ...]} with inclusive bounds.
json level_set_to_json(const LevelSet& set);
LevelSet level_set_from_json(const json& doc);

json corr_to_json(const CorrBound& bound);
json stage_table_to_json(const StageTable& table);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view value);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace rankone
