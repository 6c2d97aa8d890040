#include "rankone/io.hpp"

#include <charconv>
#include <fstream>

namespace rankone {

namespace {

Index to_index(const json& v, const char* what) {
  if (!v.is_number_integer()) throw Error(Errc::parse_error, std::string(what) + " must be an integer");
  const auto value = v.get<long long>();
  if (value < 0) throw Error(Errc::invalid_params, std::string(what) + " must be non-negative");
  return static_cast<Index>(value);
}

std::vector<Index> to_index_list(const json& v, const char* what) {
  if (!v.is_array()) throw Error(Errc::parse_error, std::string(what) + " must be a list of integers");
  std::vector<Index> out;
  out.reserve(v.size());
  for (const auto& item : v) out.push_back(to_index(item, what));
  return out;
}

Index parse_index(std::string_view text, std::string_view whole) {
  Index value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || text.empty()) {
    throw Error(Errc::parse_error, "bad level index in \"" + std::string(whole) + "\"");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

ConstructionParams params_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::parse_error, "config must be a JSON object");
  ConstructionParams p;
  for (const auto& [key, value] : doc.items()) {
    if (key == "h1") {
      p.h1 = to_index(value, "h1");
    } else if (key == "j_max") {
      p.j_max = static_cast<int>(to_index(value, "j_max"));
    } else if (key == "r_prime") {
      if (value.is_string()) {
        if (value.get<std::string>() != "j+1") throw Error(Errc::parse_error, "r_prime rule must be \"j+1\"");
        p.r_prime.reset();
      } else {
        p.r_prime = to_index_list(value, "r_prime");
      }
    } else if (key == "r") {
      p.cuts = to_index_list(value, "r");
    } else if (key == "spacers") {
      if (value.is_string()) {
        if (value.get<std::string>() != "paper") throw Error(Errc::parse_error, "spacers must be \"paper\" or a list");
        p.spacer_rule = SpacerRule::paper_preset;
      } else if (value.is_array()) {
        p.spacer_rule = SpacerRule::explicit_list;
        for (const auto& row : value) p.explicit_spacers.push_back(to_index_list(row, "spacers"));
      } else {
        throw Error(Errc::parse_error, "spacers must be \"paper\" or a list of lists");
      }
    } else if (key == "base_width") {
      if (!value.is_string()) throw Error(Errc::parse_error, "base_width must be a \"p/q\" string");
      p.base_width = parse_rational(value.get<std::string>());
    } else {
      throw Error(Errc::parse_error, "unknown config key \"" + key + "\"");
    }
  }
  return p;
}

ConstructionParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, std::string("config ") + path + ": " + e.what());
  }
  return params_from_json(doc);
}

json params_to_json(const ConstructionParams& params) {
  json doc;
  doc["h1"] = params.h1;
  doc["j_max"] = params.j_max;
  if (params.r_prime) doc["r_prime"] = *params.r_prime; else doc["r_prime"] = "j+1";
  if (params.cuts) doc["r"] = *params.cuts;
  if (params.spacer_rule == SpacerRule::paper_preset) {
    doc["spacers"] = "paper";
  } else {
    doc["spacers"] = params.explicit_spacers;
  }
  doc["base_width"] = to_string(params.base_width);
  return doc;
}

LevelSet parse_level_set(std::string_view text, const StageTable& table) {
  const std::string whole(text);
  std::optional<int> stage;
  std::optional<std::vector<LevelRange>> ranges;

  // Split off "stage=J" and keep everything after "levels=" intact.
  std::string_view rest = trim(text);
  while (!rest.empty()) {
    if (rest.starts_with("stage=")) {
      rest.remove_prefix(6);
      const auto comma = rest.find(',');
      const auto digits = trim(rest.substr(0, comma));
      stage = static_cast<int>(parse_index(digits, whole));
      rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    } else if (rest.starts_with("levels=")) {
      rest.remove_prefix(7);
      ranges.emplace();
      while (!rest.empty()) {
        if (rest.starts_with("stage=")) break;
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (item.empty()) continue;
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
          const Index x = parse_index(item, whole);
          ranges->push_back({x, x + 1});
        } else {
          const Index lo = parse_index(trim(item.substr(0, dots)), whole);
          const Index hi = parse_index(trim(item.substr(dots + 2)), whole);
          if (hi < lo) throw Error(Errc::parse_error, "empty range in \"" + whole + "\"");
          ranges->push_back({lo, hi + 1});
        }
      }
    } else {
      throw Error(Errc::parse_error, "bad set syntax \"" + whole + "\" (expected stage=J,levels=a..b,c)");
    }
  }
  if (!stage) throw Error(Errc::parse_error, "set \"" + whole + "\" has no stage=");
  table.stage(*stage);
  LevelSet set = ranges ? LevelSet(*stage, std::move(*ranges)) : LevelSet::full_tower(table, *stage);
  set.validate(table);
  return set;
}

json level_set_to_json(const LevelSet& set) {
  json ranges = json::array();
  for (const auto& r : set.ranges()) ranges.push_back({r.lo, r.hi - 1});
  return {{"stage", set.stage()}, {"ranges", ranges}};
}

LevelSet level_set_from_json(const json& doc) {
  const int stage = static_cast<int>(to_index(doc.at("stage"), "stage"));
  std::vector<LevelRange> ranges;
  for (const auto& r : doc.at("ranges")) {
    const auto bounds = to_index_list(r, "range");
    if (bounds.size() != 2 || bounds[1] < bounds[0]) throw Error(Errc::parse_error, "range must be [lo, hi]");
    ranges.push_back({bounds[0], bounds[1] + 1});
  }
  return LevelSet(stage, std::move(ranges));
}

json corr_to_json(const CorrBound& bound) {
  return {{"lo", to_string(bound.lo)},
          {"hi", to_string(bound.hi)},
          {"depth", bound.depth},
          {"unresolved", to_string(bound.unresolved)}};
}

json stage_table_to_json(const StageTable& table) {
  json rows = json::array();
  for (const Stage& s : table) {
    json row{{"stage", s.index},
             {"h", s.height},
             {"w", to_string(s.width)},
             {"m", to_string(s.measure)}};
    if (s.has_cut_data()) {
      row["r"] = s.cuts;
      row["s"] = s.spacers;
      row["spacer_total"] = s.spacer_total();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string out = "\"";
  for (char ch : value) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  out += "\r\n";
  return out;
}

}  // namespace rankone
