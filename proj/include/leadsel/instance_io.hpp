#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "leadsel/assignment.hpp"
#include "leadsel/instance.hpp"

namespace leadsel {

/// {"n": int, "edge_server": bool, "lii": [...], "lxi": [[...]...]}.
/// With an edge server, node 0 comes first in `lii` and in both LXI axes.
nlohmann::json to_json(const Instance& inst);

/// Validates every Instance invariant; errors name the offending field,
/// parse errors carry the line and column.
Instance instance_from_json(const nlohmann::json& j);
Instance parse_instance(const std::string& text);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& inst, const std::filesystem::path& path);

nlohmann::json score_to_json(Score s);
Score score_from_json(const nlohmann::json& j, const std::string& field);

/// {"leaders": [...], "follows": {"m": n}, "isolated": [...]}.
nlohmann::json to_json(const Assignment& a);

/// Capacities file: {"<id>": limit, ...}.
Capacities capacities_from_json(const nlohmann::json& j);
Capacities load_capacities(const std::filesystem::path& path);

}  // namespace leadsel
