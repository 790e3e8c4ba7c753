#include "leadsel/instance_io.hpp"

#include <cerrno>
#include <fstream>
#include <sstream>
#include <system_error>

#include "leadsel/errors.hpp"

namespace leadsel {

using nlohmann::json;

json score_to_json(Score s) {
  if (s.is_integral()) return s.units() / Score::kScale;
  return s.to_double();
}

Score score_from_json(const json& j, const std::string& field) {
  if (j.is_number_integer()) {
    auto v = j.get<std::int64_t>();
    if (v < -1000 || v > 1000) throw InvalidInstance(field + ": value out of range");
    return Score(static_cast<int>(v));
  }
  if (j.is_number()) return Score::from_double(j.get<double>());
  throw InvalidInstance(field + ": expected a number");
}

json to_json(const Instance& inst) {
  json j;
  j["n"] = inst.n();
  j["edge_server"] = inst.has_edge_server();
  const auto nodes = inst.nodes();
  json lii = json::array();
  json lxi = json::array();
  for (UeId m : nodes) {
    lii.push_back(score_to_json(inst.lii(m)));
    json row = json::array();
    for (UeId n : nodes) row.push_back(score_to_json(inst.lxi(m, n)));
    lxi.push_back(std::move(row));
  }
  j["lii"] = std::move(lii);
  j["lxi"] = std::move(lxi);
  return j;
}

Instance instance_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInstance("instance: expected a JSON object");
  for (const char* key : {"n", "edge_server", "lii", "lxi"})
    if (!j.contains(key)) throw InvalidInstance(std::string("missing field '") + key + "'");
  if (!j["n"].is_number_integer() || j["n"].get<std::int64_t>() < 1) throw InvalidInstance("n: expected an integer >= 1");
  if (!j["edge_server"].is_boolean()) throw InvalidInstance("edge_server: expected a boolean");
  const auto n = j["n"].get<std::size_t>();
  const bool edge = j["edge_server"].get<bool>();
  const std::size_t count = n + (edge ? 1 : 0);
  const std::size_t offset = edge ? 0 : 1;

  const json& jl = j["lii"];
  const json& jx = j["lxi"];
  if (!jl.is_array() || jl.size() != count) throw InvalidInstance("lii: expected " + std::to_string(count) + " entries");
  if (!jx.is_array() || jx.size() != count) throw InvalidInstance("lxi: expected " + std::to_string(count) + " rows");

  std::vector<Score> lii(n + 1);
  std::vector<std::vector<Score>> lxi(n + 1, std::vector<Score>(n + 1));
  for (std::size_t i = 0; i < count; ++i) {
    lii[i + offset] = score_from_json(jl[i], "lii[" + std::to_string(i) + "]");
    const json& row = jx[i];
    if (!row.is_array() || row.size() != count)
      throw InvalidInstance("lxi[" + std::to_string(i) + "]: expected " + std::to_string(count) + " entries");
    for (std::size_t k = 0; k < count; ++k)
      lxi[i + offset][k + offset] = score_from_json(row[k], "lxi[" + std::to_string(i) + "][" + std::to_string(k) + "]");
  }
  return Instance(n, std::move(lii), std::move(lxi), edge);
}

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidInstance(std::string("parse error: ") + e.what());
  }
  return instance_from_json(j);
}

Instance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string(), std::error_code(errno, std::generic_category()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void save_instance(const Instance& inst, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::ios_base::failure("cannot write " + path.string());
  out << to_json(inst).dump(2) << '\n';
  if (!out) throw std::ios_base::failure("write failed for " + path.string());
}

json to_json(const Assignment& a) {
  json j;
  j["leaders"] = a.leaders;
  json follows = json::object();
  for (const auto& [m, n] : a.follows) follows[std::to_string(m)] = n;
  j["follows"] = std::move(follows);
  j["isolated"] = a.isolated;
  return j;
}

Capacities capacities_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("capacities: expected an object {\"id\": limit}");
  Capacities caps;
  for (const auto& [key, value] : j.items()) {
    std::size_t pos = 0;
    unsigned long id = 0;
    try {
      id = std::stoul(key, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != key.size() || key.empty()) throw InvalidArgument("capacities: key '" + key + "' is not a node id");
    if (!value.is_number_unsigned()) throw InvalidArgument("capacities[" + key + "]: expected a non-negative integer");
    caps.set(static_cast<UeId>(id), value.get<std::size_t>());
  }
  return caps;
}

Capacities load_capacities(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::ios_base::failure("cannot open " + path.string(), std::error_code(errno, std::generic_category()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("capacities parse error: ") + e.what());
  }
  return capacities_from_json(j);
}

}  // namespace leadsel
