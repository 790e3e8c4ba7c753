#include "leadsel/assignment.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "leadsel/errors.hpp"

namespace leadsel {

bool Assignment::is_leader(UeId id) const { return std::binary_search(leaders.begin(), leaders.end(), id); }

std::optional<UeId> Assignment::leader_of(UeId follower) const {
  auto it = follows.find(follower);
  if (it == follows.end()) return std::nullopt;
  return it->second;
}

std::size_t Assignment::follower_count(UeId leader) const {
  return static_cast<std::size_t>(
      std::count_if(follows.begin(), follows.end(), [leader](const auto& kv) { return kv.second == leader; }));
}

void Assignment::normalize() {
  std::sort(leaders.begin(), leaders.end());
  std::sort(isolated.begin(), isolated.end());
}

Assignment all_isolated(const Instance& inst) {
  Assignment a;
  a.isolated = inst.ues();
  return a;
}

void validate_structure(const Instance& inst, const Assignment& a) {
  auto check_id = [&](UeId id, const char* where) {
    if (!inst.contains(id)) throw InvalidAssignment(std::string(where) + ": node " + std::to_string(id) + " not in instance");
  };
  std::set<UeId> seen;
  auto claim = [&](UeId id, const char* where) {
    check_id(id, where);
    if (!seen.insert(id).second)
      throw InvalidAssignment(std::string(where) + ": node " + std::to_string(id) + " has more than one role");
  };
  for (UeId id : a.leaders) claim(id, "leaders");
  for (const auto& [m, n] : a.follows) {
    claim(m, "follows");
    check_id(n, "follows target");
    if (m == n) throw InvalidAssignment("follows: node " + std::to_string(m) + " follows itself");
    if (m == kEdgeServer) throw InvalidAssignment("follows: the edge server never follows");
  }
  for (UeId id : a.isolated) {
    claim(id, "isolated");
    if (id == kEdgeServer) throw InvalidAssignment("isolated: the edge server is never isolated");
  }
  for (UeId id : inst.ues())
    if (!seen.contains(id)) throw InvalidAssignment("UE " + std::to_string(id) + " has no role");
}

Score utility(const Instance& inst, const Assignment& a) {
  Score total;
  for (UeId n : a.leaders) {
    if (!inst.contains(n)) throw InvalidAssignment("utility: leader " + std::to_string(n) + " not in instance");
    total += inst.lii(n);
  }
  for (const auto& [m, n] : a.follows) {
    if (!inst.contains(m) || !inst.contains(n) || m == n)
      throw InvalidAssignment("utility: follow edge " + std::to_string(m) + "->" + std::to_string(n) + " invalid");
    total += inst.lxi(m, n);
  }
  for (UeId id : a.isolated)
    if (!inst.contains(id)) throw InvalidAssignment("utility: isolated " + std::to_string(id) + " not in instance");
  return total;
}

Capacities Capacities::uniform(const Instance& inst, std::size_t limit) {
  Capacities caps;
  for (UeId id : inst.nodes()) caps.set(id, limit);
  return caps;
}

std::optional<std::size_t> Capacities::limit(UeId id) const {
  auto it = limits_.find(id);
  if (it == limits_.end()) return std::nullopt;
  return it->second;
}

}  // namespace leadsel
