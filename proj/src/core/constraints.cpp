#include "leadsel/constraints.hpp"

#include <string>

#include "leadsel/errors.hpp"

namespace leadsel {

std::string_view to_string(ConstraintId id) {
  switch (id) {
    case ConstraintId::c1: return "C1";
    case ConstraintId::c2: return "C2";
    case ConstraintId::c3: return "C3";
    case ConstraintId::capacity: return "C2Lim";
    case ConstraintId::eligibility: return "LXI>0";
  }
  return "?";
}

ConstraintReport check_constraints(const Instance& inst, const Assignment& a, Threshold rho,
                                   const std::optional<Capacities>& caps, SolveMode mode) {
  const std::size_t slots = inst.n() + 1;
  auto require = [&](UeId id) {
    if (!inst.contains(id)) throw InvalidAssignment("check_constraints: node " + std::to_string(id) + " not in instance");
  };

  std::vector<int> is_leader(slots, 0), is_follower(slots, 0), is_isolated(slots, 0);
  std::vector<std::size_t> followers(slots, 0);
  for (UeId n : a.leaders) {
    require(n);
    ++is_leader[n];
  }
  for (const auto& [m, n] : a.follows) {
    require(m);
    require(n);
    ++is_follower[m];
    ++followers[n];
  }
  for (UeId id : a.isolated) {
    require(id);
    ++is_isolated[id];
  }

  ConstraintReport r;
  auto violate = [&](ConstraintId c, UeId id) { r.violators.emplace_back(c, id); };

  // C1: one role per regular UE; isolation only counts against strict mode.
  for (UeId id : inst.ues()) {
    const int roles = is_leader[id] + is_follower[id] + is_isolated[id];
    if (is_isolated[id] > 0) r.isolated.push_back(id);
    if (roles != 1 || (mode == SolveMode::strict && is_isolated[id] > 0)) violate(ConstraintId::c1, id);
  }
  if (inst.has_edge_server() && (is_follower[kEdgeServer] + is_isolated[kEdgeServer] > 0 || is_leader[kEdgeServer] > 1))
    violate(ConstraintId::c1, kEdgeServer);
  for (const auto& [m, n] : a.follows)
    if (m == n) violate(ConstraintId::c1, m);

  // C2: leaders need a follower; non-leaders may not have any.
  for (UeId id : inst.nodes()) {
    if (is_leader[id] > 0 && followers[id] == 0) violate(ConstraintId::c2, id);
    if (is_leader[id] == 0 && followers[id] > 0) violate(ConstraintId::c2, id);
  }

  // C3: strict LII > rho. Node 0 is exempt.
  for (UeId n : a.leaders)
    if (n != kEdgeServer && !rho.admits(inst.lii(n))) violate(ConstraintId::c3, n);

  if (caps) {
    for (UeId id : inst.nodes()) {
      auto lim = caps->limit(id);
      if (lim && followers[id] > *lim) violate(ConstraintId::capacity, id);
    }
  }

  for (const auto& [m, n] : a.follows)
    if (m != n && inst.lxi(m, n) <= Score(0)) violate(ConstraintId::eligibility, m);

  for (const auto& [c, id] : r.violators) {
    switch (c) {
      case ConstraintId::c1: r.c1_ok = false; break;
      case ConstraintId::c2: r.c2_ok = false; break;
      case ConstraintId::c3: r.c3_ok = false; break;
      case ConstraintId::capacity: r.capacity_ok = false; break;
      case ConstraintId::eligibility: r.eligibility_ok = false; break;
    }
  }
  return r;
}

FeasibilityReport feasibility_scan(const Instance& inst, Threshold rho) {
  FeasibilityReport r;
  r.case1 = true;
  for (UeId id : inst.nodes())
    if (inst.lii(id) > Score(0)) r.case1 = false;
  for (UeId m : inst.ues()) {
    if (rho.admits(inst.lii(m))) continue;
    bool has_leader = false;
    for (UeId n : inst.nodes())
      if (n != m && inst.lxi(m, n) > Score(0) && inst.lii(n) > Score(0)) has_leader = true;
    if (!has_leader) r.case2_isolated.push_back(m);
  }
  return r;
}

}  // namespace leadsel
