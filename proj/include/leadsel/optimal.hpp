#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "leadsel/assignment.hpp"
#include "leadsel/combinatorics.hpp"
#include "leadsel/constraints.hpp"
#include "leadsel/instance.hpp"

namespace leadsel {

struct SolverOptions {
  SolveMode mode = SolveMode::relaxed;
  std::optional<Capacities> caps;
  /// Hard limit on regular UEs.
  std::size_t max_ues = 14;
};

struct OptimalSolution {
  Assignment assignment;
  Score utility;
  /// Leader-first-follower designations evaluated.
  BigInt configs_visited = 0;
  std::chrono::microseconds elapsed{0};
};

/// Exact maximizer of the joint leader-selection / follower-association ILP.
///
/// Enumerates every leader set of size k (candidates must have LII > rho,
/// 2k <= node count) and, for each, every injective designation of one
/// first follower per leader with LXI > 0. Remaining UEs join their best
/// leader (LXI > 0, lowest id on ties), or the residual capacitated
/// assignment is solved exactly when `caps` is set. Equal utilities resolve to
/// the lexicographically smallest (leaders, follower map).
///
/// Throws Infeasible (strict mode, no valid assignment) or LimitExceeded.
OptimalSolution solve_exhaustive(const Instance& inst, Threshold rho, const SolverOptions& opts = {});

nlohmann::json to_json(const OptimalSolution& s);

/// Total order used to break utility ties: leaders lexicographically, then the
/// per-UE leader vector (isolated sorts after every leader id).
bool tie_break_less(const Instance& inst, const Assignment& a, const Assignment& b);

namespace detail {

/// Residual capacitated completion: place `remaining` UEs on `leaders` with
/// spare capacity `spare` (parallel to `leaders`), maximizing summed LXI.
/// `assigned[i]` receives the leader for remaining[i] or nullopt (isolated).
/// Returns false if strict mode cannot place everyone.
struct ResidualResult {
  bool feasible = false;
  Score gain;
  std::vector<std::optional<UeId>> assigned;
};

ResidualResult assign_residual_enumerate(const Instance& inst, std::span<const UeId> remaining,
                                         std::span<const UeId> leaders, std::span<const std::size_t> spare,
                                         SolveMode mode);

ResidualResult assign_residual_flow(const Instance& inst, std::span<const UeId> remaining,
                                    std::span<const UeId> leaders, std::span<const std::size_t> spare, SolveMode mode);

}  // namespace detail

}  // namespace leadsel
