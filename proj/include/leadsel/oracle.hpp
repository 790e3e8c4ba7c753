#pragma once

#include <optional>

#include "leadsel/assignment.hpp"
#include "leadsel/constraints.hpp"
#include "leadsel/instance.hpp"

namespace leadsel::oracle {

inline constexpr std::size_t kMaxOracleUes = 7;

struct OracleResult {
  Assignment assignment;
  Score utility;
  std::uint64_t assignments_checked = 0;
};

/// Enumerates every role vector directly (each UE: leader, isolated, or
/// follower of some other node; the edge server: leader or unused), keeps
/// those that pass check_constraints with the LXI > 0 rule, and returns the
/// best by utility. Shares nothing with the exhaustive search beyond the core
/// model. Throws Infeasible or LimitExceeded (N > 7).
OracleResult brute_force_oracle(const Instance& inst, Threshold rho, const std::optional<Capacities>& caps,
                                SolveMode mode);

/// Number of assignments that satisfy C1-C3 in strict mode, optionally ignoring
/// the LXI > 0 rule. Used to validate the configuration-count formula.
std::uint64_t count_valid_assignments(const Instance& inst, Threshold rho, bool require_positive_lxi);

}  // namespace leadsel::oracle
