#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "leadsel/assignment.hpp"
#include "leadsel/instance.hpp"
#include "leadsel/score.hpp"

namespace leadsel {

enum class SolveMode { strict, relaxed };

enum class ConstraintId { c1, c2, c3, capacity, eligibility };

std::string_view to_string(ConstraintId id);

struct ConstraintReport {
  bool c1_ok = true;
  bool c2_ok = true;
  bool c3_ok = true;
  bool capacity_ok = true;
  /// Every follow edge has LXI_{m,n} > 0.
  bool eligibility_ok = true;
  std::vector<std::pair<ConstraintId, UeId>> violators;
  /// Isolated regular UEs (only a C1 violation in strict mode).
  std::vector<UeId> isolated;

  bool all_ok() const { return c1_ok && c2_ok && c3_ok && capacity_ok && eligibility_ok; }
};

/// Evaluates C1, C2, C3, the C2^Lim capacity bound and the LXI > 0 follow rule.
///
/// Never throws for assignments whose ids are inside `inst`; overlapping or
/// missing roles show up as C1 violators. The edge server is exempt from C1
/// and C3.
ConstraintReport check_constraints(const Instance& inst, const Assignment& a, Threshold rho,
                                   const std::optional<Capacities>& caps = std::nullopt,
                                   SolveMode mode = SolveMode::relaxed);

struct FeasibilityReport {
  /// No node has a positive LII.
  bool case1 = false;
  /// UEs that can neither lead (LII <= rho) nor follow anyone with a positive LII.
  std::vector<UeId> case2_isolated;
};

FeasibilityReport feasibility_scan(const Instance& inst, Threshold rho);

}  // namespace leadsel
