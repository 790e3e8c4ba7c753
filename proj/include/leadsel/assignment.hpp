#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "leadsel/instance.hpp"
#include "leadsel/score.hpp"

namespace leadsel {

/// Leader selection (y_n) plus follower association (x_{m,n}).
///
/// `leaders` and `isolated` are kept sorted. x_{m,n} = 1 iff follows[m] == n.
/// Regular UEs are partitioned by leaders / follows keys / isolated; the edge
/// server is either a leader or absent from all three.
struct Assignment {
  std::vector<UeId> leaders;
  std::map<UeId, UeId> follows;
  std::vector<UeId> isolated;

  bool is_leader(UeId id) const;
  std::optional<UeId> leader_of(UeId follower) const;
  std::size_t follower_count(UeId leader) const;

  /// Sorts leaders and isolated.
  void normalize();

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

/// Everyone in `inst` isolated, no leaders.
Assignment all_isolated(const Instance& inst);

/// Throws InvalidAssignment unless `a` is a structurally valid partition for `inst`.
void validate_structure(const Instance& inst, const Assignment& a);

/// Sum of leader LIIs plus LXI of every follower edge.
/// Throws InvalidAssignment when `a` references nodes outside `inst`.
Score utility(const Instance& inst, const Assignment& a);

/// Per-node follower limits N_n^Lim; nodes without an entry are unlimited.
class Capacities {
 public:
  Capacities() = default;
  explicit Capacities(std::map<UeId, std::size_t> limits) : limits_(std::move(limits)) {}
  static Capacities uniform(const Instance& inst, std::size_t limit);

  std::optional<std::size_t> limit(UeId id) const;
  void set(UeId id, std::size_t limit) { limits_[id] = limit; }
  const std::map<UeId, std::size_t>& limits() const { return limits_; }

 private:
  std::map<UeId, std::size_t> limits_;
};

}  // namespace leadsel
