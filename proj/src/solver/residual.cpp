// Exact residual completion for the capacitated exhaustive search.

#include <algorithm>
#include <deque>
#include <limits>

#include "leadsel/optimal.hpp"

namespace leadsel::detail {

namespace {

class ResidualEnumerator {
 public:
  ResidualEnumerator(const Instance& inst, std::span<const UeId> remaining, std::span<const UeId> leaders,
                     std::span<const std::size_t> spare, SolveMode mode)
      : inst_(inst), remaining_(remaining), leaders_(leaders), spare_(spare.begin(), spare.end()), mode_(mode) {
    // Optimistic per-UE gain for the bound.
    suffix_.assign(remaining_.size() + 1, Score(0));
    for (std::size_t i = remaining_.size(); i-- > 0;) {
      Score top = Score(0);
      for (UeId l : leaders_) top = std::max(top, inst_.lxi(remaining_[i], l));
      suffix_[i] = suffix_[i + 1] + top;
    }
    current_.assign(remaining_.size(), std::nullopt);
  }

  ResidualResult solve() {
    dfs(0, Score(0));
    return best_;
  }

 private:
  // Choices are tried in ascending leader id, isolation last, and only strict
  // improvements replace the incumbent, so ties keep the smallest target vector.
  void dfs(std::size_t i, Score gain) {
    if (best_.feasible && gain + suffix_[i] <= best_.gain) return;
    if (i == remaining_.size()) {
      best_.feasible = true;
      best_.gain = gain;
      best_.assigned = current_;
      return;
    }
    const UeId m = remaining_[i];
    for (std::size_t j = 0; j < leaders_.size(); ++j) {
      const Score x = inst_.lxi(m, leaders_[j]);
      if (x <= Score(0) || spare_[j] == 0) continue;
      --spare_[j];
      current_[i] = leaders_[j];
      dfs(i + 1, gain + x);
      ++spare_[j];
    }
    if (mode_ == SolveMode::relaxed) {
      current_[i] = std::nullopt;
      dfs(i + 1, gain);
    }
  }

  const Instance& inst_;
  std::span<const UeId> remaining_;
  std::span<const UeId> leaders_;
  std::vector<std::size_t> spare_;
  SolveMode mode_;
  std::vector<Score> suffix_;
  std::vector<std::optional<UeId>> current_;
  ResidualResult best_;
};

// Successive shortest paths on a unit-supply network; costs are negated LXI
// micro-units so the min-cost flow maximizes the total LXI.
class MinCostFlow {
 public:
  explicit MinCostFlow(std::size_t nodes) : adj_(nodes) {}

  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t cap, std::int64_t cost) {
    adj_[from].push_back(edges_.size());
    edges_.push_back({to, cap, cost});
    adj_[to].push_back(edges_.size());
    edges_.push_back({from, 0, -cost});
    return edges_.size() - 2;
  }

  /// Pushes up to `want` units; returns (flow, cost).
  std::pair<std::int64_t, std::int64_t> run(std::size_t s, std::size_t t, std::int64_t want) {
    constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
    std::int64_t flow = 0, cost = 0;
    const std::size_t n = adj_.size();
    while (flow < want) {
      std::vector<std::int64_t> dist(n, kInf);
      std::vector<std::size_t> via(n, std::numeric_limits<std::size_t>::max());
      std::vector<bool> queued(n, false);
      std::deque<std::size_t> queue{s};
      dist[s] = 0;
      queued[s] = true;
      while (!queue.empty()) {
        std::size_t u = queue.front();
        queue.pop_front();
        queued[u] = false;
        for (std::size_t e : adj_[u]) {
          const Edge& ed = edges_[e];
          if (ed.cap > 0 && dist[u] + ed.cost < dist[ed.to]) {
            dist[ed.to] = dist[u] + ed.cost;
            via[ed.to] = e;
            if (!queued[ed.to]) {
              queued[ed.to] = true;
              queue.push_back(ed.to);
            }
          }
        }
      }
      if (dist[t] == kInf) break;
      std::int64_t push = want - flow;
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) push = std::min(push, edges_[via[v]].cap);
      for (std::size_t v = t; v != s; v = edges_[via[v] ^ 1].to) {
        edges_[via[v]].cap -= push;
        edges_[via[v] ^ 1].cap += push;
      }
      flow += push;
      cost += push * dist[t];
    }
    return {flow, cost};
  }

  std::int64_t residual(std::size_t edge) const { return edges_[edge].cap; }

 private:
  struct Edge {
    std::size_t to;
    std::int64_t cap;
    std::int64_t cost;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Edge> edges_;
};

}  // namespace

ResidualResult assign_residual_enumerate(const Instance& inst, std::span<const UeId> remaining,
                                         std::span<const UeId> leaders, std::span<const std::size_t> spare,
                                         SolveMode mode) {
  return ResidualEnumerator(inst, remaining, leaders, spare, mode).solve();
}

ResidualResult assign_residual_flow(const Instance& inst, std::span<const UeId> remaining,
                                    std::span<const UeId> leaders, std::span<const std::size_t> spare,
                                    SolveMode mode) {
  const std::size_t m = remaining.size(), k = leaders.size();
  const std::size_t source = 0, sink = m + k + 1;
  MinCostFlow g(m + k + 2);
  struct Arc {
    std::size_t edge, follower, leader;
  };
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < m; ++i) {
    g.add_edge(source, 1 + i, 1, 0);
    for (std::size_t j = 0; j < k; ++j) {
      const Score x = inst.lxi(remaining[i], leaders[j]);
      if (x > Score(0)) arcs.push_back({g.add_edge(1 + i, 1 + m + j, 1, -x.units()), i, j});
    }
    if (mode == SolveMode::relaxed) g.add_edge(1 + i, sink, 1, 0);
  }
  for (std::size_t j = 0; j < k; ++j) {
    const auto cap = spare[j] > m ? static_cast<std::int64_t>(m) : static_cast<std::int64_t>(spare[j]);
    g.add_edge(1 + m + j, sink, cap, 0);
  }
  auto [flow, cost] = g.run(source, sink, static_cast<std::int64_t>(m));

  ResidualResult r;
  if (flow < static_cast<std::int64_t>(m)) return r;
  r.feasible = true;
  r.gain = Score::from_units(-cost);
  r.assigned.assign(m, std::nullopt);
  for (const Arc& a : arcs)
    if (g.residual(a.edge) == 0) r.assigned[a.follower] = leaders[a.leader];
  return r;
}

}  // namespace leadsel::detail
