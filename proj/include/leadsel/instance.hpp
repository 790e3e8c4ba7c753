#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "leadsel/score.hpp"

namespace leadsel {

/// Node identifier. Regular UEs are 1..N; 0 is the edge server when present.
using UeId = std::uint32_t;

inline constexpr UeId kEdgeServer = 0;

/// N UEs with their leader internal index (LII) and the directed leader
/// external index matrix (LXI). Immutable once built.
///
/// Storage always reserves slot 0; without an edge server it is all zeros and
/// never reported as a node.
class Instance {
 public:
  /// `lii` and `lxi` are indexed by node id and must have N+1 slots.
  /// Throws InvalidInstance when an invariant is violated.
  Instance(std::size_t n, std::vector<Score> lii, std::vector<std::vector<Score>> lxi, bool has_edge_server);

  /// Convenience for hand-written instances: `lii[i]` and `lxi[i][j]` refer to
  /// UE i+1 and UE j+1. No edge server.
  static Instance from_rows(const std::vector<Score>& lii, const std::vector<std::vector<Score>>& lxi);

  std::size_t n() const { return n_; }
  bool has_edge_server() const { return has_edge_server_; }
  std::size_t node_count() const { return n_ + (has_edge_server_ ? 1 : 0); }

  bool contains(UeId id) const { return (id >= 1 && id <= n_) || (id == kEdgeServer && has_edge_server_); }

  Score lii(UeId id) const { return lii_[id]; }
  Score lxi(UeId from, UeId to) const { return lxi_[from * stride() + to]; }

  /// Regular UEs 1..N in ascending order.
  std::vector<UeId> ues() const;
  /// All nodes, edge server first when present.
  std::vector<UeId> nodes() const;

  /// LXI row of `from`, indexed by target node id (N+1 entries).
  std::vector<Score> lxi_row(UeId from) const;

  friend bool operator==(const Instance&, const Instance&) = default;

 private:
  std::size_t stride() const { return n_ + 1; }

  std::size_t n_;
  bool has_edge_server_;
  std::vector<Score> lii_;
  std::vector<Score> lxi_;
};

struct EdgeServerSpec {
  Score lii0 = 10;
  /// One entry per regular UE: LXI_{m,0} for m = 1..N.
  std::vector<Score> lxi_to_edge;
};

/// Uniform integer instance over {0..10}, diagonal forced to zero.
///
/// Draw order (pinned for reproducibility): LII_1..LII_N, then LXI row-major
/// over (m, n) with m != n, all from one Rng seeded with `seed`.
Instance generate_instance(std::size_t n, std::uint64_t seed, const std::optional<EdgeServerSpec>& edge = std::nullopt);

/// Adds node 0 with LII_0 = lii0, LXI_{0,n} = 0 and LXI_{m,0} = lxi_to_edge[m-1].
Instance attach_edge_server(const Instance& inst, Score lii0, const std::vector<Score>& lxi_to_edge);

/// LI_{m,n} = LII_n + LXI_{m,n}. Throws InvalidArgument when m == n.
Score li_score(const Instance& inst, UeId m, UeId n);

}  // namespace leadsel
