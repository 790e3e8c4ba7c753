#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "leadsel/assignment.hpp"
#include "leadsel/instance.hpp"
#include "leadsel/protocol.hpp"

namespace leadsel {

struct MessageCounts {
  /// [phase - 1][transport]
  std::array<std::array<std::size_t, 2>, 3> by_phase{};

  static MessageCounts tally(const std::vector<Message>& log);

  std::size_t phase_total(Phase p) const;
  std::size_t transport_total(Transport t) const;
  std::size_t total() const;
  /// Phases 1 and 2 only; the quantity bounded by 3N+L-2 / N(N+1)+L(L-1)-2.
  std::size_t algorithm_total() const;
};

struct EpisodeOutcome {
  /// Instance the assignment refers to; differs from the input only when the
  /// incentive boosted LIIs or the edge server was attached.
  Instance effective;
  Assignment assignment;
  Score utility;
  std::vector<Message> messages;
  MessageCounts counts;
  Scenario scenario = Scenario::none;
  FallbackStatus fallback = FallbackStatus::not_needed;
  bool edge_server_used = false;
  bool incentive_rerun = false;
  std::vector<UeId> incentivized{};
  std::size_t rounds = 0;
  /// |L| at phase 1.
  std::size_t leader_candidates = 0;
  /// Centralized reference: N reports plus one configuration broadcast.
  std::size_t centralized_messages = 0;
  bool capacitated = false;
};

/// Both phases plus the fallback process, from one seeded stream.
EpisodeOutcome run_episode(const Instance& inst, const ProtocolConfig& cfg, std::uint64_t seed);

std::size_t message_bound(std::size_t n, std::size_t l, Transport t);

/// True iff the two-phase message total stays within the bound for `t`.
bool check_message_bounds(const EpisodeOutcome& outcome, std::size_t n, std::size_t l, Transport t);

/// Outcome summary (the message log is written separately).
nlohmann::json to_json(const EpisodeOutcome& o);

/// One JSON object per line.
void write_message_log(const std::vector<Message>& log, std::ostream& out);

}  // namespace leadsel
