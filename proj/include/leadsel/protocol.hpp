#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "leadsel/assignment.hpp"
#include "leadsel/instance.hpp"
#include "leadsel/score.hpp"

namespace leadsel {

// ---------------------------------------------------------------------------
// Messages
// ---------------------------------------------------------------------------

/// Phase 3 carries the edge-server / incentive fallback traffic so that it
/// never counts against the two-phase message bounds.
enum class Phase : std::uint8_t { one = 1, two = 2, fallback = 3 };
enum class Transport : std::uint8_t { broadcast, p2p };

std::string_view to_string(Transport t);
std::optional<Transport> parse_transport(std::string_view s);

struct AnnounceLii {
  UeId sender;
  Score lii;
};
struct FollowRequest {
  UeId follower;
  UeId leader;
};
struct Ack {
  UeId leader;
  UeId follower;
};
struct Nack {
  UeId leader;
  UeId follower;
};
struct Phase2Announce {
  UeId sender;
  Score lii;
};

using Payload = std::variant<AnnounceLii, FollowRequest, Ack, Nack, Phase2Announce>;

struct Message {
  Payload payload;
  Phase phase = Phase::one;
  Transport transport = Transport::p2p;
  /// nullopt for a broadcast delivered to every other UE.
  std::optional<UeId> receiver;
  /// Stamped by the engine when the message is sent.
  std::size_t round = 0;

  UeId sender() const;
  std::string_view kind() const;
};

/// One JSON object per message: round, phase, transport, type and fields.
nlohmann::json to_json(const Message& m);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct NoIncentive {};
/// Each UE independently accepts with `accept_prob`; accepters add `delta` to
/// their LII (clipped to 10).
struct BoostIncentive {
  Score delta = 5;
  double accept_prob = 0.5;
};
using IncentivePolicy = std::variant<NoIncentive, BoostIncentive>;

enum class DeliveryOrder : std::uint8_t { seeded_random, ascending_id };

struct ProtocolConfig {
  Threshold rho;
  Transport transport = Transport::broadcast;
  std::optional<Capacities> caps;
  bool edge_server_enabled = false;
  /// Used when the instance has no node 0 of its own.
  Score edge_lii = 10;
  Score edge_lxi = 1;
  IncentivePolicy incentive = NoIncentive{};
  DeliveryOrder delivery = DeliveryOrder::seeded_random;

  /// Throws InvalidArgument on out-of-range fields.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Node state machine
// ---------------------------------------------------------------------------

enum class Role : std::uint8_t {
  candidate_leader,
  follower,
  leader_with_followers,
  isolated_leader,
  assigned_follower,
  isolated,
};

std::string_view to_string(Role r);
bool transition_allowed(Role from, Role to);

struct LeaderOption {
  UeId id;
  Score li;
  friend bool operator==(const LeaderOption&, const LeaderOption&) = default;
};

/// What a UE knows privately: its own LII, its LXI row and its peers' ids.
struct LocalView {
  UeId self;
  Score lii;
  /// Indexed by target node id.
  std::vector<Score> lxi_row;
  std::vector<UeId> peers;
};

LocalView local_view(const Instance& inst, UeId id);

struct NodeState {
  UeId id = 0;
  Role role = Role::follower;
  /// Phase-1 announcements heard.
  std::map<UeId, Score> known_liis;
  /// Phase-2 re-announcements heard.
  std::map<UeId, Score> reannounced;
  /// Remaining leader options, best first. The front is the pending target.
  std::vector<LeaderOption> leader_candidates;
  std::set<UeId> followers;
  std::optional<std::size_t> capacity_remaining;
  std::optional<UeId> pending_request;
  std::optional<UeId> leader;
  /// Candidates exhausted with the edge-server fallback enabled.
  bool awaiting_fallback = false;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

NodeState initial_state(const LocalView& view, const ProtocolConfig& cfg);

struct PhaseStart {
  Phase phase;
};
/// Closes the announcement window of a phase; nodes act on what they heard.
struct AnnouncementsClosed {
  Phase phase;
};
/// The timer T (end of a phase's request window).
struct TimerExpired {
  Phase phase;
};

using Event = std::variant<PhaseStart, AnnouncementsClosed, TimerExpired, Message>;

struct Transition {
  NodeState state;
  std::vector<Message> emitted;
};

/// Pure transition function of one UE. Throws ProtocolViolation on events the
/// current role/phase does not admit.
Transition on_event(NodeState state, const Event& event, const ProtocolConfig& cfg, const LocalView& view);

// ---------------------------------------------------------------------------
// Algorithm helpers
// ---------------------------------------------------------------------------

struct LeaderPartition {
  std::vector<UeId> leaders;    // LII > rho
  std::vector<UeId> followers;  // LII <= rho
};

/// Regular UEs only; the edge server is a fallback, never a candidate.
LeaderPartition partition(const Instance& inst, Threshold rho);

/// argmax over `candidates` of LI_{m,n}, restricted to LXI_{m,n} > 0; ties go
/// to the lowest id.
std::optional<UeId> choose_leader(UeId m, const std::set<UeId>& candidates, const Instance& inst);

/// Candidates with LXI > 0 ordered by LI descending, then id ascending.
std::vector<LeaderOption> rank_leaders(const LocalView& view, const std::map<UeId, Score>& announced);

enum class Scenario : std::uint8_t { none, scenario1, scenario2, scenario3 };

std::string_view to_string(Scenario s);

/// scenario3: no UE exceeds rho (all LII = 0 is the canonical case);
/// scenario1: every UE exceeds rho; scenario2: no follower accepts any
/// candidate leader.
Scenario classify_scenario(const Instance& inst, Threshold rho);

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

class Rng;

struct MessageLog {
  std::vector<Message> messages;
  std::size_t round = 0;

  void record(Message m);
};

/// States of every regular UE after phases 1 and 2 (index = UE id; slot 0 unused).
struct AlgorithmRun {
  std::vector<NodeState> states;
  std::size_t leader_candidates = 0;
};

/// Drives the node state machines through both phases with synchronous
/// rounds. Requests within a round are delivered in `cfg.delivery` order.
AlgorithmRun run_algorithm(const Instance& inst, const ProtocolConfig& cfg, Rng& rng, MessageLog& log);

/// Builds the assignment implied by final node roles. Node 0 leads iff it has followers.
Assignment collect_assignment(const Instance& inst, const AlgorithmRun& run, const std::set<UeId>& edge_followers);

enum class FallbackStatus : std::uint8_t {
  not_needed,
  resolved,                  // every unresolved UE reached the edge server or a rerun leader
  partially_resolved,        // some UEs rejected the edge server
  edge_server_unavailable,   // fallback reached with the policy disabled
};

std::string_view to_string(FallbackStatus s);

struct FallbackResult {
  /// Instance the final assignment refers to (boosted LIIs, node 0 attached).
  Instance effective;
  FallbackStatus status = FallbackStatus::not_needed;
  bool edge_server_used = false;
  bool incentive_rerun = false;
  std::vector<UeId> incentivized;
  std::set<UeId> edge_followers;
};

/// The edge-server / incentive process for marginal scenarios and for UEs left
/// without a leader after phase 2. May replace `run` with a rerun of the
/// two-phase algorithm on a boosted instance.
FallbackResult run_fallback_process(const Instance& inst, const ProtocolConfig& cfg, Scenario scenario,
                                    AlgorithmRun& run, Rng& rng, MessageLog& log);

}  // namespace leadsel
