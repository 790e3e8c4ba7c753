#include <doctest.h>

#include <sstream>

#include "leadsel/constraints.hpp"
#include "leadsel/episode.hpp"
#include "leadsel/errors.hpp"
#include "leadsel/optimal.hpp"
#include "leadsel/protocol.hpp"
#include "leadsel/rng.hpp"
#include "test_support.hpp"

using namespace leadsel;

namespace {

ProtocolConfig config(int rho, Transport t = Transport::broadcast) {
  ProtocolConfig c;
  c.rho = Threshold(Score(rho));
  c.transport = t;
  c.delivery = DeliveryOrder::ascending_id;
  return c;
}

std::vector<Message> step(NodeState& s, const Event& e, const ProtocolConfig& cfg, const LocalView& v) {
  Transition t = on_event(std::move(s), e, cfg, v);
  s = std::move(t.state);
  return std::move(t.emitted);
}

std::size_t count_kind(const std::vector<Message>& log, std::string_view kind, Phase phase) {
  std::size_t c = 0;
  for (const Message& m : log) c += (m.kind() == kind && m.phase == phase) ? 1 : 0;
  return c;
}

// UE 1 and UE 2 can lead at rho 5; both followers prefer UE 1.
Instance popular_leader() {
  return Instance::from_rows({9, 6, 1, 1}, {{0, 1, 1, 1}, {1, 0, 1, 1}, {5, 3, 0, 1}, {5, 2, 1, 0}});
}

}  // namespace

TEST_CASE("partition and choose_leader on instance A") {
  const Instance a = test::instance_a();
  const LeaderPartition p = partition(a, Threshold(Score(4)));
  CHECK(p.leaders == std::vector<UeId>{1, 3});
  CHECK(p.followers == std::vector<UeId>{2});
  CHECK(choose_leader(2, {1, 3}, a) == 1u);  // LI 13 vs 7
  CHECK_THROWS_AS(choose_leader(2, {2, 3}, a), InvalidArgument);
}

TEST_CASE("choose_leader ties go to the lower id and LXI 0 is refused") {
  // LI(3,1) = 4 + 2 = 6 = LI(3,2) = 2 + 4.
  const Instance tie = Instance::from_rows({4, 2, 0}, {{0, 1, 1}, {1, 0, 1}, {2, 4, 0}});
  CHECK(choose_leader(3, {1, 2}, tie) == 1u);
  const Instance refuse = Instance::from_rows({4, 2, 0}, {{0, 1, 1}, {1, 0, 1}, {0, 0, 0}});
  CHECK_FALSE(choose_leader(3, {1, 2}, refuse).has_value());
}

TEST_CASE("rank_leaders orders by LI then id") {
  LocalView v{5, 0, {0, 3, 1, 0, 2, 0}, {}};
  const auto r = rank_leaders(v, {{1, 4}, {2, 6}, {3, 9}, {4, 5}});
  REQUIRE(r.size() == 3);  // UE 3 has LXI 0
  CHECK(r[0] == LeaderOption{1, 7});
  CHECK(r[1] == LeaderOption{2, 7});
  CHECK(r[2] == LeaderOption{4, 7});
}

TEST_CASE("role transitions") {
  CHECK(transition_allowed(Role::candidate_leader, Role::leader_with_followers));
  CHECK(transition_allowed(Role::candidate_leader, Role::isolated_leader));
  CHECK(transition_allowed(Role::isolated_leader, Role::assigned_follower));
  CHECK(transition_allowed(Role::follower, Role::isolated));
  CHECK_FALSE(transition_allowed(Role::leader_with_followers, Role::assigned_follower));
  CHECK_FALSE(transition_allowed(Role::assigned_follower, Role::isolated));
  CHECK_FALSE(transition_allowed(Role::follower, Role::leader_with_followers));
  CHECK_FALSE(transition_allowed(Role::isolated, Role::follower));
}

TEST_CASE("phase 1 of instance A, one event at a time") {
  const Instance a = test::instance_a();
  const ProtocolConfig cfg = config(4);
  std::vector<LocalView> v;
  std::vector<NodeState> s;
  for (UeId id = 1; id <= 3; ++id) {
    v.push_back(local_view(a, id));
    s.push_back(initial_state(v.back(), cfg));
  }
  CHECK(s[0].role == Role::candidate_leader);
  CHECK(s[1].role == Role::follower);
  CHECK(s[2].role == Role::candidate_leader);

  std::vector<Message> ann;
  for (std::size_t i = 0; i < 3; ++i)
    for (auto& m : step(s[i], PhaseStart{Phase::one}, cfg, v[i])) ann.push_back(m);
  REQUIRE(ann.size() == 2);
  CHECK(ann[0].kind() == "announce_lii");
  CHECK_FALSE(ann[0].receiver.has_value());
  for (const Message& m : ann)
    for (std::size_t i = 0; i < 3; ++i)
      if (m.sender() != i + 1) CHECK(step(s[i], m, cfg, v[i]).empty());
  CHECK(s[1].known_liis.size() == 2);

  CHECK(step(s[0], AnnouncementsClosed{Phase::one}, cfg, v[0]).empty());
  const auto req = step(s[1], AnnouncementsClosed{Phase::one}, cfg, v[1]);
  REQUIRE(req.size() == 1);
  CHECK(std::get<FollowRequest>(req[0].payload).leader == 1);
  CHECK(req[0].transport == Transport::p2p);
  CHECK(s[1].leader_candidates == std::vector<LeaderOption>{{1, 13}, {3, 7}});

  const auto ack = step(s[0], req[0], cfg, v[0]);
  REQUIRE(ack.size() == 1);
  CHECK(ack[0].kind() == "ack");
  CHECK(step(s[1], ack[0], cfg, v[1]).empty());
  CHECK(s[1].role == Role::assigned_follower);
  CHECK(s[1].leader == 1u);

  for (std::size_t i = 0; i < 3; ++i) step(s[i], TimerExpired{Phase::one}, cfg, v[i]);
  CHECK(s[0].role == Role::leader_with_followers);
  CHECK(s[0].followers == std::set<UeId>{2});
  CHECK(s[2].role == Role::isolated_leader);
}

TEST_CASE("illegal events raise ProtocolViolation") {
  const Instance a = test::instance_a();
  const ProtocolConfig cfg = config(4);
  const LocalView v2 = local_view(a, 2);
  NodeState follower = initial_state(v2, cfg);
  CHECK_THROWS_AS(on_event(follower, Message{Ack{1, 2}, Phase::one, Transport::p2p, 2, 0}, cfg, v2),
                  ProtocolViolation);
  CHECK_THROWS_AS(on_event(follower, Message{FollowRequest{3, 2}, Phase::one, Transport::p2p, 2, 0}, cfg, v2),
                  ProtocolViolation);
  CHECK_THROWS_AS(on_event(follower, Message{Ack{1, 3}, Phase::one, Transport::p2p, 3, 0}, cfg, v2),
                  ProtocolViolation);
  const LocalView v1 = local_view(a, 1);
  NodeState candidate = initial_state(v1, cfg);
  CHECK_THROWS_AS(on_event(candidate, PhaseStart{Phase::two}, cfg, v1), ProtocolViolation);
}

TEST_CASE("instance A episode, broadcast") {
  const EpisodeOutcome o = run_episode(test::instance_a(), config(4), 1);
  CHECK(o.utility == Score(17));
  CHECK(o.assignment.leaders == std::vector<UeId>{1});
  CHECK(o.assignment.follows == std::map<UeId, UeId>{{2, 1}, {3, 1}});
  CHECK(o.scenario == Scenario::none);
  CHECK(o.fallback == FallbackStatus::not_needed);
  CHECK(o.leader_candidates == 2);
  CHECK(o.counts.phase_total(Phase::one) == 4);  // 2 announcements, request, ACK
  CHECK(o.counts.phase_total(Phase::two) == 3);  // re-announcement, request, ACK
  CHECK(o.counts.algorithm_total() == 7);
  CHECK(message_bound(3, 2, Transport::broadcast) == 9);
  CHECK(check_message_bounds(o, 3, 2, Transport::broadcast));
  CHECK(o.centralized_messages == 4);
  CHECK(count_kind(o.messages, "phase2_announce", Phase::two) == 1);
}

TEST_CASE("instance A episode, point-to-point") {
  const EpisodeOutcome o = run_episode(test::instance_a(), config(4, Transport::p2p), 1);
  CHECK(o.utility == Score(17));
  // Announcements go to each of the two other UEs; UE 1 re-announces only to UE 3.
  CHECK(count_kind(o.messages, "announce_lii", Phase::one) == 4);
  CHECK(count_kind(o.messages, "phase2_announce", Phase::two) == 1);
  CHECK(o.counts.algorithm_total() == 9);
  CHECK(message_bound(3, 2, Transport::p2p) == 12);
  CHECK(check_message_bounds(o, 3, 2, Transport::p2p));
}

TEST_CASE("message bound formulas") {
  CHECK(message_bound(10, 4, Transport::broadcast) == 32);
  CHECK(message_bound(10, 4, Transport::p2p) == 120);
  CHECK(message_bound(1, 0, Transport::broadcast) == 1);
  CHECK(message_bound(0, 0, Transport::broadcast) == 0);
}

TEST_CASE("capacity NACK sends the second follower to its next candidate") {
  ProtocolConfig cfg = config(5);
  const Instance inst = popular_leader();
  Capacities caps;
  caps.set(1, 1);
  cfg.caps = caps;
  const EpisodeOutcome o = run_episode(inst, cfg, 3);
  CHECK(o.assignment.follows == std::map<UeId, UeId>{{3, 1}, {4, 2}});  // UE 3 asks first
  CHECK(o.utility == Score(9 + 6 + 5 + 2));
  CHECK(count_kind(o.messages, "nack", Phase::one) == 1);
  CHECK(o.capacitated);

  cfg.delivery = DeliveryOrder::seeded_random;
  std::set<std::map<UeId, UeId>> outcomes;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const EpisodeOutcome r = run_episode(inst, cfg, seed);
    CHECK(r.assignment.follower_count(1) == 1);
    CHECK(check_constraints(inst, r.assignment, cfg.rho, cfg.caps).all_ok());
    outcomes.insert(r.assignment.follows);
  }
  CHECK(outcomes.size() == 2);  // either follower may win the race
}

TEST_CASE("NACK with no remaining candidate") {
  ProtocolConfig cfg = config(5);
  // Only UE 1 can lead; UE 3 and UE 4 refuse UE 2.
  const Instance inst = Instance::from_rows({9, 6, 1, 1}, {{0, 1, 1, 1}, {1, 0, 1, 1}, {5, 0, 0, 1}, {5, 0, 1, 0}});
  cfg.caps = Capacities::uniform(inst, 1);
  const EpisodeOutcome off = run_episode(inst, cfg, 3);
  CHECK(off.assignment.isolated == std::vector<UeId>{2, 4});
  CHECK(off.fallback == FallbackStatus::edge_server_unavailable);

  cfg.edge_server_enabled = true;
  const EpisodeOutcome on = run_episode(inst, cfg, 3);
  CHECK(on.assignment.leaders == std::vector<UeId>{0, 1});
  CHECK(on.assignment.leader_of(2) == 0u);
  CHECK(on.assignment.leader_of(4) == 0u);
  CHECK(on.edge_server_used);
}

TEST_CASE("scenario 1: every UE is a candidate") {
  const Instance a = test::instance_a();
  const EpisodeOutcome off = run_episode(a, config(1), 1);
  CHECK(off.scenario == Scenario::scenario1);
  CHECK(off.utility == Score(0));
  CHECK(off.assignment.leaders.empty());
  CHECK(off.assignment.isolated == std::vector<UeId>{1, 2, 3});
  CHECK(off.fallback == FallbackStatus::edge_server_unavailable);
  CHECK(off.counts.phase_total(Phase::two) == 0);

  ProtocolConfig cfg = config(1);
  cfg.edge_server_enabled = true;
  const EpisodeOutcome on = run_episode(a, cfg, 1);
  CHECK(on.assignment.leaders == std::vector<UeId>{0});
  CHECK(on.assignment.follows.size() == 3);
  CHECK(on.utility == Score(13));
  CHECK(on.fallback == FallbackStatus::resolved);
  CHECK(on.effective.has_edge_server());
  CHECK(on.counts.phase_total(Phase::fallback) == 7);  // offer, 3 requests, 3 ACKs
}

TEST_CASE("scenario 2: no follower accepts a candidate") {
  const Instance inst = Instance::from_rows({7, 2, 1}, {{0, 3, 8}, {0, 0, 2}, {0, 9, 0}});
  CHECK(classify_scenario(inst, Threshold(Score(4))) == Scenario::scenario2);
  const EpisodeOutcome off = run_episode(inst, config(4), 1);
  CHECK(off.scenario == Scenario::scenario2);
  CHECK(off.utility == Score(0));
  CHECK(off.assignment.isolated == std::vector<UeId>{1, 2, 3});

  ProtocolConfig cfg = config(4);
  cfg.edge_server_enabled = true;
  const EpisodeOutcome on = run_episode(inst, cfg, 1);
  CHECK(on.assignment.leaders == std::vector<UeId>{0});
  CHECK(on.assignment.follows == std::map<UeId, UeId>{{1, 0}, {2, 0}, {3, 0}});
  CHECK(on.utility == Score(13));
}

TEST_CASE("scenario 3 and infeasibility Case 1: nobody above rho") {
  const Instance zero = Instance::from_rows({0, 0, 0}, {{0, 3, 8}, {6, 0, 2}, {4, 9, 0}});
  CHECK(feasibility_scan(zero, Threshold(Score(0))).case1);
  const EpisodeOutcome off = run_episode(zero, config(0), 1);
  CHECK(off.scenario == Scenario::scenario3);
  CHECK(off.utility == Score(0));
  CHECK(off.assignment.isolated == std::vector<UeId>{1, 2, 3});
  CHECK(off.counts.algorithm_total() == 0);

  ProtocolConfig cfg = config(0);
  cfg.edge_server_enabled = true;
  const EpisodeOutcome on = run_episode(zero, cfg, 1);
  CHECK(on.assignment.leaders == std::vector<UeId>{0});
  CHECK(on.assignment.follows.size() == 3);
  CHECK(on.fallback == FallbackStatus::resolved);
}

TEST_CASE("scenario 3 incentive boosts LII and reruns both phases") {
  const Instance inst = Instance::from_rows({3, 0, 0}, {{0, 3, 8}, {6, 0, 2}, {4, 9, 0}});
  ProtocolConfig cfg = config(4);
  cfg.incentive = BoostIncentive{Score(2), 1.0};
  const EpisodeOutcome o = run_episode(inst, cfg, 1);
  CHECK(o.scenario == Scenario::scenario3);
  CHECK(o.incentive_rerun);
  CHECK(o.incentivized == std::vector<UeId>{1, 2, 3});
  CHECK(o.effective.lii(1) == Score(5));
  CHECK(o.assignment.leaders == std::vector<UeId>{1});
  CHECK(o.utility == Score(5 + 6 + 4));
  CHECK(o.fallback == FallbackStatus::resolved);
  CHECK(check_message_bounds(o, 3, o.leader_candidates, Transport::broadcast));

  cfg.incentive = BoostIncentive{Score(2), 0.0};
  const EpisodeOutcome none = run_episode(inst, cfg, 1);
  CHECK_FALSE(none.incentive_rerun);
  CHECK(none.utility == Score(0));
}

TEST_CASE("infeasibility Case 2: a UE that can neither lead nor follow") {
  // UE 3 refuses both candidates at rho 4.
  const Instance inst = Instance::from_rows({7, 2, 3}, {{0, 3, 8}, {6, 0, 2}, {0, 0, 0}});
  CHECK(feasibility_scan(inst, Threshold(Score(4))).case2_isolated == std::vector<UeId>{3});
  const EpisodeOutcome off = run_episode(inst, config(4), 1);
  CHECK(off.assignment.isolated == std::vector<UeId>{3});
  CHECK(off.fallback == FallbackStatus::edge_server_unavailable);

  ProtocolConfig cfg = config(4);
  cfg.edge_server_enabled = true;
  const EpisodeOutcome on = run_episode(inst, cfg, 1);
  CHECK(on.assignment.leader_of(3) == 0u);
  CHECK(on.assignment.leader_of(2) == 1u);
  CHECK(on.utility == Score(7 + 6 + 10 + 1));

  cfg.edge_lxi = Score(0);  // UE 3 refuses node 0 as well
  const EpisodeOutcome refused = run_episode(inst, cfg, 1);
  CHECK(refused.assignment.isolated == std::vector<UeId>{3});
  CHECK(refused.fallback == FallbackStatus::partially_resolved);
}

TEST_CASE("edge server capacity NACKs the overflow") {
  const Instance zero = Instance::from_rows({0, 0, 0}, {{0, 3, 8}, {6, 0, 2}, {4, 9, 0}});
  ProtocolConfig cfg = config(0, Transport::p2p);
  cfg.edge_server_enabled = true;
  Capacities caps;
  caps.set(0, 2);
  cfg.caps = caps;
  const EpisodeOutcome o = run_episode(zero, cfg, 1);
  CHECK(o.assignment.follower_count(0) == 2);
  CHECK(o.assignment.isolated == std::vector<UeId>{3});
  CHECK(o.fallback == FallbackStatus::partially_resolved);
  CHECK(count_kind(o.messages, "announce_lii", Phase::fallback) == 3);  // one offer per UE over p2p
  CHECK(count_kind(o.messages, "nack", Phase::fallback) == 1);
}

TEST_CASE("instance with its own edge server uses its LII and LXI") {
  const Instance e = attach_edge_server(Instance::from_rows({0, 0}, {{0, 1}, {1, 0}}), 4, {2, 0});
  ProtocolConfig cfg = config(0);
  cfg.edge_server_enabled = true;
  const EpisodeOutcome o = run_episode(e, cfg, 1);
  CHECK(o.assignment.follows == std::map<UeId, UeId>{{1, 0}});
  CHECK(o.assignment.isolated == std::vector<UeId>{2});
  CHECK(o.utility == Score(6));
}

TEST_CASE("episodes are deterministic per seed") {
  const Instance inst = generate_instance(10, 4);
  ProtocolConfig cfg = config(5);
  cfg.delivery = DeliveryOrder::seeded_random;
  const EpisodeOutcome a = run_episode(inst, cfg, 77);
  const EpisodeOutcome b = run_episode(inst, cfg, 77);
  CHECK(to_json(a) == to_json(b));
  std::ostringstream la, lb;
  write_message_log(a.messages, la);
  write_message_log(b.messages, lb);
  CHECK(la.str() == lb.str());
  CHECK_FALSE(la.str().empty());
}

TEST_CASE("message log lines carry phase, transport and round") {
  const EpisodeOutcome o = run_episode(test::instance_a(), config(4), 1);
  std::ostringstream out;
  write_message_log(o.messages, out);
  std::istringstream in(out.str());
  std::string line;
  std::size_t lines = 0, last_round = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    CHECK(j.contains("phase"));
    CHECK(j.contains("transport"));
    CHECK(j["round"].get<std::size_t>() >= last_round);
    last_round = j["round"].get<std::size_t>();
    ++lines;
  }
  CHECK(lines == o.messages.size());
  const auto first = nlohmann::json::parse(out.str().substr(0, out.str().find('\n')));
  CHECK(first["type"] == "announce_lii");
  CHECK(first["receiver"] == "all");
  CHECK(first["lii"] == 7);
}

TEST_CASE("protocol properties over random instances") {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const std::size_t n = seed % 2 ? 7 : 10;
    const Instance inst = generate_instance(n, derive_seed(4242, {seed}));
    const int rho = static_cast<int>(seed % 10);
    for (Transport t : {Transport::broadcast, Transport::p2p}) {
      ProtocolConfig cfg;
      cfg.rho = Threshold(Score(rho));
      cfg.transport = t;
      const EpisodeOutcome o = run_episode(inst, cfg, seed);
      CHECK(check_message_bounds(o, n, o.leader_candidates, t));
      CHECK(check_constraints(inst, o.assignment, cfg.rho).all_ok());
      CHECK(o.leader_candidates == partition(inst, cfg.rho).leaders.size());
      for (const Message& m : o.messages) {
        if (m.kind() == "follow_request" || m.kind() == "ack" || m.kind() == "nack") CHECK(m.transport == Transport::p2p);
        else CHECK(m.transport == t);
      }
    }
  }
}

TEST_CASE("capacitated episodes respect every limit") {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const Instance inst = generate_instance(8, seed);
    ProtocolConfig cfg;
    cfg.rho = Threshold(Score(static_cast<int>(seed % 8)));
    cfg.caps = Capacities::uniform(inst, 1 + seed % 3);
    cfg.edge_server_enabled = seed % 2 == 0;
    const EpisodeOutcome o = run_episode(inst, cfg, seed);
    CHECK(check_constraints(o.effective, o.assignment, cfg.rho, cfg.caps).all_ok());
  }
}

TEST_CASE("distributed utility never exceeds the optimum") {
  for (std::uint64_t seed = 0; seed < 150; ++seed) {
    const Instance inst = generate_instance(7, derive_seed(9, {seed}));
    const Score best = solve_exhaustive(inst, Threshold(Score(0))).utility;
    for (int rho = 0; rho <= 9; ++rho) {
      ProtocolConfig cfg;
      cfg.rho = Threshold(Score(rho));
      CHECK(run_episode(inst, cfg, seed).utility <= best);
    }
  }
}

TEST_CASE("transport names round-trip") {
  CHECK(parse_transport("p2p") == Transport::p2p);
  CHECK(parse_transport(to_string(Transport::broadcast)) == Transport::broadcast);
  CHECK_FALSE(parse_transport("radio").has_value());
  ProtocolConfig bad;
  bad.incentive = BoostIncentive{Score(2), 1.5};
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad.incentive = NoIncentive{};
  bad.edge_lii = Score(0);
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}
