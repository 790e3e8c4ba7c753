#include <algorithm>

#include "leadsel/errors.hpp"
#include "leadsel/protocol.hpp"
#include "leadsel/rng.hpp"

namespace leadsel {

LeaderPartition partition(const Instance& inst, Threshold rho) {
  LeaderPartition p;
  for (UeId id : inst.ues()) (rho.admits(inst.lii(id)) ? p.leaders : p.followers).push_back(id);
  return p;
}

std::optional<UeId> choose_leader(UeId m, const std::set<UeId>& candidates, const Instance& inst) {
  if (candidates.contains(m)) throw InvalidArgument("choose_leader: UE cannot choose itself");
  std::optional<UeId> best;
  Score best_li;
  for (UeId n : candidates) {  // ascending, so strict '>' keeps the lowest id on ties
    if (inst.lxi(m, n) <= Score(0)) continue;
    const Score li = li_score(inst, m, n);
    if (!best || li > best_li) {
      best = n;
      best_li = li;
    }
  }
  return best;
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::none: return "none";
    case Scenario::scenario1: return "scenario1";
    case Scenario::scenario2: return "scenario2";
    case Scenario::scenario3: return "scenario3";
  }
  return "?";
}

Scenario classify_scenario(const Instance& inst, Threshold rho) {
  const LeaderPartition p = partition(inst, rho);
  if (p.leaders.empty()) return Scenario::scenario3;
  if (p.followers.empty()) return Scenario::scenario1;
  for (UeId m : p.followers)
    for (UeId n : p.leaders)
      if (inst.lxi(m, n) > Score(0)) return Scenario::none;
  return Scenario::scenario2;
}

void MessageLog::record(Message m) {
  m.round = round;
  messages.push_back(std::move(m));
}

namespace {

class Engine {
 public:
  Engine(const Instance& inst, const ProtocolConfig& cfg, Rng& rng, MessageLog& log, AlgorithmRun& run)
      : inst_(inst), cfg_(cfg), rng_(rng), log_(log), run_(run), ues_(inst.ues()) {
    views_.resize(inst_.n() + 1);
    for (UeId id : ues_) views_[id] = local_view(inst_, id);
  }

  std::vector<Message> deliver(UeId id, const Event& e) {
    Transition t = on_event(std::move(run_.states[id]), e, cfg_, views_[id]);
    run_.states[id] = std::move(t.state);
    return std::move(t.emitted);
  }

  const LocalView& view(UeId id) const { return views_[id]; }

  std::vector<Message> broadcast_event(const Event& e) {
    std::vector<Message> out;
    for (UeId id : ues_) {
      auto emitted = deliver(id, e);
      out.insert(out.end(), std::make_move_iterator(emitted.begin()), std::make_move_iterator(emitted.end()));
    }
    return out;
  }

  /// Sends announcements; receivers never answer them directly.
  void announce_round(std::vector<Message> msgs) {
    if (msgs.empty()) return;
    ++log_.round;
    for (Message& m : msgs) {
      log_.record(m);
      const Event e = m;
      for (UeId r : ues_) {
        if (m.receiver ? r != *m.receiver : r == m.sender()) continue;
        if (!deliver(r, e).empty()) throw ProtocolViolation("announcement triggered an immediate reply");
      }
    }
  }

  /// Request/response rounds until no request is outstanding. `server`
  /// handles requests addressed to nodes outside the UE set (the edge server).
  template <typename Server>
  void request_rounds(std::vector<Message> requests, Server&& server) {
    while (!requests.empty()) {
      order(requests);
      ++log_.round;
      std::vector<Message> responses;
      for (Message& req : requests) {
        log_.record(req);
        const UeId to = *req.receiver;
        auto emitted = inst_.contains(to) && to != kEdgeServer ? deliver(to, req) : server(req);
        responses.insert(responses.end(), std::make_move_iterator(emitted.begin()),
                         std::make_move_iterator(emitted.end()));
      }
      ++log_.round;
      std::vector<Message> next;
      for (Message& resp : responses) {
        log_.record(resp);
        auto emitted = deliver(*resp.receiver, resp);
        next.insert(next.end(), std::make_move_iterator(emitted.begin()), std::make_move_iterator(emitted.end()));
      }
      requests = std::move(next);
    }
  }

  void request_rounds(std::vector<Message> requests) {
    request_rounds(std::move(requests), [](const Message&) -> std::vector<Message> {
      throw ProtocolViolation("request addressed to a node outside the protocol");
    });
  }

 private:
  void order(std::vector<Message>& requests) {
    if (cfg_.delivery == DeliveryOrder::ascending_id) {
      std::stable_sort(requests.begin(), requests.end(),
                       [](const Message& a, const Message& b) { return a.sender() < b.sender(); });
    } else {
      rng_.shuffle(std::span<Message>(requests));
    }
  }

  const Instance& inst_;
  const ProtocolConfig& cfg_;
  Rng& rng_;
  MessageLog& log_;
  AlgorithmRun& run_;
  std::vector<UeId> ues_;
  std::vector<LocalView> views_;
};

}  // namespace

AlgorithmRun run_algorithm(const Instance& inst, const ProtocolConfig& cfg, Rng& rng, MessageLog& log) {
  cfg.validate();
  AlgorithmRun run;
  run.states.resize(inst.n() + 1);
  Engine engine(inst, cfg, rng, log, run);
  for (UeId id : inst.ues()) {
    run.states[id] = initial_state(engine.view(id), cfg);
    if (run.states[id].role == Role::candidate_leader) ++run.leader_candidates;
  }

  // Phase 1: announcements, leader choice, requests/ACKs inside the window T.
  engine.announce_round(engine.broadcast_event(PhaseStart{Phase::one}));
  engine.request_rounds(engine.broadcast_event(AnnouncementsClosed{Phase::one}));
  engine.broadcast_event(TimerExpired{Phase::one});

  // Phase 2: leaders with followers re-announce; isolated leaders follow.
  engine.announce_round(engine.broadcast_event(PhaseStart{Phase::two}));
  engine.request_rounds(engine.broadcast_event(AnnouncementsClosed{Phase::two}));
  engine.broadcast_event(TimerExpired{Phase::two});
  return run;
}

Assignment collect_assignment(const Instance& inst, const AlgorithmRun& run, const std::set<UeId>& edge_followers) {
  Assignment a;
  if (!edge_followers.empty()) a.leaders.push_back(kEdgeServer);
  for (UeId id : inst.ues()) {
    const NodeState& s = run.states[id];
    if (s.role == Role::leader_with_followers)
      a.leaders.push_back(id);
    else if (s.role == Role::assigned_follower && s.leader)
      a.follows[id] = *s.leader;
    else
      a.isolated.push_back(id);
  }
  a.normalize();
  return a;
}

std::string_view to_string(FallbackStatus s) {
  switch (s) {
    case FallbackStatus::not_needed: return "not_needed";
    case FallbackStatus::resolved: return "resolved";
    case FallbackStatus::partially_resolved: return "partially_resolved";
    case FallbackStatus::edge_server_unavailable: return "edge_server_unavailable";
  }
  return "?";
}

FallbackResult run_fallback_process(const Instance& inst, const ProtocolConfig& cfg, Scenario scenario,
                                    AlgorithmRun& run, Rng& rng, MessageLog& log) {
  FallbackResult res{inst, FallbackStatus::not_needed, false, false, {}, {}};

  // Nobody willing to lead: try the incentive first, then rerun both phases.
  if (scenario == Scenario::scenario3) {
    if (const auto* boost = std::get_if<BoostIncentive>(&cfg.incentive)) {
      std::vector<Score> lii(inst.n() + 1);
      std::vector<std::vector<Score>> lxi(inst.n() + 1);
      for (UeId id = 0; id <= inst.n(); ++id) {
        lii[id] = inst.lii(id);
        lxi[id] = inst.lxi_row(id);
      }
      for (UeId id : inst.ues()) {
        if (!rng.bernoulli(boost->accept_prob)) continue;
        lii[id] = std::min(kMaxScore, lii[id] + boost->delta);
        res.incentivized.push_back(id);
      }
      Instance boosted(inst.n(), std::move(lii), std::move(lxi), inst.has_edge_server());
      if (!partition(boosted, cfg.rho).leaders.empty()) {
        res.effective = boosted;
        res.incentive_rerun = true;
        run = run_algorithm(res.effective, cfg, rng, log);
      }
    }
  }

  std::vector<UeId> unresolved;
  bool any_isolated = false;
  for (UeId id : inst.ues()) {
    if (run.states[id].awaiting_fallback) unresolved.push_back(id);
    if (run.states[id].role == Role::isolated) any_isolated = true;
  }

  if (unresolved.empty()) {
    if (!cfg.edge_server_enabled && (any_isolated || (scenario != Scenario::none && !res.incentive_rerun)))
      res.status = FallbackStatus::edge_server_unavailable;
    else if (res.incentive_rerun)
      res.status = FallbackStatus::resolved;
    return res;
  }

  if (!res.effective.has_edge_server())
    res.effective = attach_edge_server(res.effective, cfg.edge_lii, std::vector<Score>(inst.n(), cfg.edge_lxi));
  const Instance& eff = res.effective;

  Engine engine(eff, cfg, rng, log, run);
  const Score lii0 = eff.lii(kEdgeServer);
  std::vector<Message> offers;
  if (cfg.transport == Transport::broadcast)
    offers.push_back({AnnounceLii{kEdgeServer, lii0}, Phase::fallback, Transport::broadcast, std::nullopt, 0});
  else
    for (UeId id : unresolved)
      offers.push_back({AnnounceLii{kEdgeServer, lii0}, Phase::fallback, Transport::p2p, id, 0});

  // Offers are answered by requests, so they go out as one explicit round.
  ++log.round;
  std::vector<Message> requests;
  for (Message& m : offers) {
    log.record(m);
    const Event e = m;
    std::vector<UeId> to = m.receiver ? std::vector<UeId>{*m.receiver} : eff.ues();
    for (UeId id : to) {
      auto emitted = engine.deliver(id, e);
      requests.insert(requests.end(), emitted.begin(), emitted.end());
    }
  }

  std::optional<std::size_t> spare;
  if (cfg.caps) spare = cfg.caps->limit(kEdgeServer);
  engine.request_rounds(std::move(requests), [&](const Message& req) -> std::vector<Message> {
    const auto& r = std::get<FollowRequest>(req.payload);
    if (spare && *spare == 0) return {{Nack{kEdgeServer, r.follower}, Phase::fallback, Transport::p2p, r.follower, 0}};
    if (spare) --*spare;
    res.edge_followers.insert(r.follower);
    return {{Ack{kEdgeServer, r.follower}, Phase::fallback, Transport::p2p, r.follower, 0}};
  });
  for (UeId id : unresolved) engine.deliver(id, TimerExpired{Phase::fallback});

  res.edge_server_used = !res.edge_followers.empty();
  res.status = res.edge_followers.size() == unresolved.size() ? FallbackStatus::resolved
                                                               : FallbackStatus::partially_resolved;
  return res;
}

}  // namespace leadsel
