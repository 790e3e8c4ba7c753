#include <algorithm>
#include <string>

#include "leadsel/errors.hpp"
#include "leadsel/instance_io.hpp"
#include "leadsel/protocol.hpp"

namespace leadsel {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string describe(const NodeState& s) { return "UE " + std::to_string(s.id) + " (" + std::string(to_string(s.role)) + ")"; }

}  // namespace

std::string_view to_string(Transport t) { return t == Transport::broadcast ? "broadcast" : "p2p"; }

std::optional<Transport> parse_transport(std::string_view s) {
  if (s == "broadcast") return Transport::broadcast;
  if (s == "p2p") return Transport::p2p;
  return std::nullopt;
}

UeId Message::sender() const {
  return std::visit(overloaded{
                        [](const AnnounceLii& m) { return m.sender; },
                        [](const FollowRequest& m) { return m.follower; },
                        [](const Ack& m) { return m.leader; },
                        [](const Nack& m) { return m.leader; },
                        [](const Phase2Announce& m) { return m.sender; },
                    },
                    payload);
}

std::string_view Message::kind() const {
  return std::visit(overloaded{
                        [](const AnnounceLii&) { return std::string_view("announce_lii"); },
                        [](const FollowRequest&) { return std::string_view("follow_request"); },
                        [](const Ack&) { return std::string_view("ack"); },
                        [](const Nack&) { return std::string_view("nack"); },
                        [](const Phase2Announce&) { return std::string_view("phase2_announce"); },
                    },
                    payload);
}

nlohmann::json to_json(const Message& m) {
  nlohmann::json j;
  j["round"] = m.round;
  j["phase"] = static_cast<int>(m.phase);
  j["transport"] = to_string(m.transport);
  j["type"] = m.kind();
  j["sender"] = m.sender();
  j["receiver"] = m.receiver ? nlohmann::json(*m.receiver) : nlohmann::json("all");
  std::visit(overloaded{
                 [&](const AnnounceLii& p) { j["lii"] = score_to_json(p.lii); },
                 [&](const FollowRequest& p) { j["leader"] = p.leader; },
                 [&](const Ack& p) { j["follower"] = p.follower; },
                 [&](const Nack& p) { j["follower"] = p.follower; },
                 [&](const Phase2Announce& p) { j["lii"] = score_to_json(p.lii); },
             },
             m.payload);
  return j;
}

void ProtocolConfig::validate() const {
  if (!in_score_range(rho.value())) throw InvalidArgument("rho must lie in [0,10]");
  if (edge_lii <= Score(0) || !in_score_range(edge_lii)) throw InvalidArgument("edge server LII must lie in (0,10]");
  if (!in_score_range(edge_lxi)) throw InvalidArgument("edge server LXI must lie in [0,10]");
  if (const auto* b = std::get_if<BoostIncentive>(&incentive)) {
    if (!in_score_range(b->delta)) throw InvalidArgument("incentive delta must lie in [0,10]");
    if (!(b->accept_prob >= 0.0 && b->accept_prob <= 1.0)) throw InvalidArgument("incentive accept_prob must lie in [0,1]");
  }
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::candidate_leader: return "candidate_leader";
    case Role::follower: return "follower";
    case Role::leader_with_followers: return "leader_with_followers";
    case Role::isolated_leader: return "isolated_leader";
    case Role::assigned_follower: return "assigned_follower";
    case Role::isolated: return "isolated";
  }
  return "?";
}

bool transition_allowed(Role from, Role to) {
  if (from == to) return true;
  switch (from) {
    case Role::candidate_leader: return to == Role::leader_with_followers || to == Role::isolated_leader;
    case Role::isolated_leader:
    case Role::follower: return to == Role::assigned_follower || to == Role::isolated;
    default: return false;
  }
}

LocalView local_view(const Instance& inst, UeId id) {
  LocalView v{id, inst.lii(id), inst.lxi_row(id), {}};
  v.peers.reserve(inst.n());
  for (UeId peer : inst.ues())
    if (peer != id) v.peers.push_back(peer);
  return v;
}

NodeState initial_state(const LocalView& view, const ProtocolConfig& cfg) {
  NodeState s;
  s.id = view.self;
  s.role = cfg.rho.admits(view.lii) ? Role::candidate_leader : Role::follower;
  if (cfg.caps) s.capacity_remaining = cfg.caps->limit(view.self);
  return s;
}

std::vector<LeaderOption> rank_leaders(const LocalView& view, const std::map<UeId, Score>& announced) {
  std::vector<LeaderOption> out;
  for (const auto& [id, lii] : announced) {
    if (id == view.self || id >= view.lxi_row.size()) continue;
    const Score x = view.lxi_row[id];
    if (x > Score(0)) out.push_back({id, lii + x});
  }
  std::stable_sort(out.begin(), out.end(), [](const LeaderOption& a, const LeaderOption& b) {
    if (a.li != b.li) return a.li > b.li;
    return a.id < b.id;
  });
  return out;
}

Transition on_event(NodeState s, const Event& event, const ProtocolConfig& cfg, const LocalView& view) {
  std::vector<Message> out;

  auto violation = [&](const std::string& what) -> void { throw ProtocolViolation(describe(s) + ": " + what); };
  auto set_role = [&](Role to) {
    if (!transition_allowed(s.role, to))
      violation("illegal transition to " + std::string(to_string(to)));
    s.role = to;
  };
  auto announce = [&](Payload p, Phase phase, const std::vector<UeId>& recipients) {
    if (cfg.transport == Transport::broadcast) {
      out.push_back({p, phase, Transport::broadcast, std::nullopt, 0});
    } else {
      for (UeId r : recipients) out.push_back({p, phase, Transport::p2p, r, 0});
    }
  };
  auto exhausted = [&] {
    s.pending_request.reset();
    s.leader_candidates.clear();
    if (cfg.edge_server_enabled)
      s.awaiting_fallback = true;
    else
      set_role(Role::isolated);
  };
  auto request_front = [&](Phase phase) {
    if (s.leader_candidates.empty()) {
      exhausted();
      return;
    }
    const UeId target = s.leader_candidates.front().id;
    s.pending_request = target;
    out.push_back({FollowRequest{s.id, target}, phase, Transport::p2p, target, 0});
  };
  auto accept_request = [&](const FollowRequest& req, Phase phase) {
    if (s.capacity_remaining && *s.capacity_remaining == 0) {
      out.push_back({Nack{s.id, req.follower}, phase, Transport::p2p, req.follower, 0});
      return;
    }
    if (s.capacity_remaining) --*s.capacity_remaining;
    s.followers.insert(req.follower);
    out.push_back({Ack{s.id, req.follower}, phase, Transport::p2p, req.follower, 0});
  };

  std::visit(
      overloaded{
          [&](const PhaseStart& e) {
            switch (e.phase) {
              case Phase::one:
                if (s.role != Role::candidate_leader && s.role != Role::follower) violation("phase 1 already started");
                if (s.role == Role::candidate_leader) announce(AnnounceLii{s.id, view.lii}, Phase::one, view.peers);
                break;
              case Phase::two:
                if (s.role == Role::candidate_leader) violation("phase 2 before timer expiry");
                if (s.role == Role::leader_with_followers) {
                  std::vector<UeId> others;
                  for (const auto& [id, _] : s.known_liis) others.push_back(id);
                  announce(Phase2Announce{s.id, view.lii}, Phase::two, others);
                }
                break;
              case Phase::fallback: break;
            }
          },
          [&](const AnnouncementsClosed& e) {
            if (e.phase == Phase::one && s.role == Role::follower) {
              s.leader_candidates = rank_leaders(view, s.known_liis);
              request_front(Phase::one);
            } else if (e.phase == Phase::two && s.role == Role::isolated_leader) {
              s.leader_candidates = rank_leaders(view, s.reannounced);
              request_front(Phase::two);
            }
          },
          [&](const TimerExpired& e) {
            if (s.pending_request && e.phase != Phase::fallback) violation("request outstanding at timer expiry");
            if (e.phase == Phase::one && s.role == Role::candidate_leader)
              set_role(s.followers.empty() ? Role::isolated_leader : Role::leader_with_followers);
            if (e.phase == Phase::fallback && s.awaiting_fallback) {
              s.awaiting_fallback = false;
              s.pending_request.reset();
              set_role(Role::isolated);
            }
          },
          [&](const Message& m) {
            if (m.receiver && *m.receiver != s.id) violation("message addressed to UE " + std::to_string(*m.receiver));
            std::visit(
                overloaded{
                    [&](const AnnounceLii& p) {
                      if (p.sender == s.id) return;
                      if (m.phase == Phase::one) {
                        s.known_liis[p.sender] = p.lii;
                        return;
                      }
                      if (m.phase != Phase::fallback || p.sender != kEdgeServer)
                        violation("unexpected LII announcement");
                      if (!s.awaiting_fallback) return;
                      if (kEdgeServer < view.lxi_row.size() && view.lxi_row[kEdgeServer] > Score(0)) {
                        s.leader_candidates = {{kEdgeServer, p.lii + view.lxi_row[kEdgeServer]}};
                        request_front(Phase::fallback);
                      } else {
                        s.awaiting_fallback = false;
                        set_role(Role::isolated);
                      }
                    },
                    [&](const Phase2Announce& p) {
                      if (m.phase != Phase::two) violation("re-announcement outside phase 2");
                      if (p.sender != s.id) s.reannounced[p.sender] = p.lii;
                    },
                    [&](const FollowRequest& p) {
                      if (p.leader != s.id) violation("request for another leader");
                      if (m.phase == Phase::one && s.role == Role::candidate_leader)
                        accept_request(p, Phase::one);
                      else if (m.phase == Phase::two && s.role == Role::leader_with_followers)
                        accept_request(p, Phase::two);
                      else
                        violation("cannot accept followers in phase " + std::to_string(static_cast<int>(m.phase)));
                    },
                    [&](const Ack& p) {
                      if (s.pending_request != p.leader) violation("ACK without a matching request");
                      set_role(Role::assigned_follower);
                      s.leader = p.leader;
                      s.pending_request.reset();
                      s.leader_candidates.clear();
                      s.awaiting_fallback = false;
                    },
                    [&](const Nack& p) {
                      if (s.pending_request != p.leader) violation("NACK without a matching request");
                      std::erase_if(s.leader_candidates, [&](const LeaderOption& o) { return o.id == p.leader; });
                      s.pending_request.reset();
                      if (m.phase == Phase::fallback) {
                        s.awaiting_fallback = false;
                        set_role(Role::isolated);
                      } else {
                        request_front(m.phase);
                      }
                    },
                },
                m.payload);
          },
      },
      event);

  return {std::move(s), std::move(out)};
}

}  // namespace leadsel
