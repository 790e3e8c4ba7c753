#include "leadsel/episode.hpp"

#include <algorithm>
#include <ostream>

#include "leadsel/instance_io.hpp"
#include "leadsel/rng.hpp"

namespace leadsel {

MessageCounts MessageCounts::tally(const std::vector<Message>& log) {
  MessageCounts c;
  for (const Message& m : log) ++c.by_phase[static_cast<std::size_t>(m.phase) - 1][static_cast<std::size_t>(m.transport)];
  return c;
}

std::size_t MessageCounts::phase_total(Phase p) const {
  const auto& row = by_phase[static_cast<std::size_t>(p) - 1];
  return row[0] + row[1];
}

std::size_t MessageCounts::transport_total(Transport t) const {
  std::size_t sum = 0;
  for (const auto& row : by_phase) sum += row[static_cast<std::size_t>(t)];
  return sum;
}

std::size_t MessageCounts::total() const { return algorithm_total() + phase_total(Phase::fallback); }

std::size_t MessageCounts::algorithm_total() const { return phase_total(Phase::one) + phase_total(Phase::two); }

EpisodeOutcome run_episode(const Instance& inst, const ProtocolConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Rng rng(seed);
  MessageLog log;
  const Scenario scenario = classify_scenario(inst, cfg.rho);
  AlgorithmRun run = run_algorithm(inst, cfg, rng, log);
  FallbackResult fb = run_fallback_process(inst, cfg, scenario, run, rng, log);

  Assignment a = collect_assignment(fb.effective, run, fb.edge_followers);
  const Score u = utility(fb.effective, a);
  EpisodeOutcome o{std::move(fb.effective), std::move(a), u, {}, {}};
  o.counts = MessageCounts::tally(log.messages);
  o.messages = std::move(log.messages);
  o.scenario = scenario;
  o.fallback = fb.status;
  o.edge_server_used = fb.edge_server_used;
  o.incentive_rerun = fb.incentive_rerun;
  o.incentivized = std::move(fb.incentivized);
  o.rounds = log.round;
  o.leader_candidates = run.leader_candidates;
  o.centralized_messages = inst.n() + 1;
  o.capacitated = cfg.caps.has_value();
  return o;
}

std::size_t message_bound(std::size_t n, std::size_t l, Transport t) {
  const auto sn = static_cast<long long>(n);
  const auto sl = static_cast<long long>(l);
  const long long b = t == Transport::broadcast ? 3 * sn + sl - 2 : sn * (sn + 1) + sl * (sl - 1) - 2;
  return static_cast<std::size_t>(std::max(0LL, b));
}

bool check_message_bounds(const EpisodeOutcome& outcome, std::size_t n, std::size_t l, Transport t) {
  return outcome.counts.algorithm_total() <= message_bound(n, l, t);
}

nlohmann::json to_json(const EpisodeOutcome& o) {
  nlohmann::json j = to_json(o.assignment);
  j["utility"] = score_to_json(o.utility);
  j["scenario"] = to_string(o.scenario);
  j["fallback"] = to_string(o.fallback);
  j["edge_server_used"] = o.edge_server_used;
  j["incentive_rerun"] = o.incentive_rerun;
  j["incentivized"] = o.incentivized;
  j["rounds"] = o.rounds;
  j["leader_candidates"] = o.leader_candidates;
  j["capacitated"] = o.capacitated;
  j["messages"] = {
      {"phase1", o.counts.phase_total(Phase::one)},
      {"phase2", o.counts.phase_total(Phase::two)},
      {"fallback", o.counts.phase_total(Phase::fallback)},
      {"algorithm_total", o.counts.algorithm_total()},
      {"broadcast", o.counts.transport_total(Transport::broadcast)},
      {"p2p", o.counts.transport_total(Transport::p2p)},
      {"total", o.counts.total()},
      {"centralized", o.centralized_messages},
  };
  return j;
}

void write_message_log(const std::vector<Message>& log, std::ostream& out) {
  for (const Message& m : log) out << to_json(m).dump() << '\n';
}

}  // namespace leadsel
