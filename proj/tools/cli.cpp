#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ios>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leadsel/benchmark.hpp"
#include "leadsel/combinatorics.hpp"
#include "leadsel/constraints.hpp"
#include "leadsel/episode.hpp"
#include "leadsel/errors.hpp"
#include "leadsel/instance_io.hpp"
#include "leadsel/optimal.hpp"

namespace leadsel::cli {

namespace {

using nlohmann::json;

/// Failure carrying an exit code and optional structured details.
struct Failure {
  int code;
  std::string kind;
  std::string message;
  json details = json::object();
};

std::size_t parse_count(std::string_view s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw CLI::ValidationError("'" + std::string(s) + "' is not a non-negative integer");
  return v;
}

Score parse_score(const std::string& s) {
  double v = 0;
  std::size_t used = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw CLI::ValidationError("'" + s + "' is not a number");
  const Score out = Score::from_double(v);
  if (!in_score_range(out)) throw CLI::ValidationError("score " + s + " outside [0,10]");
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return parts;
}

std::vector<Score> parse_score_list(const std::string& text) {
  std::vector<Score> out;
  for (const std::string& item : split(text, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      for (std::size_t r : parse_count_list(item)) {
        if (r > 10) throw CLI::ValidationError("rho " + std::to_string(r) + " outside [0,10]");
        out.push_back(Score(static_cast<int>(r)));
      }
    } else {
      out.push_back(parse_score(item));
    }
  }
  return out;
}

std::uint64_t read_seed(const std::string& text) {
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || text.empty())
    throw CLI::ValidationError("--seed: '" + text + "' is not an unsigned 64-bit integer");
  return v;
}

Instance read_instance(const std::string& path) {
  try {
    return load_instance(path);
  } catch (const std::ios_base::failure& e) {
    throw Failure{kIoError, "io", e.what()};
  } catch (const InvalidInstance& e) {
    throw Failure{kIoError, "invalid_instance", path + ": " + e.what()};
  }
}

std::optional<Capacities> read_caps(const std::string& path) {
  if (path.empty()) return std::nullopt;
  try {
    return load_capacities(path);
  } catch (const std::ios_base::failure& e) {
    throw Failure{kIoError, "io", e.what()};
  } catch (const InvalidArgument& e) {
    throw Failure{kIoError, "invalid_capacities", path + ": " + e.what()};
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Failure{kIoError, "io", "cannot open " + path + " for writing"};
  return f;
}

json constraints_json(const ConstraintReport& r) {
  std::vector<std::string> violators;
  for (const auto& [id, ue] : r.violators) violators.push_back(std::string(to_string(id)) + ":" + std::to_string(ue));
  return {{"c1_ok", r.c1_ok},
          {"c2_ok", r.c2_ok},
          {"c3_ok", r.c3_ok},
          {"capacity_ok", r.capacity_ok},
          {"eligibility_ok", r.eligibility_ok},
          {"all_ok", r.all_ok()},
          {"violators", violators}};
}

json feasibility_json(const FeasibilityReport& f) {
  return {{"case1", f.case1}, {"case2_isolated", f.case2_isolated}};
}

std::string feasibility_text(const FeasibilityReport& f) {
  std::string s;
  if (f.case1) s += "Case 1: every LII is zero, so no UE can lead";
  if (!f.case2_isolated.empty()) {
    if (!s.empty()) s += "; ";
    s += "Case 2: UEs";
    for (UeId id : f.case2_isolated) s += " " + std::to_string(id);
    s += " can neither lead nor follow a positive-LII UE";
  }
  if (s.empty()) s = "no Case 1/Case 2 condition; the constraint set has no joint solution";
  return s;
}

// ---------------------------------------------------------------------------

struct GenArgs {
  std::size_t n = 0;
  std::string seed = "1";
  bool edge = false;
  std::string edge_lii = "10";
  std::string edge_lxi = "1";
  std::string out;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  std::optional<EdgeServerSpec> edge;
  if (a.edge) edge = EdgeServerSpec{parse_score(a.edge_lii), std::vector<Score>(a.n, parse_score(a.edge_lxi))};
  if (edge && edge->lii0 <= Score(0)) throw CLI::ValidationError("--edge-lii must be positive");
  const Instance inst = generate_instance(a.n, read_seed(a.seed), edge);
  const std::string text = to_json(inst).dump(2) + "\n";
  if (a.out.empty()) {
    out << text;
    return kOk;
  }
  auto f = open_out(a.out);
  f << text;
  if (!f) throw Failure{kIoError, "io", "write failed for " + a.out};

  std::size_t zeros = 0;
  for (UeId m : inst.ues())
    for (UeId n : inst.nodes())
      if (m != n && inst.lxi(m, n) == Score(0)) ++zeros;
  const FeasibilityReport f0 = feasibility_scan(inst, Threshold(Score(0)));
  out << "wrote " << a.out << ": n=" << inst.n() << " edge_server=" << (inst.has_edge_server() ? "true" : "false")
      << " zero_lxi=" << zeros << " invariants=ok"
      << " case1=" << (f0.case1 ? "true" : "false") << " case2_at_rho0=" << f0.case2_isolated.size() << "\n";
  return kOk;
}

struct SolveArgs {
  std::string rho = "0";
  std::string mode = "relaxed";
  std::string caps;
  std::size_t max_ues = 14;
  std::string instance;
};

int cmd_solve(const SolveArgs& a, std::ostream& out) {
  const Instance inst = read_instance(a.instance);
  const Threshold rho(parse_score(a.rho));
  SolverOptions opts;
  opts.mode = a.mode == "strict" ? SolveMode::strict : SolveMode::relaxed;
  opts.caps = read_caps(a.caps);
  opts.max_ues = a.max_ues;
  OptimalSolution s = [&] {
    try {
      return solve_exhaustive(inst, rho, opts);
    } catch (const Infeasible& e) {
      const FeasibilityReport f = feasibility_scan(inst, rho);
      throw Failure{kInfeasible, "infeasible", std::string(e.what()) + " (" + feasibility_text(f) + ")",
                    feasibility_json(f)};
    }
  }();
  json j = to_json(s);
  j["constraints"] = constraints_json(check_constraints(inst, s.assignment, rho, opts.caps, opts.mode));
  out << j.dump(2) << "\n";
  return kOk;
}

struct SimulateArgs {
  std::string rho;
  std::string rho_rule;
  std::string transport = "broadcast";
  std::string caps;
  bool edge = false;
  std::string edge_lii = "10";
  std::string edge_lxi = "1";
  bool incentive = false;
  std::string incentive_delta = "5";
  double incentive_prob = 0.5;
  std::string delivery = "random";
  std::string seed = "1";
  std::string log;
  bool strict_outcome = false;
  std::string instance;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  const Instance inst = read_instance(a.instance);
  ProtocolConfig cfg;
  if (!a.rho_rule.empty())
    cfg.rho = rho_rule(inst, a.rho_rule == "mean" ? RhoRule::mean : RhoRule::half_n);
  else
    cfg.rho = Threshold(parse_score(a.rho.empty() ? "0" : a.rho));
  cfg.transport = *parse_transport(a.transport);
  cfg.caps = read_caps(a.caps);
  cfg.edge_server_enabled = a.edge;
  cfg.edge_lii = parse_score(a.edge_lii);
  cfg.edge_lxi = parse_score(a.edge_lxi);
  if (a.incentive) cfg.incentive = BoostIncentive{parse_score(a.incentive_delta), a.incentive_prob};
  cfg.delivery = a.delivery == "ascending" ? DeliveryOrder::ascending_id : DeliveryOrder::seeded_random;
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw CLI::ValidationError(e.what());
  }

  const EpisodeOutcome o = run_episode(inst, cfg, read_seed(a.seed));
  json j = to_json(o);
  j["rho"] = score_to_json(cfg.rho.value());
  j["transport"] = to_string(cfg.transport);
  j["within_bound"] = check_message_bounds(o, inst.n(), o.leader_candidates, cfg.transport);
  j["message_bound"] = message_bound(inst.n(), o.leader_candidates, cfg.transport);
  out << j.dump(2) << "\n";
  if (!a.log.empty()) {
    auto f = open_out(a.log);
    write_message_log(o.messages, f);
    if (!f) throw Failure{kIoError, "io", "write failed for " + a.log};
  }
  if (a.strict_outcome && o.assignment.leaders.empty())
    throw Failure{kDegenerate, "degenerate", "every UE ended isolated (scenario " + std::string(to_string(o.scenario)) + ")",
                  {{"scenario", to_string(o.scenario)}, {"fallback", to_string(o.fallback)}}};
  return kOk;
}

struct BenchArgs {
  std::string n = "7..12";
  std::size_t instances = 100;
  std::vector<std::string> instances_at;
  std::string rho = "0..9";
  std::string seed = "1";
  std::string transport = "broadcast";
  std::optional<std::size_t> cap;
  std::string optimal_rho = "0";
  bool no_timing = false;
  std::size_t timing_reps = 3;
  std::size_t jobs = 1;
  std::string out;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  ExperimentConfig cfg;
  cfg.n_values = parse_count_list(a.n);
  cfg.instances_per_n = a.instances;
  for (const std::string& spec : a.instances_at) {
    const auto parts = split(spec, '=');
    if (parts.size() != 2) throw CLI::ValidationError("--instances-at expects N=COUNT, got '" + spec + "'");
    cfg.instances_override[parse_count(parts[0])] = parse_count(parts[1]);
  }
  cfg.rho_values = parse_score_list(a.rho);
  cfg.master_seed = read_seed(a.seed);
  cfg.modes.clear();
  for (const std::string& t : split(a.transport, ',')) {
    const auto parsed = parse_transport(t);
    if (!parsed) throw CLI::ValidationError("--transport: unknown mode '" + t + "'");
    cfg.modes.push_back(*parsed);
  }
  cfg.cap = a.cap;
  cfg.optimal_rho = parse_score(a.optimal_rho);
  cfg.measure_timing = !a.no_timing;
  cfg.timing_reps = a.timing_reps;
  cfg.jobs = a.jobs;
  for (std::size_t n : cfg.n_values)
    if (n < 1 || n > 14) throw CLI::ValidationError("--n values must lie in [1,14]");
  try {
    cfg.validate();
  } catch (const InvalidArgument& e) {
    throw CLI::ValidationError(e.what());
  }

  const BenchmarkReport report = run_benchmark(cfg);
  try {
    write_report_files(report, a.out);
  } catch (const Error& e) {
    throw Failure{kIoError, "io", e.what()};
  }
  for (Transport t : cfg.modes) write_report_csv(report, t, out);
  return kOk;
}

struct CountArgs {
  std::size_t n = 0;
  std::optional<std::size_t> l;
};

int cmd_count(const CountArgs& a, std::ostream& out) {
  if (a.l && *a.l > a.n) throw CLI::ValidationError("--l must not exceed --n");
  out << "exhaustive(" << a.n << ") = " << count_configs_exhaustive(a.n).str() << "\n";
  if (a.l)
    out << "distributed_bound(" << a.n << ", " << *a.l << ") = " << count_configs_distributed_bound(a.n, *a.l).str()
        << "\n";
  return kOk;
}

void report_failure(std::ostream& err, bool as_json, const Failure& f) {
  if (as_json) {
    json j{{"error", f.kind}, {"message", f.message}, {"exit_code", f.code}};
    if (!f.details.empty()) j["details"] = f.details;
    err << j.dump() << "\n";
  } else {
    err << "error: " << f.message << "\n";
  }
}

}  // namespace

std::vector<std::size_t> parse_count_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const std::string& item : split(text, ',')) {
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const std::size_t lo = parse_count(std::string_view(item).substr(0, dots));
      const std::size_t hi = parse_count(std::string_view(item).substr(dots + 2));
      if (lo > hi) throw CLI::ValidationError("empty range '" + item + "'");
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(parse_count(item));
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const bool json_errors = std::find(args.begin(), args.end(), "--json-errors") != args.end();

  CLI::App app{"Leader selection and follower association for hierarchical federated learning", "leadsel"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "leadsel 1.0.0");
  bool json_flag = false;
  app.add_flag("--json-errors", json_flag, "Print diagnostics on stderr as one JSON object")->configurable(false);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a random instance");
  g->add_option("--n", gen.n, "Number of UEs")->required()->check(CLI::Range(1, 10000));
  g->add_option("--seed", gen.seed, "Generator seed (env LEADSEL_SEED when absent)")->envname("LEADSEL_SEED")->capture_default_str();
  g->add_flag("--edge-server", gen.edge, "Include node 0 (edge server)");
  g->add_option("--edge-lii", gen.edge_lii, "LII of node 0")->capture_default_str();
  g->add_option("--edge-lxi", gen.edge_lxi, "LXI of every UE toward node 0")->capture_default_str();
  g->add_option("--out", gen.out, "Output path (stdout when omitted)");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Exact exhaustive solution as JSON");
  s->add_option("--rho", solve.rho, "Leadership threshold in [0,10]")->capture_default_str();
  s->add_option("--mode", solve.mode, "strict: every UE assigned; relaxed: isolation allowed")
      ->check(CLI::IsMember({"strict", "relaxed"}))
      ->capture_default_str();
  s->add_option("--caps", solve.caps, "JSON file {\"id\": max_followers}");
  s->add_option("--max-ues", solve.max_ues, "Refuse instances with more UEs")->capture_default_str();
  s->add_option("instance", solve.instance, "Instance JSON file")->required();

  SimulateArgs sim;
  auto* m = app.add_subcommand("simulate", "Run one distributed episode");
  auto* rho_opt = m->add_option("--rho", sim.rho, "Leadership threshold in [0,10] (default 0)");
  m->add_option("--rho-rule", sim.rho_rule, "Derive rho from the instance")
      ->check(CLI::IsMember({"mean", "half_n"}))
      ->excludes(rho_opt);
  m->add_option("--transport", sim.transport, "Announcement transport")
      ->check(CLI::IsMember({"broadcast", "p2p"}))
      ->capture_default_str();
  m->add_option("--caps", sim.caps, "JSON file {\"id\": max_followers}");
  m->add_flag("--edge-server", sim.edge, "Enable the edge-server fallback");
  m->add_option("--edge-lii", sim.edge_lii, "LII of node 0 when the instance has none")->capture_default_str();
  m->add_option("--edge-lxi", sim.edge_lxi, "LXI toward node 0 when the instance has none")->capture_default_str();
  m->add_flag("--incentive", sim.incentive, "Offer the LII boost when no UE exceeds rho");
  m->add_option("--incentive-delta", sim.incentive_delta, "LII boost for accepting UEs")->capture_default_str();
  m->add_option("--incentive-prob", sim.incentive_prob, "Acceptance probability per UE")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  m->add_option("--delivery", sim.delivery, "Request delivery order within a round")
      ->check(CLI::IsMember({"random", "ascending"}))
      ->capture_default_str();
  m->add_option("--seed", sim.seed, "Episode seed (env LEADSEL_SEED when absent)")->envname("LEADSEL_SEED")->capture_default_str();
  m->add_option("--log", sim.log, "Write the message log as JSON lines");
  m->add_flag("--strict-outcome", sim.strict_outcome, "Exit 4 when every UE ends isolated");
  m->add_option("instance", sim.instance, "Instance JSON file")->required();

  BenchArgs bench;
  auto* b = app.add_subcommand("bench", "Distributed vs optimal benchmark over random instances");
  b->add_option("--n", bench.n, "UE counts, e.g. 7..12 or 7,10")->capture_default_str();
  b->add_option("--instances", bench.instances, "Instances per N")->check(CLI::Range(1, 1000000))->capture_default_str();
  b->add_option("--instances-at", bench.instances_at, "Per-N override N=COUNT (repeatable)");
  b->add_option("--rho", bench.rho, "Thresholds, e.g. 0..9 or 2,4.5")->capture_default_str();
  b->add_option("--seed", bench.seed, "Master seed (env LEADSEL_SEED when absent)")->envname("LEADSEL_SEED")->capture_default_str();
  b->add_option("--transport", bench.transport, "Comma-separated modes: broadcast,p2p")->capture_default_str();
  b->add_option("--cap", bench.cap, "Uniform follower limit for every UE");
  b->add_option("--optimal-rho", bench.optimal_rho, "Threshold for the exhaustive reference")->capture_default_str();
  b->add_flag("--no-timing", bench.no_timing, "Skip wall-clock measurement (timing columns are 0)");
  b->add_option("--timing-reps", bench.timing_reps, "Repetitions per timed run (median kept)")
      ->check(CLI::Range(1, 101))
      ->capture_default_str();
  b->add_option("--jobs", bench.jobs, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
  b->add_option("--out", bench.out, "Output directory")->required();

  CountArgs count;
  auto* c = app.add_subcommand("count", "Configuration counts of the exhaustive and distributed searches");
  c->add_option("--n", count.n, "Number of UEs")->required()->check(CLI::Range(1, 1000));
  c->add_option("--l", count.l, "Candidate leaders for the distributed bound");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    if (g->parsed()) return cmd_gen(gen, out);
    if (s->parsed()) return cmd_solve(solve, out);
    if (m->parsed()) return cmd_simulate(sim, out);
    if (b->parsed()) return cmd_bench(bench, out);
    return cmd_count(count, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_failure(err, json_errors, {kUsage, "usage", e.what()});
    if (!json_errors) err << "Run with --help for more information.\n";
    return kUsage;
  } catch (const Failure& f) {
    report_failure(err, json_errors, f);
    return f.code;
  } catch (const LimitExceeded& e) {
    report_failure(err, json_errors, {kUsage, "limit", e.what()});
    return kUsage;
  } catch (const InvalidArgument& e) {
    report_failure(err, json_errors, {kUsage, "usage", e.what()});
    return kUsage;
  } catch (const std::ios_base::failure& e) {
    report_failure(err, json_errors, {kIoError, "io", e.what()});
    return kIoError;
  }
}

}  // namespace leadsel::cli
