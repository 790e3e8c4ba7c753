#include "leadsel/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <thread>

#include "leadsel/episode.hpp"
#include "leadsel/errors.hpp"
#include "leadsel/optimal.hpp"
#include "leadsel/rng.hpp"

namespace leadsel {

namespace {

constexpr std::uint64_t kEpisodeTag = 0x65706973;  // "epis"

using Clock = std::chrono::steady_clock;

double elapsed_us(Clock::time_point since) {
  return std::chrono::duration<double, std::micro>(Clock::now() - since).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::size_t regular_leaders(const Assignment& a) {
  return static_cast<std::size_t>(std::count_if(a.leaders.begin(), a.leaders.end(), [](UeId id) { return id != kEdgeServer; }));
}

struct EpisodeResult {
  std::int64_t utility_units = 0;
  std::size_t leaders = 0;
  std::size_t messages = 0;
  std::size_t bound = 0;
  double t_us = 0;
};

struct InstanceResult {
  std::int64_t opt_units = 0;
  std::size_t opt_leaders = 0;
  double t_opt_us = 0;
  double mean_rule_rho = 0;
  /// [mode][rho]
  std::vector<std::vector<EpisodeResult>> episodes;
};

class Evaluator {
 public:
  explicit Evaluator(const ExperimentConfig& cfg) : cfg_(cfg) {}

  ProtocolConfig protocol(const Instance& inst, Score rho, Transport t) const {
    ProtocolConfig p;
    p.rho = Threshold(rho);
    p.transport = t;
    if (cfg_.cap) p.caps = Capacities::uniform(inst, *cfg_.cap);
    return p;
  }

  SolverOptions solver(const Instance& inst) const {
    SolverOptions o;
    if (cfg_.cap) o.caps = Capacities::uniform(inst, *cfg_.cap);
    return o;
  }

  /// With `timed`, every computation is repeated `timing_reps` times and the
  /// median wall-clock is kept.
  InstanceResult evaluate(std::size_t n, std::size_t index, bool timed) const {
    const Instance inst = generate_instance(n, instance_seed(cfg_.master_seed, n, index));
    const std::size_t reps = timed ? cfg_.timing_reps : 1;
    InstanceResult r;
    r.mean_rule_rho = rho_rule(inst, RhoRule::mean).value().to_double();

    std::vector<double> times;
    for (std::size_t i = 0; i < reps; ++i) {
      const auto t0 = Clock::now();
      OptimalSolution s = solve_exhaustive(inst, Threshold(cfg_.optimal_rho), solver(inst));
      times.push_back(elapsed_us(t0));
      r.opt_units = s.utility.units();
      r.opt_leaders = regular_leaders(s.assignment);
    }
    if (timed) r.t_opt_us = median(times);

    for (Transport t : cfg_.modes) {
      auto& row = r.episodes.emplace_back();
      for (Score rho : cfg_.rho_values) {
        const ProtocolConfig pc = protocol(inst, rho, t);
        const std::uint64_t seed = episode_seed(cfg_.master_seed, n, index, rho, t);
        EpisodeResult e;
        times.clear();
        for (std::size_t i = 0; i < reps; ++i) {
          const auto t0 = Clock::now();
          EpisodeOutcome o = run_episode(inst, pc, seed);
          times.push_back(elapsed_us(t0));
          e.utility_units = o.utility.units();
          e.leaders = regular_leaders(o.assignment);
          e.messages = o.counts.algorithm_total();
          e.bound = message_bound(n, o.leader_candidates, t);
        }
        if (timed) e.t_us = median(times);
        row.push_back(e);
      }
    }
    return r;
  }

 private:
  const ExperimentConfig& cfg_;
};

std::vector<InstanceResult> evaluate_size(const ExperimentConfig& cfg, std::size_t n) {
  const Evaluator ev(cfg);
  const std::size_t count = cfg.instances_for(n);
  std::vector<InstanceResult> results(count);

  if (cfg.jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = ev.evaluate(n, i, cfg.measure_timing);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = ev.evaluate(n, i, false);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < std::min(cfg.jobs, count); ++j) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  // Timing runs alone so workers do not skew each other.
  if (cfg.measure_timing) {
    for (std::size_t i = 0; i < count; ++i) {
      const InstanceResult timed = ev.evaluate(n, i, true);
      results[i].t_opt_us = timed.t_opt_us;
      for (std::size_t m = 0; m < timed.episodes.size(); ++m)
        for (std::size_t k = 0; k < timed.episodes[m].size(); ++k)
          results[i].episodes[m][k].t_us = timed.episodes[m][k].t_us;
    }
  }
  return results;
}

double units_to_double(std::int64_t units) { return static_cast<double>(units) / static_cast<double>(Score::kScale); }

}  // namespace

std::size_t ExperimentConfig::instances_for(std::size_t n) const {
  const auto it = instances_override.find(n);
  return it == instances_override.end() ? instances_per_n : it->second;
}

void ExperimentConfig::validate() const {
  if (n_values.empty()) throw InvalidArgument("n_values must not be empty");
  if (rho_values.empty()) throw InvalidArgument("rho_values must not be empty");
  if (modes.empty()) throw InvalidArgument("modes must not be empty");
  for (std::size_t n : n_values) {
    if (n < 1) throw InvalidArgument("every n must be at least 1");
    if (instances_for(n) < 1) throw InvalidArgument("instances per n must be at least 1");
  }
  for (Score r : rho_values)
    if (!in_score_range(r)) throw InvalidArgument("rho values must lie in [0,10]");
  if (!in_score_range(optimal_rho)) throw InvalidArgument("optimal_rho must lie in [0,10]");
  if (timing_reps < 1) throw InvalidArgument("timing_reps must be at least 1");
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t n, std::size_t index) {
  return derive_seed(master, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index)});
}

std::uint64_t episode_seed(std::uint64_t master, std::size_t n, std::size_t index, Score rho, Transport t) {
  return derive_seed(master, {kEpisodeTag, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(index),
                              static_cast<std::uint64_t>(rho.units()), static_cast<std::uint64_t>(t)});
}

const BenchmarkRow* BenchmarkReport::find(std::size_t n, Score rho, Transport t) const {
  for (const BenchmarkRow& r : rows)
    if (r.n == n && r.rho == rho && r.transport == t) return &r;
  return nullptr;
}

const SizeSummary* BenchmarkReport::find_size(std::size_t n) const {
  for (const SizeSummary& s : sizes)
    if (s.n == n) return &s;
  return nullptr;
}

BenchmarkReport run_benchmark(const ExperimentConfig& cfg) {
  cfg.validate();
  BenchmarkReport report;
  report.config = cfg;

  for (std::size_t n : cfg.n_values) {
    const std::vector<InstanceResult> results = evaluate_size(cfg, n);
    const auto count = static_cast<double>(results.size());

    SizeSummary summary;
    summary.n = n;
    summary.instances = results.size();
    std::vector<std::size_t> opt_sizes;
    std::int64_t opt_units = 0;
    double t_opt = 0;
    for (const InstanceResult& r : results) {
      opt_sizes.push_back(r.opt_leaders);
      opt_units += r.opt_units;
      t_opt += r.t_opt_us;
      summary.mean_rule_rho += r.mean_rule_rho / count;
    }
    summary.optimal = leader_size_stats(opt_sizes);
    const double mean_opt = units_to_double(opt_units) / count;
    const double mean_L_opt = summary.optimal.mean;
    t_opt /= count;

    for (std::size_t m = 0; m < cfg.modes.size(); ++m) {
      for (std::size_t k = 0; k < cfg.rho_values.size(); ++k) {
        BenchmarkRow row;
        row.n = n;
        row.rho = cfg.rho_values[k];
        row.transport = cfg.modes[m];
        row.mean_util_opt = mean_opt;
        row.mean_L_opt = mean_L_opt;
        row.t_opt_us = t_opt;
        row.msgs_min = results.front().episodes[m][k].messages;
        std::int64_t util_units = 0;
        std::vector<std::size_t> sizes;
        for (const InstanceResult& r : results) {
          const EpisodeResult& e = r.episodes[m][k];
          util_units += e.utility_units;
          sizes.push_back(e.leaders);
          row.msgs_min = std::min(row.msgs_min, e.messages);
          row.msgs_max = std::max(row.msgs_max, e.messages);
          row.msgs_mean += static_cast<double>(e.messages) / count;
          row.msgs_bound += static_cast<double>(e.bound) / count;
          row.bound_violations += e.messages > e.bound ? 1 : 0;
          row.dominance_violations += e.utility_units > r.opt_units ? 1 : 0;
          row.t_dist_us += e.t_us / count;
        }
        row.mean_util_dist = units_to_double(util_units) / count;
        row.gap_pct = mean_opt != 0 ? (row.mean_util_dist - mean_opt) / mean_opt * 100.0 : 0.0;
        const LeaderSizeStats dist = leader_size_stats(sizes);
        row.mean_L_dist = dist.mean;
        row.speedup = row.t_dist_us > 0 ? row.t_opt_us / row.t_dist_us : 0.0;
        if (m == 0) summary.distributed.merge(dist);
        report.rows.push_back(row);
      }
    }
    report.sizes.push_back(std::move(summary));
  }
  return report;
}

RhoSweep sweep_rho(std::span<const Instance> instances, std::span<const Score> rhos, const ProtocolConfig& base,
                   std::uint64_t seed, Score optimal_rho) {
  if (instances.empty()) throw InvalidArgument("sweep_rho: no instances");
  for (Score r : rhos)
    if (!in_score_range(r)) throw InvalidArgument("sweep_rho: rho values must lie in [0,10]");
  const auto count = static_cast<double>(instances.size());

  RhoSweep sweep;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    SolverOptions opts;
    opts.caps = base.caps;
    const OptimalSolution s = solve_exhaustive(instances[i], Threshold(optimal_rho), opts);
    sweep.optimal_utility += s.utility.to_double() / count;
    sweep.optimal_leaders += static_cast<double>(regular_leaders(s.assignment)) / count;
  }
  for (Score rho : rhos) {
    RhoPoint p{rho};
    ProtocolConfig cfg = base;
    cfg.rho = Threshold(rho);
    for (std::size_t i = 0; i < instances.size(); ++i) {
      const EpisodeOutcome o = run_episode(instances[i], cfg, derive_seed(seed, {i, static_cast<std::uint64_t>(rho.units())}));
      p.mean_utility += o.utility.to_double() / count;
      p.mean_leaders += static_cast<double>(regular_leaders(o.assignment)) / count;
    }
    sweep.points.push_back(p);
  }
  return sweep;
}

}  // namespace leadsel
