#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "leadsel/instance.hpp"
#include "leadsel/protocol.hpp"

namespace leadsel {

struct ExperimentConfig {
  std::vector<std::size_t> n_values{7, 8, 9, 10, 11, 12};
  std::size_t instances_per_n = 100;
  /// Per-N instance counts that replace `instances_per_n`.
  std::map<std::size_t, std::size_t> instances_override;
  std::vector<Score> rho_values{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t master_seed = 1;
  std::vector<Transport> modes{Transport::broadcast};
  /// Uniform N_n^Lim for every UE (distributed runs and the optimum alike).
  std::optional<std::size_t> cap;
  Score optimal_rho = 0;
  bool measure_timing = true;
  std::size_t timing_reps = 3;
  std::size_t jobs = 1;

  std::size_t instances_for(std::size_t n) const;
  void validate() const;
};

/// Seed of instance `index` at size `n`; independent of execution order.
std::uint64_t instance_seed(std::uint64_t master, std::size_t n, std::size_t index);
/// Seed of the episode for (instance, rho, transport).
std::uint64_t episode_seed(std::uint64_t master, std::size_t n, std::size_t index, Score rho, Transport t);

/// Empirical leader-set-size distribution with a moment-matched Gaussian
/// (population mean and variance).
struct LeaderSizeStats {
  std::map<std::size_t, std::size_t> bins;
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;

  void merge(const LeaderSizeStats& other);
};

/// Throws InvalidArgument on empty input.
LeaderSizeStats leader_size_stats(std::span<const std::size_t> sizes);

struct BenchmarkRow {
  std::size_t n = 0;
  Score rho;
  Transport transport = Transport::broadcast;
  double mean_util_dist = 0;
  double mean_util_opt = 0;
  double gap_pct = 0;
  double mean_L_dist = 0;
  double mean_L_opt = 0;
  std::size_t msgs_min = 0;
  double msgs_mean = 0;
  std::size_t msgs_max = 0;
  double msgs_bound = 0;
  std::size_t bound_violations = 0;
  /// Episodes where the distributed utility exceeded the optimum (must stay 0).
  std::size_t dominance_violations = 0;
  double t_dist_us = 0;
  double t_opt_us = 0;
  double speedup = 0;
};

struct SizeSummary {
  std::size_t n = 0;
  std::size_t instances = 0;
  LeaderSizeStats distributed;  // pooled over every rho with equal weight, first transport
  LeaderSizeStats optimal;
  double mean_rule_rho = 0;     // average of the mean-rule threshold over instances
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::vector<BenchmarkRow> rows;
  std::vector<SizeSummary> sizes;

  const BenchmarkRow* find(std::size_t n, Score rho, Transport t) const;
  const SizeSummary* find_size(std::size_t n) const;
};

BenchmarkReport run_benchmark(const ExperimentConfig& cfg);

struct RhoPoint {
  Score rho;
  double mean_utility = 0;
  double mean_leaders = 0;
};

struct RhoSweep {
  std::vector<RhoPoint> points;
  double optimal_utility = 0;
  double optimal_leaders = 0;
};

/// Mean distributed utility and leader-set size per rho over `instances`, with
/// the optimum (solved at `optimal_rho`) as a flat reference.
RhoSweep sweep_rho(std::span<const Instance> instances, std::span<const Score> rhos, const ProtocolConfig& base,
                   std::uint64_t seed, Score optimal_rho = 0);

enum class RhoRule { mean, half_n };

/// mean: average LII; half_n: smallest integer rho in [0,10] leaving at most
/// floor(N/2) candidates.
Threshold rho_rule(const Instance& inst, RhoRule rule);

inline constexpr const char* kReportColumns =
    "n,rho,mean_util_dist,mean_util_opt,gap_pct,mean_L_dist,mean_L_opt,msgs_mean,msgs_bound,t_dist_us,t_opt_us,speedup";

void write_report_csv(const BenchmarkReport& report, Transport t, std::ostream& out);
nlohmann::json histogram_json(const LeaderSizeStats& stats, const char* method, std::size_t n);
/// gnuplot columns: rho mean_util_dist mean_L_dist mean_util_opt mean_L_opt
void write_sweep_dat(const BenchmarkReport& report, std::size_t n, Transport t, std::ostream& out);

/// report_<transport>.csv, hist_<method>_n<N>.json, sweep_n<N>_<transport>.dat, meta.json.
void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir);

}  // namespace leadsel
