#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "leadsel/benchmark.hpp"
#include "leadsel/errors.hpp"
#include "leadsel/instance_io.hpp"
#include "leadsel/rng.hpp"

namespace leadsel {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s == "-0.0000" || s == "-0.000" || s == "-0.0") s.erase(0, 1);
  return s;
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot open " + p.string() + " for writing");
  return out;
}

}  // namespace

void write_report_csv(const BenchmarkReport& report, Transport t, std::ostream& out) {
  out << kReportColumns << '\n';
  for (const BenchmarkRow& r : report.rows) {
    if (r.transport != t) continue;
    out << r.n << ',' << r.rho.str() << ',' << fixed(r.mean_util_dist, 4) << ',' << fixed(r.mean_util_opt, 4) << ','
        << fixed(r.gap_pct, 4) << ',' << fixed(r.mean_L_dist, 4) << ',' << fixed(r.mean_L_opt, 4) << ','
        << fixed(r.msgs_mean, 4) << ',' << fixed(r.msgs_bound, 4) << ',' << fixed(r.t_dist_us, 3) << ','
        << fixed(r.t_opt_us, 3) << ',' << fixed(r.speedup, 1) << '\n';
  }
}

nlohmann::json histogram_json(const LeaderSizeStats& stats, const char* method, std::size_t n) {
  nlohmann::json bins = nlohmann::json::object();
  for (const auto& [size, count] : stats.bins) bins[std::to_string(size)] = count;
  return {{"method", method}, {"n", n}, {"bins", bins}, {"fit", {{"mean", stats.mean}, {"var", stats.variance}}}};
}

void write_sweep_dat(const BenchmarkReport& report, std::size_t n, Transport t, std::ostream& out) {
  out << "# rho mean_util_dist mean_L_dist mean_util_opt mean_L_opt\n";
  for (const BenchmarkRow& r : report.rows) {
    if (r.n != n || r.transport != t) continue;
    out << r.rho.str() << ' ' << fixed(r.mean_util_dist, 4) << ' ' << fixed(r.mean_L_dist, 4) << ' '
        << fixed(r.mean_util_opt, 4) << ' ' << fixed(r.mean_L_opt, 4) << '\n';
  }
}

void write_report_files(const BenchmarkReport& report, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

  const ExperimentConfig& cfg = report.config;
  for (Transport t : cfg.modes) {
    auto csv = open_out(dir / ("report_" + std::string(to_string(t)) + ".csv"));
    write_report_csv(report, t, csv);
    for (std::size_t n : cfg.n_values) {
      auto dat = open_out(dir / ("sweep_n" + std::to_string(n) + "_" + std::string(to_string(t)) + ".dat"));
      write_sweep_dat(report, n, t, dat);
    }
  }

  nlohmann::json meta;
  meta["rng"] = Rng::kName;
  meta["master_seed"] = cfg.master_seed;
  meta["optimal_rho"] = score_to_json(cfg.optimal_rho);
  meta["modes"] = nlohmann::json::array();
  for (Transport t : cfg.modes) meta["modes"].push_back(to_string(t));
  meta["rho_values"] = nlohmann::json::array();
  for (Score r : cfg.rho_values) meta["rho_values"].push_back(score_to_json(r));
  meta["cap"] = cfg.cap ? nlohmann::json(*cfg.cap) : nlohmann::json(nullptr);
  meta["distributed_pdf"] = "pooled over rho_values with equal weight per rho, first transport mode";
  meta["timing"] = "median of " + std::to_string(cfg.timing_reps) + " wall-clock repetitions per solver per instance";
  for (const SizeSummary& s : report.sizes) {
    const std::string key = std::to_string(s.n);
    meta["instances"][key] = s.instances;
    meta["mean_rule_rho"][key] = s.mean_rule_rho;
    auto hd = open_out(dir / ("hist_distributed_n" + key + ".json"));
    hd << histogram_json(s.distributed, "distributed", s.n).dump(2) << '\n';
    auto ho = open_out(dir / ("hist_optimal_n" + key + ".json"));
    ho << histogram_json(s.optimal, "optimal", s.n).dump(2) << '\n';
  }
  auto mo = open_out(dir / "meta.json");
  mo << meta.dump(2) << '\n';
}

}  // namespace leadsel
