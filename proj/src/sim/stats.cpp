#include <cmath>

#include "leadsel/benchmark.hpp"
#include "leadsel/errors.hpp"

namespace leadsel {

namespace {

void refit(LeaderSizeStats& s) {
  s.count = 0;
  double sum = 0;
  for (const auto& [size, c] : s.bins) {
    s.count += c;
    sum += static_cast<double>(size) * static_cast<double>(c);
  }
  s.mean = s.count ? sum / static_cast<double>(s.count) : 0.0;
  double sq = 0;
  for (const auto& [size, c] : s.bins) {
    const double d = static_cast<double>(size) - s.mean;
    sq += d * d * static_cast<double>(c);
  }
  s.variance = s.count ? sq / static_cast<double>(s.count) : 0.0;
}

}  // namespace

void LeaderSizeStats::merge(const LeaderSizeStats& other) {
  for (const auto& [size, c] : other.bins) bins[size] += c;
  refit(*this);
}

LeaderSizeStats leader_size_stats(std::span<const std::size_t> sizes) {
  if (sizes.empty()) throw InvalidArgument("leader_size_stats: empty input");
  LeaderSizeStats s;
  for (std::size_t k : sizes) ++s.bins[k];
  refit(s);
  return s;
}

Threshold rho_rule(const Instance& inst, RhoRule rule) {
  if (inst.n() == 0) throw InvalidArgument("rho_rule: instance has no UEs");
  if (rule == RhoRule::mean) {
    std::int64_t sum = 0;
    for (UeId id : inst.ues()) sum += inst.lii(id).units();
    const auto n = static_cast<std::int64_t>(inst.n());
    return Threshold(Score::from_units((2 * sum + n) / (2 * n)));  // round half up
  }
  const std::size_t half = inst.n() / 2;
  for (int r = 0; r <= 10; ++r) {
    std::size_t above = 0;
    for (UeId id : inst.ues()) above += inst.lii(id) > Score(r) ? 1 : 0;
    if (above <= half) return Threshold(Score(r));
  }
  return Threshold(kMaxScore);
}

}  // namespace leadsel
