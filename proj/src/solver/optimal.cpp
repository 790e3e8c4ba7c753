#include "leadsel/optimal.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "leadsel/errors.hpp"
#include "leadsel/instance_io.hpp"

namespace leadsel {

namespace {

constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
constexpr std::size_t kEnumerateResidualUpTo = 8;

constexpr UeId kLeaderSlot = std::numeric_limits<UeId>::max() - 1;
constexpr UeId kIsolatedSlot = std::numeric_limits<UeId>::max();

std::vector<UeId> target_vector(const Instance& inst, const Assignment& a) {
  std::vector<UeId> v(inst.n() + 1, kIsolatedSlot);
  for (UeId l : a.leaders) v[l] = kLeaderSlot;
  for (const auto& [m, n] : a.follows) v[m] = n;
  return v;
}

class ExhaustiveSearch {
 public:
  ExhaustiveSearch(const Instance& inst, Threshold rho, const SolverOptions& opts)
      : inst_(inst), rho_(rho), opts_(opts) {
    for (UeId id : inst_.nodes()) {
      const bool eligible = id == kEdgeServer ? inst_.lii(id) > Score(0) : rho_.admits(inst_.lii(id));
      if (eligible) candidates_.push_back(id);
    }
    cap_.assign(inst_.n() + 1, kUnlimited);
    if (opts_.caps)
      for (UeId id : inst_.nodes())
        if (auto lim = opts_.caps->limit(id)) cap_[id] = *lim;
    if (opts_.mode == SolveMode::relaxed) {
      best_ = all_isolated(inst_);
      have_best_ = true;
    }
  }

  void run() {
    const std::size_t total = inst_.node_count();
    for (std::size_t k = 1; 2 * k <= total && k <= candidates_.size(); ++k) {
      std::vector<std::size_t> pick(k);
      for (std::size_t i = 0; i < k; ++i) pick[i] = i;
      while (true) {
        leaders_.clear();
        for (auto i : pick) leaders_.push_back(candidates_[i]);
        evaluate_leader_set();
        // Next k-combination in lexicographic order.
        std::size_t i = k;
        while (i > 0 && pick[i - 1] == candidates_.size() - k + (i - 1)) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
      }
    }
  }

  void finish() { flush_visited(); }

  bool have_best() const { return have_best_; }
  const Assignment& best() const { return best_; }
  Score best_utility() const { return best_utility_; }
  const BigInt& visited() const { return visited_; }

 private:
  void evaluate_leader_set() {
    followers_.clear();
    for (UeId id : inst_.ues())
      if (!std::binary_search(leaders_.begin(), leaders_.end(), id)) followers_.push_back(id);
    if (followers_.size() < leaders_.size()) return;
    for (UeId l : leaders_)
      if (cap_[l] == 0) return;
    leader_sum_ = Score(0);
    for (UeId l : leaders_) leader_sum_ += inst_.lii(l);
    used_.assign(inst_.n() + 1, false);
    designated_.assign(leaders_.size(), 0);
    designate(0);
  }

  void designate(std::size_t depth) {
    if (depth == leaders_.size()) {
      ++visited_count_;
      if (visited_count_ == kFlushEvery) flush_visited();
      complete();
      return;
    }
    const UeId leader = leaders_[depth];
    for (UeId r : followers_) {
      if (used_[r] || inst_.lxi(r, leader) <= Score(0)) continue;
      used_[r] = true;
      designated_[depth] = r;
      designate(depth + 1);
      used_[r] = false;
    }
  }

  void complete() {
    Score value = leader_sum_;
    for (std::size_t i = 0; i < leaders_.size(); ++i) value += inst_.lxi(designated_[i], leaders_[i]);

    completion_.assign(inst_.n() + 1, std::nullopt);
    if (opts_.caps) {
      if (!complete_capacitated(value)) return;
    } else {
      for (UeId r : followers_) {
        if (used_[r]) continue;
        std::optional<UeId> pick;
        Score top = Score(0);
        for (UeId l : leaders_) {
          Score x = inst_.lxi(r, l);
          if (x > top) {
            top = x;
            pick = l;
          }
        }
        if (!pick && opts_.mode == SolveMode::strict) return;
        completion_[r] = pick;
        value += top;
      }
    }

    if (have_best_ && value < best_utility_) return;
    Assignment a = build();
    if (have_best_ && value == best_utility_ && !tie_break_less(inst_, a, best_)) return;
    best_ = std::move(a);
    best_utility_ = value;
    have_best_ = true;
  }

  bool complete_capacitated(Score& value) {
    std::vector<UeId> remaining;
    for (UeId r : followers_)
      if (!used_[r]) remaining.push_back(r);
    std::vector<std::size_t> spare;
    for (UeId l : leaders_) spare.push_back(cap_[l] == kUnlimited ? kUnlimited : cap_[l] - 1);
    auto res = remaining.size() <= kEnumerateResidualUpTo
                   ? detail::assign_residual_enumerate(inst_, remaining, leaders_, spare, opts_.mode)
                   : detail::assign_residual_flow(inst_, remaining, leaders_, spare, opts_.mode);
    if (!res.feasible) return false;
    for (std::size_t i = 0; i < remaining.size(); ++i) completion_[remaining[i]] = res.assigned[i];
    value += res.gain;
    return true;
  }

  Assignment build() const {
    Assignment a;
    a.leaders = leaders_;
    for (std::size_t i = 0; i < leaders_.size(); ++i) a.follows[designated_[i]] = leaders_[i];
    for (UeId r : followers_) {
      if (used_[r]) continue;
      if (completion_[r])
        a.follows[r] = *completion_[r];
      else
        a.isolated.push_back(r);
    }
    return a;
  }

  void flush_visited() {
    visited_ += visited_count_;
    visited_count_ = 0;
  }

  static constexpr std::uint64_t kFlushEvery = 1u << 30;

  const Instance& inst_;
  Threshold rho_;
  const SolverOptions& opts_;
  std::vector<UeId> candidates_;
  std::vector<std::size_t> cap_;

  std::vector<UeId> leaders_;
  std::vector<UeId> followers_;
  std::vector<bool> used_;
  std::vector<UeId> designated_;
  std::vector<std::optional<UeId>> completion_;
  Score leader_sum_;

  bool have_best_ = false;
  Assignment best_;
  Score best_utility_;
  BigInt visited_ = 0;
  std::uint64_t visited_count_ = 0;
};

}  // namespace

bool tie_break_less(const Instance& inst, const Assignment& a, const Assignment& b) {
  if (a.leaders != b.leaders)
    return std::lexicographical_compare(a.leaders.begin(), a.leaders.end(), b.leaders.begin(), b.leaders.end());
  return target_vector(inst, a) < target_vector(inst, b);
}

OptimalSolution solve_exhaustive(const Instance& inst, Threshold rho, const SolverOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  if (inst.n() > opts.max_ues)
    throw LimitExceeded("solve_exhaustive: " + std::to_string(inst.n()) + " UEs exceeds the limit of " +
                        std::to_string(opts.max_ues));
  ExhaustiveSearch search(inst, rho, opts);
  search.run();
  search.finish();
  if (!search.have_best()) throw Infeasible("solve_exhaustive: no assignment satisfies C1-C3 in strict mode");
  OptimalSolution s;
  s.assignment = search.best();
  s.assignment.normalize();
  s.utility = search.best_utility();
  s.configs_visited = search.visited();
  s.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  return s;
}

nlohmann::json to_json(const OptimalSolution& s) {
  nlohmann::json j = to_json(s.assignment);
  j["utility"] = score_to_json(s.utility);
  j["configs_visited"] = s.configs_visited.str();
  j["elapsed_us"] = s.elapsed.count();
  return j;
}

}  // namespace leadsel
