#include "leadsel/oracle.hpp"

#include <array>
#include <string>
#include <vector>

#include "leadsel/errors.hpp"

namespace leadsel::oracle {

namespace {

// Choice digits per node: 0 = leader, 1 = no role, 2+j = follow nodes[j].
// The edge server only gets digits 0 and 1.
class RoleOdometer {
 public:
  explicit RoleOdometer(const Instance& inst) : nodes_(inst.nodes()), digits_(nodes_.size(), 0) {
    for (UeId id : nodes_) radix_.push_back(id == kEdgeServer ? 2 : nodes_.size() + 2);
  }

  bool advance() {
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      if (++digits_[i] < radix_[i]) return true;
      digits_[i] = 0;
    }
    return false;
  }

  // Cheap rejection before building anything: followers must point at a
  // leader digit other than themselves, and every leader needs a follower.
  bool plausible() const {
    std::size_t leaders = 0, covered = 0;
    std::array<bool, kMaxOracleUes + 1> has_follower{};
    for (std::size_t i = 0; i < digits_.size(); ++i) {
      const std::size_t d = digits_[i];
      if (d == 0) {
        ++leaders;
      } else if (d >= 2) {
        const std::size_t t = d - 2;
        if (t == i || digits_[t] != 0) return false;
        if (!has_follower[t]) {
          has_follower[t] = true;
          ++covered;
        }
      }
    }
    return covered == leaders;
  }

  // nullopt when a UE would follow itself.
  std::optional<Assignment> decode() const {
    Assignment a;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      const UeId id = nodes_[i];
      const std::size_t d = digits_[i];
      if (d == 0) {
        a.leaders.push_back(id);
      } else if (d == 1) {
        if (id != kEdgeServer) a.isolated.push_back(id);
      } else {
        const UeId target = nodes_[d - 2];
        if (target == id) return std::nullopt;
        a.follows[id] = target;
      }
    }
    a.normalize();
    return a;
  }

 private:
  std::vector<UeId> nodes_;
  std::vector<std::size_t> digits_;
  std::vector<std::size_t> radix_;
};

bool better(const Instance& inst, Score u, const Assignment& a, Score best_u, const Assignment& best) {
  if (u != best_u) return u > best_u;
  if (a.leaders != best.leaders) return a.leaders < best.leaders;
  // Isolated sorts last, leaders before that.
  auto key = [&](const Assignment& x) {
    std::vector<std::uint64_t> k;
    for (UeId id : inst.ues()) {
      if (auto l = x.leader_of(id))
        k.push_back(*l);
      else if (x.is_leader(id))
        k.push_back(1ULL << 40);
      else
        k.push_back(1ULL << 41);
    }
    return k;
  };
  return key(a) < key(best);
}

void check_size(const Instance& inst) {
  if (inst.n() > kMaxOracleUes)
    throw LimitExceeded("brute_force_oracle: " + std::to_string(inst.n()) + " UEs exceeds " +
                        std::to_string(kMaxOracleUes));
}

}  // namespace

OracleResult brute_force_oracle(const Instance& inst, Threshold rho, const std::optional<Capacities>& caps,
                                SolveMode mode) {
  check_size(inst);
  RoleOdometer odo(inst);
  OracleResult res;
  bool found = false;
  do {
    if (!odo.plausible()) continue;
    auto a = odo.decode();
    if (!a) continue;
    ++res.assignments_checked;
    const ConstraintReport r = check_constraints(inst, *a, rho, caps, mode);
    if (!r.all_ok()) continue;
    const Score u = utility(inst, *a);
    if (!found || better(inst, u, *a, res.utility, res.assignment)) {
      res.assignment = std::move(*a);
      res.utility = u;
      found = true;
    }
  } while (odo.advance());
  if (!found) throw Infeasible("brute_force_oracle: no assignment satisfies C1-C3");
  return res;
}

std::uint64_t count_valid_assignments(const Instance& inst, Threshold rho, bool require_positive_lxi) {
  check_size(inst);
  RoleOdometer odo(inst);
  std::uint64_t count = 0;
  do {
    if (!odo.plausible()) continue;
    auto a = odo.decode();
    if (!a) continue;
    const ConstraintReport r = check_constraints(inst, *a, rho, std::nullopt, SolveMode::strict);
    if (r.c1_ok && r.c2_ok && r.c3_ok && (r.eligibility_ok || !require_positive_lxi)) ++count;
  } while (odo.advance());
  return count;
}

}  // namespace leadsel::oracle
