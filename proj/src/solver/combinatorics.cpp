#include "leadsel/combinatorics.hpp"

#include <algorithm>
#include <mutex>
#include <vector>

#include "leadsel/errors.hpp"

namespace leadsel {

namespace {

// Rows grow on demand; table[n][k] for k <= n.
class StirlingTable {
 public:
  BigInt get(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    std::lock_guard lock(mu_);
    while (rows_.size() <= n) extend();
    return rows_[n][k];
  }

 private:
  void extend() {
    const std::size_t n = rows_.size();
    std::vector<BigInt> row(n + 1, 0);
    if (n == 0) {
      row[0] = 1;
    } else {
      const auto& prev = rows_[n - 1];
      for (std::size_t k = 1; k <= n; ++k) {
        BigInt stay = k < prev.size() ? BigInt(k) * prev[k] : BigInt(0);
        row[k] = stay + prev[k - 1];
      }
    }
    rows_.push_back(std::move(row));
  }

  std::mutex mu_;
  std::vector<std::vector<BigInt>> rows_;
};

StirlingTable& table() {
  static StirlingTable t;
  return t;
}

}  // namespace

ConfigCount stirling2(std::size_t n, std::size_t k) { return {table().get(n, k)}; }

BigInt factorial(std::size_t n) {
  BigInt r = 1;
  for (std::size_t i = 2; i <= n; ++i) r *= i;
  return r;
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

ConfigCount count_configs_exhaustive(std::size_t n) {
  if (n == 0) throw InvalidArgument("count_configs_exhaustive: n must be at least 1");
  BigInt total = 0;
  for (std::size_t k = 1; k <= n / 2; ++k) total += factorial(k) * binomial(n, k) * stirling2(n - k, k).value;
  return {total};
}

ConfigCount count_configs_distributed_bound(std::size_t n, std::size_t l) {
  if (l > n) throw InvalidArgument("count_configs_distributed_bound: l must not exceed n");
  BigInt total = 0;
  const std::size_t top = std::min(l, n / 2);
  for (std::size_t k = 1; k <= top; ++k) {
    BigInt spread = boost::multiprecision::pow(BigInt(k), static_cast<unsigned>(l - k));
    total += factorial(k) * binomial(l, k) * stirling2(n - l, k).value * spread;
  }
  return {total};
}

}  // namespace leadsel
