#pragma once

#include <cstddef>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace leadsel {

using BigInt = boost::multiprecision::cpp_int;

/// Exact configuration count; never overflows.
struct ConfigCount {
  BigInt value;

  std::string str() const { return value.str(); }
  friend auto operator<=>(const ConfigCount& a, const ConfigCount& b) {
    if (a.value < b.value) return std::strong_ordering::less;
    if (a.value > b.value) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  friend bool operator==(const ConfigCount& a, const ConfigCount& b) { return a.value == b.value; }
};

/// Stirling number of the second kind via S(n+1,k) = k S(n,k) + S(n,k-1).
ConfigCount stirling2(std::size_t n, std::size_t k);

BigInt binomial(std::size_t n, std::size_t k);
BigInt factorial(std::size_t n);

/// sum_{k=1}^{floor(N/2)} k! C(N,k) S(N-k,k): leader sets with every leader
/// holding at least one follower.
ConfigCount count_configs_exhaustive(std::size_t n);

/// sum_{k=1}^{min(L, floor(N/2))} k! C(L,k) S(N-L,k) k^(L-k): upper bound on
/// the cluster configurations reachable by the two-phase protocol for fixed
/// candidate/follower sets of sizes L and N-L.
ConfigCount count_configs_distributed_bound(std::size_t n, std::size_t l);

}  // namespace leadsel
