#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>

namespace leadsel {

/// Seeded random stream used by every stochastic component.
///
/// Engine: std::mt19937_64 (output sequence fixed by the C++ standard).
/// Integers: rejection sampling on the raw 64-bit output, so values do not
/// depend on the standard library's distribution implementations.
/// Reals: top 53 bits scaled by 2^-53.
/// Seed derivation: SplitMix64 finalizer folded over the key parts.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64+splitmix64/v1";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the closed range [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform on [0, 1).
  double uniform_real();

  bool bernoulli(double p);

  /// Fisher-Yates, back to front.
  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      auto j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Child seed for (master, key...). Order of parts matters.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> parts);

}  // namespace leadsel
