#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace leadsel {

/// Fixed-point score with micro-unit resolution.
///
/// LII/LXI values live on [0,10]; the benchmark model only ever draws integers,
/// so sums and comparisons stay exact. Real-valued inputs are rounded to the
/// nearest micro-unit on construction.
class Score {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Score() = default;
  // Implicit on purpose: score tables are written as integer literals.
  constexpr Score(int whole) : units_(static_cast<std::int64_t>(whole) * kScale) {}

  static constexpr Score from_units(std::int64_t units) {
    Score s;
    s.units_ = units;
    return s;
  }
  static Score from_double(double value) {
    return from_units(static_cast<std::int64_t>(std::llround(value * static_cast<double>(kScale))));
  }

  constexpr std::int64_t units() const { return units_; }
  double to_double() const { return static_cast<double>(units_) / static_cast<double>(kScale); }
  constexpr bool is_integral() const { return units_ % kScale == 0; }

  constexpr Score& operator+=(Score o) {
    units_ += o.units_;
    return *this;
  }
  constexpr Score& operator-=(Score o) {
    units_ -= o.units_;
    return *this;
  }
  friend constexpr Score operator+(Score a, Score b) { return a += b; }
  friend constexpr Score operator-(Score a, Score b) { return a -= b; }
  friend constexpr Score operator*(Score a, std::int64_t k) { return from_units(a.units_ * k); }
  friend constexpr auto operator<=>(Score, Score) = default;
  friend constexpr bool operator==(Score, Score) = default;

  std::string str() const;

 private:
  std::int64_t units_ = 0;
};

std::ostream& operator<<(std::ostream& os, Score s);

inline constexpr Score kMinScore = Score(0);
inline constexpr Score kMaxScore = Score(10);

constexpr bool in_score_range(Score s) { return s >= kMinScore && s <= kMaxScore; }

/// Leader-candidacy threshold rho; candidacy requires LII strictly above it.
class Threshold {
 public:
  constexpr Threshold() = default;
  constexpr explicit Threshold(Score rho) : rho_(rho) {}
  /// Clamps to [0,10].
  static Threshold clamped(Score rho) {
    if (rho < kMinScore) return Threshold(kMinScore);
    if (rho > kMaxScore) return Threshold(kMaxScore);
    return Threshold(rho);
  }

  constexpr Score value() const { return rho_; }
  constexpr bool admits(Score lii) const { return lii > rho_; }

  friend constexpr bool operator==(Threshold, Threshold) = default;

 private:
  Score rho_{};
};

}  // namespace leadsel
