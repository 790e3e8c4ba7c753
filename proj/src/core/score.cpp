#include "leadsel/score.hpp"

#include <cstdlib>
#include <ostream>
#include <sstream>

namespace leadsel {

std::string Score::str() const {
  const bool negative = units_ < 0;
  const std::int64_t mag = negative ? -units_ : units_;
  std::ostringstream os;
  if (negative) os << '-';
  os << mag / kScale;
  std::int64_t frac = mag % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    os << '.' << digits;
  }
  return os.str();
}

std::ostream& operator<<(std::ostream& os, Score s) { return os << s.str(); }

}  // namespace leadsel
