#ifndef SUPERINT_RATIONAL_HPP
#define SUPERINT_RATIONAL_HPP

#include <charconv>
#include <numeric>
#include <string>
#include <string_view>

#include "superint/core.hpp"

namespace superint {

/// Positive rational p/q kept in lowest terms. The deformation parameter k
/// lives here so that exponents derived from it stay exact integers.
class Rational {
 public:
  Rational() = default;

  Rational(long p, long q) : p_(p), q_(q) {
    if (p < 1 || q < 1) {
      throw Error(ErrorKind::invalid_argument,
                  "rational k = p/q requires p >= 1 and q >= 1");
    }
    const long g = std::gcd(p_, q_);
    p_ /= g;
    q_ /= g;
  }

  long num() const noexcept { return p_; }
  long den() const noexcept { return q_; }
  double value() const noexcept {
    return static_cast<double>(p_) / static_cast<double>(q_);
  }

  Rational doubled() const { return Rational(2 * p_, q_); }

  std::string to_string() const {
    return std::to_string(p_) + "/" + std::to_string(q_);
  }

  /// Accepts "p/q" or a bare positive integer "p".
  static Rational parse(std::string_view text) {
    auto parse_long = [&](std::string_view part) {
      long v = 0;
      const auto* end = part.data() + part.size();
      auto [ptr, ec] = std::from_chars(part.data(), end, v);
      if (ec != std::errc{} || ptr != end || part.empty()) {
        throw Error(ErrorKind::invalid_argument,
                    "malformed rational '" + std::string(text) + "'");
      }
      return v;
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_long(text), 1);
    return Rational(parse_long(text.substr(0, slash)),
                    parse_long(text.substr(slash + 1)));
  }

  friend bool operator==(const Rational&, const Rational&) = default;

 private:
  long p_ = 1;
  long q_ = 1;
};

}  // namespace superint

#endif  // SUPERINT_RATIONAL_HPP
