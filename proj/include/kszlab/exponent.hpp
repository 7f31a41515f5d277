#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kszlab {

/// An exponent p in [1, inf] (or, for mixed-norm use, any positive value).
/// Infinity is a distinct state, never a large finite double.
class Exponent {
public:
  constexpr Exponent() = default;
  constexpr explicit Exponent(double value) : value_(value) {}

  static constexpr Exponent infinity() {
    Exponent e;
    e.infinite_ = true;
    e.value_ = 0.0;
    return e;
  }

  constexpr bool is_infinite() const { return infinite_; }

  /// Finite value; meaningless when is_infinite().
  constexpr double value() const { return value_; }

  /// 1/p, with 1/inf = 0.
  double reciprocal() const { return infinite_ ? 0.0 : 1.0 / value_; }

  /// Hoelder conjugate p' with 1/p + 1/p' = 1; exact for 1 <-> inf.
  Exponent conjugate() const;

  /// Value as a double (+inf for the infinite token). For display and
  /// comparisons only.
  double as_double() const;

  friend bool operator==(const Exponent& a, const Exponent& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend bool operator<(const Exponent& a, const Exponent& b) {
    return a.as_double() < b.as_double();
  }
  friend bool operator<=(const Exponent& a, const Exponent& b) {
    return a == b || a < b;
  }

private:
  double value_ = 1.0;
  bool infinite_ = false;
};

/// Per-coordinate exponents p_1..p_d, every entry >= 1.
using PExponents = std::vector<Exponent>;

/// Parses "inf", "infinity", a decimal, or a fraction "a/b".
Exponent parse_exponent(std::string_view token);

/// Parses a comma-separated list of exponents.
std::vector<Exponent> parse_exponent_list(std::string_view text);

/// Throws InvalidArgument unless every entry is >= 1.
void validate_p_exponents(std::span<const Exponent> p);

/// Largest entry of p (infinity if any entry is infinite).
Exponent max_exponent(std::span<const Exponent> p);

/// |1/p| = sum of reciprocals.
double reciprocal_sum(std::span<const Exponent> p);

/// "inf" or the shortest round-trip decimal.
std::string to_string(const Exponent& e);

}  // namespace kszlab
