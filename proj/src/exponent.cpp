#include "kszlab/exponent.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "kszlab/errors.hpp"
#include "kszlab/format.hpp"

namespace kszlab {

namespace {

double parse_number(std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InvalidArgument("cannot parse number '" + std::string(token) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Exponent Exponent::conjugate() const {
  if (infinite_) return Exponent(1.0);
  if (value_ == 1.0) return infinity();
  return Exponent(value_ / (value_ - 1.0));
}

double Exponent::as_double() const {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

Exponent parse_exponent(std::string_view token) {
  token = trim(token);
  if (token == "inf" || token == "infinity" || token == "Inf" || token == "INF") {
    return Exponent::infinity();
  }
  double value = 0.0;
  if (auto slash = token.find('/'); slash != std::string_view::npos) {
    const double num = parse_number(trim(token.substr(0, slash)));
    const double den = parse_number(trim(token.substr(slash + 1)));
    if (den == 0.0) throw InvalidArgument("zero denominator in '" + std::string(token) + "'");
    value = num / den;
  } else {
    value = parse_number(token);
  }
  if (!std::isfinite(value) || value <= 0.0) {
    throw InvalidArgument("exponent must be positive: '" + std::string(token) + "'");
  }
  return Exponent(value);
}

std::vector<Exponent> parse_exponent_list(std::string_view text) {
  std::vector<Exponent> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_exponent(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void validate_p_exponents(std::span<const Exponent> p) {
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (!p[k].is_infinite() && !(p[k].value() >= 1.0)) {
      throw InvalidArgument("p[" + std::to_string(k) + "] = " + to_string(p[k]) +
                            " is below 1");
    }
  }
}

Exponent max_exponent(std::span<const Exponent> p) {
  Exponent best(1.0);
  for (const auto& e : p) {
    if (e.is_infinite()) return Exponent::infinity();
    if (e.value() > best.value()) best = e;
  }
  return best;
}

double reciprocal_sum(std::span<const Exponent> p) {
  double s = 0.0;
  for (const auto& e : p) s += e.reciprocal();
  return s;
}

std::string to_string(const Exponent& e) {
  return e.is_infinite() ? std::string("inf") : format_double(e.value());
}

}  // namespace kszlab
