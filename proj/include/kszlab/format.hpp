#pragma once

#include <span>
#include <string>
#include <string_view>

namespace kszlab {

/// Shortest decimal that round-trips to the same double; locale independent.
/// Non-finite values print as "inf", "-inf" or "nan".
std::string format_double(double value);

/// Joins formatted values with `sep`.
std::string join_doubles(std::span<const double> values, std::string_view sep);

}  // namespace kszlab
