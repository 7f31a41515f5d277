#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kszlab/tensor.hpp"

namespace kszlab {

/// Standard base64 alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);

/// Strict decoder: rejects foreign characters, bad padding and non-zero
/// trailing bits.
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Packs signs one bit per entry in row-major order, most significant bit
/// first within each byte; 1 means +1, 0 means -1. Unused trailing bits of
/// the last byte are zero.
std::vector<std::uint8_t> pack_signs(const SignTensor& a);
SignTensor unpack_signs(Shape shape, std::span<const std::uint8_t> bytes);

/// {"dims": [...], "signs": "<base64 of pack_signs>"}
nlohmann::json sign_tensor_to_json(const SignTensor& a);
SignTensor sign_tensor_from_json(const nlohmann::json& j);

nlohmann::json point_tuple_to_json(const PointTuple& x);
nlohmann::json exponents_to_json(std::span<const Exponent> p);

}  // namespace kszlab
