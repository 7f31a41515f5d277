#include "kszlab/serialization.hpp"

#include <array>

#include "kszlab/errors.hpp"

namespace kszlab {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t v = bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InvalidArgument("base64 length must be a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    std::size_t pad = 0;
    if (last) {
      if (text[i + 3] == '=') ++pad;
      if (text[i + 2] == '=') ++pad;
      if (pad == 1 && text[i + 2] == '=') throw InvalidArgument("malformed base64 padding");
    }
    std::array<int, 4> v{};
    for (std::size_t j = 0; j < 4 - pad; ++j) {
      v[j] = decode_char(text[i + j]);
      if (v[j] < 0) throw InvalidArgument("invalid base64 character");
    }
    const std::uint32_t word = (v[0] << 18) | (v[1] << 12) | (v[2] << 6) | v[3];
    out.push_back(static_cast<std::uint8_t>(word >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(word >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(word));
    if ((pad == 1 && (v[2] & 0x3)) || (pad == 2 && (v[1] & 0xf))) {
      throw InvalidArgument("non-canonical base64 trailing bits");
    }
  }
  return out;
}

std::vector<std::uint8_t> pack_signs(const SignTensor& a) {
  std::vector<std::uint8_t> bytes((a.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > 0) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  }
  return bytes;
}

SignTensor unpack_signs(Shape shape, std::span<const std::uint8_t> bytes) {
  const std::size_t n = shape.size();
  if (bytes.size() != (n + 7) / 8) {
    throw InvalidArgument("packed sign data has " + std::to_string(bytes.size()) +
                          " bytes, expected " + std::to_string((n + 7) / 8));
  }
  std::vector<std::int8_t> signs(n);
  for (std::size_t i = 0; i < n; ++i) {
    signs[i] = (bytes[i / 8] & (0x80u >> (i % 8))) ? 1 : -1;
  }
  for (std::size_t i = n; i < bytes.size() * 8; ++i) {
    if (bytes[i / 8] & (0x80u >> (i % 8))) {
      throw InvalidArgument("packed sign data has non-zero padding bits");
    }
  }
  return SignTensor(std::move(shape), std::move(signs));
}

nlohmann::json sign_tensor_to_json(const SignTensor& a) {
  nlohmann::json j;
  j["dims"] = a.shape().dims();
  j["signs"] = base64_encode(pack_signs(a));
  return j;
}

SignTensor sign_tensor_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dims") || !j.contains("signs")) {
    throw InvalidArgument("sign tensor JSON needs \"dims\" and \"signs\"");
  }
  std::vector<std::size_t> dims;
  for (const auto& d : j.at("dims")) {
    if (!d.is_number_unsigned()) throw InvalidArgument("dims must be positive integers");
    dims.push_back(d.get<std::size_t>());
  }
  if (!j.at("signs").is_string()) throw InvalidArgument("\"signs\" must be a base64 string");
  const auto bytes = base64_decode(j.at("signs").get<std::string>());
  return unpack_signs(Shape(std::move(dims)), bytes);
}

nlohmann::json point_tuple_to_json(const PointTuple& x) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& v : x) j.push_back(v);
  return j;
}

nlohmann::json exponents_to_json(std::span<const Exponent> p) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : p) {
    if (e.is_infinite()) {
      j.push_back("inf");
    } else {
      j.push_back(e.value());
    }
  }
  return j;
}

}  // namespace kszlab
