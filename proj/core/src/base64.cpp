// Copyright 2026 The COSMIC Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cosmic/base64.hpp"

#include <array>
#include <bit>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

constexpr std::array<int, 256> make_reverse() {
  std::array<int, 256> table{};
  for (auto& t : table) t = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  }
  return table;
}

constexpr auto kReverse = make_reverse();

[[noreturn]] void malformed() {
  throw Error(ErrorCode::kSchemaMismatch, "malformed base64 payload");
}

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) |
                            bytes[i + 2];
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += kAlphabet[n & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest == 1) {
    const std::uint32_t n = std::uint32_t{bytes[i]} << 16;
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += "==";
  } else if (rest == 2) {
    const std::uint32_t n = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8);
    out += kAlphabet[(n >> 18) & 63];
    out += kAlphabet[(n >> 12) & 63];
    out += kAlphabet[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) malformed();
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    const bool last = i + 4 == text.size();
    int pad = 0;
    std::uint32_t n = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      const char ch = text[i + j];
      int value = 0;
      if (ch == '=') {
        if (!last || j < 2) malformed();
        ++pad;
      } else {
        if (pad > 0) malformed();
        value = kReverse[static_cast<unsigned char>(ch)];
        if (value < 0) malformed();
      }
      n = (n << 6) | static_cast<std::uint32_t>(value);
    }
    out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n & 0xFF));
  }
  return out;
}

std::string encode_f32(const Vector& v) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(static_cast<std::size_t>(v.size()) * 4);
  for (const double x : v) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(x));
    for (int s = 0; s < 32; s += 8) bytes.push_back(static_cast<std::uint8_t>((bits >> s) & 0xFF));
  }
  return base64_encode(bytes);
}

Vector decode_f32(std::string_view text, Eigen::Index expected_len) {
  const auto bytes = base64_decode(text);
  if (bytes.size() != static_cast<std::size_t>(expected_len) * 4) {
    throw Error(ErrorCode::kSchemaMismatch,
                "f32 payload holds " + std::to_string(bytes.size() / 4) + " values, expected " +
                    std::to_string(expected_len));
  }
  Vector v(expected_len);
  for (Eigen::Index i = 0; i < expected_len; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) {
      bits |= std::uint32_t{bytes[static_cast<std::size_t>(i * 4 + b)]} << (8 * b);
    }
    v[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return v;
}

}  // namespace cosmic
