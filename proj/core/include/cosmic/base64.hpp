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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosmic/math.hpp"

namespace cosmic {

// RFC 4648 alphabet with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws SchemaMismatch on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Little-endian f32 packing of a vector, base64 encoded.
std::string encode_f32(const Vector& v);
// Throws SchemaMismatch when the payload is not `expected_len` floats.
Vector decode_f32(std::string_view text, Eigen::Index expected_len);

}  // namespace cosmic
