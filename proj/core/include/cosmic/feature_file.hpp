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

// On-disk formats for precomputed embeddings.
//
// Feature file (little-endian):
//   offset 0   char[4]  magic "CSMF"
//   offset 4   u16      version (1)
//   offset 6   u8       space tag (0 = CSS, 1 = AFV)
//   offset 7   u8       dtype (0 = f32)
//   offset 8   u32      dim
//   offset 12  u32      count
//   offset 16  f32[count * dim] row-major payload
//
// Labels file: count x u32, little-endian, no header.
//
// Manifest (JSON): {k, class_names, text_features, css_stream, afv_stream,
// labels, views_per_sample}; paths are relative to the manifest's directory.
// Stream files hold views_per_sample consecutive rows per sample, view 0 first.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "cosmic/math.hpp"
#include "cosmic/pipeline.hpp"

namespace cosmic {

using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::uint16_t kFeatureFileVersion = 1;
inline constexpr std::size_t kFeatureHeaderBytes = 16;

struct FeatureFile {
  Space space = Space::kCss;
  FloatMatrix rows;  // count x dim
};

std::vector<std::uint8_t> encode_feature_file(const FeatureFile& file);
// Throws BadMagic, VersionUnsupported, TruncatedPayload, NonUnitVectors or
// SchemaMismatch (unknown dtype or space, trailing bytes).
FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes);

void write_feature_file(const std::filesystem::path& path, const FeatureFile& file);
FeatureFile read_feature_file(const std::filesystem::path& path);

void write_labels(const std::filesystem::path& path, std::span<const std::uint32_t> labels);
std::vector<std::uint32_t> read_labels(const std::filesystem::path& path);

struct Manifest {
  int k = 0;
  std::vector<std::string> class_names;
  std::string text_features;
  std::string css_stream;
  std::string afv_stream;
  std::string labels;
  int views_per_sample = 1;
};

Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

// Loads and cross-checks every file named by the manifest (SchemaMismatch on
// inconsistent counts, spaces or labels).
Dataset load_dataset(const std::filesystem::path& manifest_path);

// Writes text_features.csmf, css_stream.csmf, afv_stream.csmf, labels.u32 and
// manifest.json into `dir`. Every sample must carry the same number of views.
// Returns the manifest path.
std::filesystem::path write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace cosmic
