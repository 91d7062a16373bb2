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

#include "cosmic/feature_file.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include <nlohmann/json.hpp>

#include "cosmic/error.hpp"

namespace cosmic {

namespace fs = std::filesystem;

namespace {

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>((v >> s) & 0xFF));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
  std::uint32_t v = 0;
  for (std::size_t i = 0; i < 4; ++i) v |= std::uint32_t{b[at + i]} << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_feature_file(const FeatureFile& file) {
  const auto count = static_cast<std::uint64_t>(file.rows.rows());
  const auto dim = static_cast<std::uint64_t>(file.rows.cols());
  if (count > UINT32_MAX || dim > UINT32_MAX) {
    throw Error(ErrorCode::kInvalidArgument, "feature matrix too large for the file format");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kFeatureHeaderBytes + count * dim * 4);
  for (char c : {'C', 'S', 'M', 'F'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u16(out, kFeatureFileVersion);
  out.push_back(static_cast<std::uint8_t>(file.space));
  out.push_back(0);  // f32
  put_u32(out, static_cast<std::uint32_t>(dim));
  put_u32(out, static_cast<std::uint32_t>(count));
  const float* data = file.rows.data();
  for (std::uint64_t i = 0; i < count * dim; ++i) put_u32(out, std::bit_cast<std::uint32_t>(data[i]));
  return out;
}

FeatureFile decode_feature_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || bytes[0] != 'C' || bytes[1] != 'S' || bytes[2] != 'M' ||
      bytes[3] != 'F') {
    throw Error(ErrorCode::kBadMagic, "not a feature file (magic mismatch)");
  }
  if (bytes.size() < kFeatureHeaderBytes) {
    throw Error(ErrorCode::kTruncatedPayload, "feature file header is truncated");
  }
  const std::uint16_t version = get_u16(bytes, 4);
  if (version != kFeatureFileVersion) {
    throw Error(ErrorCode::kVersionUnsupported,
                "feature file version " + std::to_string(version) + " is not supported");
  }
  const std::uint8_t space = bytes[6];
  const std::uint8_t dtype = bytes[7];
  if (space > 1) throw Error(ErrorCode::kSchemaMismatch, "unknown space tag");
  if (dtype != 0) throw Error(ErrorCode::kSchemaMismatch, "unsupported dtype");
  const std::uint64_t dim = get_u32(bytes, 8);
  const std::uint64_t count = get_u32(bytes, 12);
  const std::uint64_t payload = count * dim * 4;
  if (bytes.size() - kFeatureHeaderBytes < payload) {
    throw Error(ErrorCode::kTruncatedPayload,
                "payload needs " + std::to_string(payload) + " bytes, file has " +
                    std::to_string(bytes.size() - kFeatureHeaderBytes));
  }
  if (bytes.size() - kFeatureHeaderBytes > payload) {
    throw Error(ErrorCode::kSchemaMismatch, "trailing bytes after the feature payload");
  }

  FeatureFile file;
  file.space = static_cast<Space>(space);
  file.rows.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  float* data = file.rows.data();
  for (std::uint64_t i = 0; i < count * dim; ++i) {
    data[i] = std::bit_cast<float>(get_u32(bytes, kFeatureHeaderBytes + i * 4));
  }
  for (Eigen::Index r = 0; r < file.rows.rows(); ++r) {
    const double norm = file.rows.row(r).cast<double>().norm();
    if (!(std::abs(norm - 1.0) <= kUnitNormTolerance)) {
      throw Error(ErrorCode::kNonUnitVectors,
                  "row " + std::to_string(r) + " has norm " + std::to_string(norm));
    }
  }
  return file;
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  // Write-then-rename so readers never observe a partial file.
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::kIoError, "write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot move " + tmp.string() + ": " + ec.message());
}

std::string read_text_file(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void write_text_file(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

void write_feature_file(const fs::path& path, const FeatureFile& file) {
  write_file_bytes(path, encode_feature_file(file));
}

FeatureFile read_feature_file(const fs::path& path) {
  return decode_feature_file(read_file_bytes(path));
}

void write_labels(const fs::path& path, std::span<const std::uint32_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(labels.size() * 4);
  for (auto l : labels) put_u32(out, l);
  write_file_bytes(path, out);
}

std::vector<std::uint32_t> read_labels(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 4 != 0) {
    throw Error(ErrorCode::kTruncatedPayload, "label file size is not a multiple of 4");
  }
  std::vector<std::uint32_t> labels(bytes.size() / 4);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = get_u32(bytes, i * 4);
  return labels;
}

Manifest read_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kSchemaMismatch, "manifest is not valid JSON: " + std::string(e.what()));
  }
  try {
    Manifest m;
    m.k = j.at("k").get<int>();
    m.class_names = j.value("class_names", std::vector<std::string>{});
    m.text_features = j.at("text_features").get<std::string>();
    m.css_stream = j.at("css_stream").get<std::string>();
    m.afv_stream = j.at("afv_stream").get<std::string>();
    m.labels = j.at("labels").get<std::string>();
    m.views_per_sample = j.at("views_per_sample").get<int>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, "manifest: " + std::string(e.what()));
  }
}

void write_manifest(const fs::path& path, const Manifest& m) {
  const nlohmann::json j = {
      {"k", m.k},
      {"class_names", m.class_names},
      {"text_features", m.text_features},
      {"css_stream", m.css_stream},
      {"afv_stream", m.afv_stream},
      {"labels", m.labels},
      {"views_per_sample", m.views_per_sample},
  };
  write_text_file(path, j.dump(2) + "\n");
}

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorCode::kSchemaMismatch, message);
}

}  // namespace

Dataset load_dataset(const fs::path& manifest_path) {
  const Manifest m = read_manifest(manifest_path);
  const fs::path base = manifest_path.parent_path();
  require(m.k >= 1, "manifest: k must be >= 1");
  require(m.views_per_sample >= 1, "manifest: views_per_sample must be >= 1");
  require(m.class_names.empty() || m.class_names.size() == static_cast<std::size_t>(m.k),
          "manifest: class_names must list k names");

  const FeatureFile text = read_feature_file(base / m.text_features);
  const FeatureFile css = read_feature_file(base / m.css_stream);
  const FeatureFile afv = read_feature_file(base / m.afv_stream);
  const auto labels = read_labels(base / m.labels);

  require(text.space == Space::kCss && css.space == Space::kCss, "manifest: text/css files must be CSS");
  require(afv.space == Space::kAfv, "manifest: afv stream must be tagged AFV");
  require(text.rows.rows() == m.k, "manifest: text feature count differs from k");
  require(css.rows.cols() == text.rows.cols(), "manifest: css stream width differs from text features");
  require(css.rows.rows() == afv.rows.rows(), "manifest: css and afv stream counts differ");
  require(css.rows.rows() % m.views_per_sample == 0,
          "manifest: stream count is not divisible by views_per_sample");
  const auto n = static_cast<std::size_t>(css.rows.rows() / m.views_per_sample);
  require(labels.size() == n, "manifest: label count differs from stream count / views_per_sample");

  Dataset ds;
  ds.text_features = text.rows.cast<double>();
  ds.afv_dim = afv.rows.cols();
  ds.class_names = m.class_names;
  if (ds.class_names.empty()) {
    for (int i = 0; i < m.k; ++i) ds.class_names.push_back("class_" + std::to_string(i));
  }
  ds.samples.resize(n);
  for (std::size_t s = 0; s < n; ++s) {
    require(labels[s] < static_cast<std::uint32_t>(m.k),
            "manifest: label " + std::to_string(labels[s]) + " outside [0, k)");
    auto& sample = ds.samples[s];
    sample.label = static_cast<int>(labels[s]);
    sample.views.reserve(static_cast<std::size_t>(m.views_per_sample));
    for (int v = 0; v < m.views_per_sample; ++v) {
      const auto row = static_cast<Eigen::Index>(s) * m.views_per_sample + v;
      sample.views.push_back(View{{css.rows.row(row).cast<double>().transpose(), Space::kCss},
                                  {afv.rows.row(row).cast<double>().transpose(), Space::kAfv}});
    }
  }
  return ds;
}

fs::path write_dataset(const fs::path& dir, const Dataset& dataset) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  const auto k = static_cast<int>(dataset.text_features.rows());
  const std::size_t n = dataset.samples.size();
  const int views = n == 0 ? 1 : static_cast<int>(dataset.samples.front().views.size());
  const Eigen::Index d1 = dataset.text_features.cols();
  const Eigen::Index d2 = dataset.afv_dim;

  FeatureFile css{Space::kCss, FloatMatrix(static_cast<Eigen::Index>(n) * views, d1)};
  FeatureFile afv{Space::kAfv, FloatMatrix(static_cast<Eigen::Index>(n) * views, d2)};
  std::vector<std::uint32_t> labels;
  labels.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const auto& sample = dataset.samples[s];
    if (static_cast<int>(sample.views.size()) != views) {
      throw Error(ErrorCode::kSchemaMismatch, "every sample must carry the same number of views");
    }
    for (int v = 0; v < views; ++v) {
      const auto row = static_cast<Eigen::Index>(s) * views + v;
      css.rows.row(row) = sample.views[static_cast<std::size_t>(v)].css.values.cast<float>().transpose();
      afv.rows.row(row) = sample.views[static_cast<std::size_t>(v)].afv.values.cast<float>().transpose();
    }
    labels.push_back(static_cast<std::uint32_t>(sample.label));
  }

  write_feature_file(dir / "text_features.csmf",
                     FeatureFile{Space::kCss, dataset.text_features.cast<float>()});
  write_feature_file(dir / "css_stream.csmf", css);
  write_feature_file(dir / "afv_stream.csmf", afv);
  write_labels(dir / "labels.u32", labels);

  Manifest m;
  m.k = k;
  m.class_names = dataset.class_names;
  m.text_features = "text_features.csmf";
  m.css_stream = "css_stream.csmf";
  m.afv_stream = "afv_stream.csmf";
  m.labels = "labels.u32";
  m.views_per_sample = views;
  const fs::path manifest = dir / "manifest.json";
  write_manifest(manifest, m);
  return manifest;
}

}  // namespace cosmic
