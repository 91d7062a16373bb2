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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "cosmic/error.hpp"
#include "test_support.hpp"

namespace cosmic {
namespace {

namespace fs = std::filesystem;
using testing::code_of;
using testing::Rng;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("cosmic_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

FeatureFile random_file(Rng& rng, int count, int dim, Space space) {
  return FeatureFile{space, rng.unit_rows(count, dim).cast<float>()};
}

TEST(FeatureFileTest, RoundTripIsBitIdentical) {
  Rng rng(91);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_file(rng, rng.uniform_int(0, 20), rng.uniform_int(1, 16),
                               t % 2 ? Space::kAfv : Space::kCss);
    const auto bytes = encode_feature_file(f);
    EXPECT_EQ(bytes.size(), kFeatureHeaderBytes + 4u * f.rows.size());
    const auto back = decode_feature_file(bytes);
    EXPECT_EQ(back.space, f.space);
    EXPECT_EQ(back.rows, f.rows);
    EXPECT_EQ(encode_feature_file(back), bytes);
  }
}

TEST(FeatureFileTest, HeaderLayout) {
  const FeatureFile f{Space::kAfv, FloatMatrix::Identity(3, 2)};
  const auto b = encode_feature_file(f);
  EXPECT_EQ(std::string(b.begin(), b.begin() + 4), "CSMF");
  EXPECT_EQ(b[4], 1);
  EXPECT_EQ(b[5], 0);
  EXPECT_EQ(b[6], 1);  // AFV
  EXPECT_EQ(b[7], 0);  // f32
  EXPECT_EQ(b[8], 2);  // dim
  EXPECT_EQ(b[12], 3);  // count
  // 1.0f little-endian.
  EXPECT_EQ(b[16], 0x00);
  EXPECT_EQ(b[19], 0x3f);
}

TEST(FeatureFileTest, Errors) {
  Rng rng(92);
  const auto good = encode_feature_file(random_file(rng, 3, 4, Space::kCss));

  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kBadMagic);

  bad = good;
  bad.resize(bad.size() - 4);
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(code_of([&] { decode_feature_file(std::span(good.data(), 10)); }),
            ErrorCode::kTruncatedPayload);

  bad = good;
  bad[4] = 2;
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kVersionUnsupported);

  bad = good;
  bad[7] = 1;
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kSchemaMismatch);

  bad = good;
  bad[6] = 7;
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kSchemaMismatch);

  bad = good;
  bad.push_back(0);
  EXPECT_EQ(code_of([&] { decode_feature_file(bad); }), ErrorCode::kSchemaMismatch);

  const FeatureFile scaled{Space::kCss, FloatMatrix::Constant(2, 2, 1.0f)};
  EXPECT_EQ(code_of([&] { decode_feature_file(encode_feature_file(scaled)); }),
            ErrorCode::kNonUnitVectors);
}

TEST(FeatureFileTest, FilesAndLabels) {
  TempDir dir;
  Rng rng(93);
  const auto f = random_file(rng, 5, 3, Space::kCss);
  write_feature_file(dir.path() / "a.csmf", f);
  EXPECT_EQ(read_feature_file(dir.path() / "a.csmf").rows, f.rows);

  const std::vector<std::uint32_t> labels{0, 7, 3, 4294967295u};
  write_labels(dir.path() / "l.u32", labels);
  EXPECT_EQ(fs::file_size(dir.path() / "l.u32"), 16u);
  EXPECT_EQ(read_labels(dir.path() / "l.u32"), labels);

  EXPECT_EQ(code_of([&] { read_feature_file(dir.path() / "missing.csmf"); }), ErrorCode::kIoError);
}

TEST(ManifestTest, RoundTrip) {
  TempDir dir;
  const Manifest m{3, {"a", "b", "c"}, "t.csmf", "c.csmf", "v.csmf", "l.u32", 4};
  write_manifest(dir.path() / "m.json", m);
  const auto back = read_manifest(dir.path() / "m.json");
  EXPECT_EQ(back.k, 3);
  EXPECT_EQ(back.class_names, m.class_names);
  EXPECT_EQ(back.css_stream, "c.csmf");
  EXPECT_EQ(back.views_per_sample, 4);
}

TEST(DatasetFilesTest, WriteThenLoad) {
  TempDir dir;
  Rng rng(94);
  const auto ds = testing::small_dataset(rng, 4, 6, 5, 9, 3, 0.3);
  const auto manifest = write_dataset(dir.path(), ds);
  const auto back = load_dataset(manifest);
  ASSERT_EQ(back.samples.size(), 9u);
  EXPECT_EQ(back.afv_dim, 5);
  EXPECT_EQ(back.class_names, ds.class_names);
  EXPECT_NEAR((back.text_features - ds.text_features).cwiseAbs().maxCoeff(), 0.0, 1e-7);
  for (std::size_t s = 0; s < 9; ++s) {
    EXPECT_EQ(back.samples[s].label, ds.samples[s].label);
    ASSERT_EQ(back.samples[s].views.size(), 3u);
    EXPECT_NEAR((back.samples[s].views[2].afv.values - ds.samples[s].views[2].afv.values).norm(),
                0.0, 1e-6);
    EXPECT_EQ(back.samples[s].views[1].css.space, Space::kCss);
  }
}

TEST(DatasetFilesTest, InconsistentManifests) {
  TempDir dir;
  Rng rng(95);
  const auto ds = testing::small_dataset(rng, 3, 4, 4, 4, 2, 0.3);
  const auto manifest = write_dataset(dir.path(), ds);
  auto m = read_manifest(manifest);

  auto edited = m;
  edited.views_per_sample = 3;
  write_manifest(dir.path() / "bad1.json", edited);
  EXPECT_EQ(code_of([&] { load_dataset(dir.path() / "bad1.json"); }), ErrorCode::kSchemaMismatch);

  edited = m;
  edited.k = 5;
  write_manifest(dir.path() / "bad2.json", edited);
  EXPECT_EQ(code_of([&] { load_dataset(dir.path() / "bad2.json"); }), ErrorCode::kSchemaMismatch);

  edited = m;
  edited.afv_stream = m.css_stream;  // CSS-tagged file in the AFV slot
  write_manifest(dir.path() / "bad3.json", edited);
  EXPECT_EQ(code_of([&] { load_dataset(dir.path() / "bad3.json"); }), ErrorCode::kSchemaMismatch);

  write_labels(dir.path() / "labels_bad.u32", std::vector<std::uint32_t>{0, 1, 2, 3});
  edited = m;
  edited.labels = "labels_bad.u32";
  write_manifest(dir.path() / "bad4.json", edited);
  EXPECT_EQ(code_of([&] { load_dataset(dir.path() / "bad4.json"); }), ErrorCode::kSchemaMismatch);

  std::ofstream(dir.path() / "bad5.json") << "{ not json";
  EXPECT_EQ(code_of([&] { read_manifest(dir.path() / "bad5.json"); }), ErrorCode::kSchemaMismatch);
}

}  // namespace
}  // namespace cosmic
