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


#include "cosmic/pipeline.hpp"

#include <gtest/gtest.h>

#include "cosmic/error.hpp"
#include "cosmic/serialization.hpp"
#include "test_support.hpp"

namespace cosmic {
namespace {

using testing::code_of;
using testing::Rng;
using testing::rows;
using testing::small_dataset;
using testing::vec;

EngineConfig config_for(const Dataset& ds) { return bind_config(EngineConfig{}, ds); }

Dataset subset(const Dataset& ds, std::size_t n) {
  Dataset out = ds;
  out.samples.resize(n);
  return out;
}

View view2(std::initializer_list<double> css, std::initializer_list<double> afv) {
  return View{testing::fv(css, Space::kCss), testing::fv(afv, Space::kAfv)};
}

TEST(EngineConfigTest, DefaultsAndValidation) {
  EngineConfig c;
  EXPECT_DOUBLE_EQ(c.temperature, 0.01);
  EXPECT_DOUBLE_EQ(c.alpha, 5.0);
  EXPECT_EQ(c.css_capacity, 3u);
  EXPECT_EQ(c.afv_capacity, 6u);
  EXPECT_DOUBLE_EQ(c.clique_ratio, 0.2);
  EXPECT_DOUBLE_EQ(c.view_ratio, 0.1);
  EXPECT_EQ(c.graph_update_interval, 1);
  EXPECT_EQ(c.betas, (FusionWeights{1, 1, 1}));
  EXPECT_DOUBLE_EQ(c.effective_attn_temperature(), 0.01);

  c.num_classes = 2;
  c.css_dim = 2;
  c.afv_dim = 2;
  EXPECT_NO_THROW(c.validate());
  auto bad = c;
  bad.graph_update_interval = 0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
  bad = c;
  bad.temperature = 0.0;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
  bad = c;
  bad.clique_ratio = 1.2;
  EXPECT_EQ(code_of([&] { bad.validate(); }), ErrorCode::kInvalidArgument);
}

TEST(BindConfigTest, FillsAndChecks) {
  Rng rng(61);
  const auto ds = small_dataset(rng, 3, 5, 4, 2, 2, 0.1);
  const auto c = config_for(ds);
  EXPECT_EQ(c.num_classes, 3);
  EXPECT_EQ(c.css_dim, 5);
  EXPECT_EQ(c.afv_dim, 4);
  EngineConfig wrong;
  wrong.num_classes = 4;
  EXPECT_EQ(code_of([&] { bind_config(wrong, ds); }), ErrorCode::kSchemaMismatch);
}

TEST(EngineTest, FirstSampleComposition) {
  // Before the first sample only the pseudo-labelled class gets cached
  // features; every other CSS visual node is its text feature and the AFV
  // softmax runs over that single present class.
  Rng rng(62);
  const auto ds = small_dataset(rng, 4, 6, 5, 1, 3, 0.2);
  auto cfg = config_for(ds);
  cfg.apply_masks = false;
  cfg.betas = {1.0, 0.7, 0.3};
  Engine engine(cfg, ds.text_features);
  const auto out = engine.process_sample(ds.samples[0].views, ds.samples[0].label);

  std::vector<View> normed;
  for (const auto& v : ds.samples[0].views) normed.push_back(View{normalize(v.css), normalize(v.afv)});
  const auto gate = marginal_entropy_gate({normed, cfg.view_ratio}, ds.text_features, cfg.temperature);
  ClassCenters css{Matrix::Zero(4, 6), std::vector<bool>(4, false)};
  css.rows.row(gate.pseudo_label) = normed[0].css.values.transpose();
  css.present[static_cast<std::size_t>(gate.pseudo_label)] = true;
  const auto p_css =
      css_prediction(normed[0].css, ds.text_features, css, InlierMask::all_ones(8), cfg.temperature);
  Vector p_afv = Vector::Zero(4);
  p_afv[gate.pseudo_label] = 1.0;
  const Vector expected = gate.mean_probability.scores + 0.7 * p_css.scores + 0.3 * p_afv;
  EXPECT_NEAR((out.scores.fused - expected).norm(), 0.0, 1e-12);
  EXPECT_EQ(out.record.css_insert, InsertStatus::kInserted);
  EXPECT_EQ(out.record.afv_insert, InsertStatus::kInserted);
  EXPECT_TRUE(out.record.graphs_rebuilt);
}

TEST(EngineTest, RebuildInterval) {
  Rng rng(63);
  const auto ds = small_dataset(rng, 3, 6, 5, 10, 2, 0.3);
  for (int u : {1, 3}) {
    auto cfg = config_for(ds);
    cfg.graph_update_interval = u;
    const auto r = run_stream(cfg, ds);
    for (const auto& rec : r.records) EXPECT_EQ(rec.graphs_rebuilt, rec.index % u == 0) << u;
  }
}

TEST(EngineTest, HighEntropySampleRejectedWhenFull) {
  EngineConfig cfg;
  cfg.num_classes = 2;
  cfg.css_dim = 2;
  cfg.afv_dim = 2;
  cfg.css_capacity = 1;
  cfg.afv_capacity = 1;
  Engine engine(cfg, rows({{1, 0}, {0, 1}}));
  const std::vector<View> confident{view2({1, 0.01}, {1, 0})};
  const std::vector<View> ambiguous{view2({1, 0.999}, {0, 1})};
  engine.process_sample(confident, 0);
  const auto before = state_to_json(engine.state())["css_cache"];
  const auto out = engine.process_sample(ambiguous, 0);
  EXPECT_EQ(out.record.pseudo_label, 0);
  EXPECT_EQ(out.record.css_insert, InsertStatus::kRejected);
  EXPECT_EQ(out.record.afv_insert, InsertStatus::kRejected);
  EXPECT_EQ(state_to_json(engine.state())["css_cache"], before);
}

TEST(EngineTest, ThresholdAdvancePolicy) {
  EngineConfig cfg;
  cfg.num_classes = 2;
  cfg.css_dim = 2;
  cfg.afv_dim = 2;
  cfg.css_capacity = 1;
  cfg.afv_capacity = 1;
  cfg.threshold_init = 0.2;
  cfg.threshold_growth = 0.1;
  const std::vector<View> confident{view2({1, 0.01}, {1, 0})};
  const std::vector<View> ambiguous{view2({1, 0.999}, {0, 1})};
  for (bool on_reject : {true, false}) {
    cfg.advance_threshold_on_reject = on_reject;
    Engine engine(cfg, rows({{1, 0}, {0, 1}}));
    EXPECT_DOUBLE_EQ(engine.process_sample(confident, 0).record.threshold, 0.2);
    EXPECT_NEAR(engine.process_sample(ambiguous, 0).record.threshold, 0.3, 1e-12);
    EXPECT_NEAR(engine.process_sample(confident, 0).record.threshold, on_reject ? 0.4 : 0.3, 1e-12);
  }
}

TEST(EngineTest, OriginalViewZeroShotSource) {
  Rng rng(64);
  const auto ds = small_dataset(rng, 4, 6, 5, 20, 4, 0.5);
  auto cfg = config_for(ds);
  cfg.zero_shot_source = ZeroShotSource::kOriginalView;
  Engine engine(cfg, ds.text_features);
  for (const auto& s : ds.samples) {
    const auto out = engine.process_sample(s.views, s.label);
    const auto zs = zero_shot(normalize(s.views[0].css), engine.state().text_features, cfg.temperature);
    EXPECT_EQ(out.scores.zero_shot, zs.scores);
  }
}

TEST(EngineTest, TdaPathNeverFeedsBack) {
  Rng rng(65);
  const auto ds = small_dataset(rng, 5, 8, 6, 40, 4, 0.4);
  auto a = config_for(ds);
  auto b = a;
  b.tda_weight = 0.0;
  const auto ra = run_stream(a, ds);
  const auto rb = run_stream(b, ds);
  for (std::size_t i = 0; i < ra.records.size(); ++i) {
    auto x = ra.records[i];
    auto y = rb.records[i];
    x.predicted.tda = y.predicted.tda = 0;
    EXPECT_EQ(x, y);
  }
}

TEST(EngineTest, InputErrors) {
  Rng rng(66);
  const auto ds = small_dataset(rng, 3, 4, 4, 1, 1, 0.1);
  Engine engine(config_for(ds), ds.text_features);
  EXPECT_EQ(code_of([&] { engine.process_sample(ds.samples[0].views, 3); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { engine.process_sample({}, 0); }), ErrorCode::kInvalidArgument);
  const std::vector<View> wrong{view2({1, 0}, {1, 0, 0, 0})};
  EXPECT_EQ(code_of([&] { engine.process_sample(wrong, 0); }), ErrorCode::kDimensionMismatch);
}

TEST(EngineTest, BuildGraphsWithoutQueryUsesTextNodes) {
  Rng rng(67);
  const auto ds = small_dataset(rng, 4, 6, 5, 0, 1, 0.1);
  Engine engine(config_for(ds), ds.text_features);
  const auto css = engine.build_graphs(Space::kCss, nullptr, 0.5);
  EXPECT_EQ(css.fog.size(), 8);
  EXPECT_EQ(css.node_ids.size(), 8u);
  // Each text node duplicates into its visual slot, so those pairs connect.
  for (int i = 0; i < 4; ++i) EXPECT_TRUE(css.fog.adjacency(i, i + 4));
  const auto afv = engine.build_graphs(Space::kAfv, nullptr, 0.5);
  EXPECT_EQ(afv.fog.size(), 0);
  EXPECT_TRUE(afv.cliques.empty());
}

TEST(RunStreamTest, EmptyStream) {
  Rng rng(68);
  const auto ds = small_dataset(rng, 3, 4, 4, 0, 1, 0.1);
  const auto r = run_stream(config_for(ds), ds);
  EXPECT_TRUE(r.records.empty());
  EXPECT_EQ(r.accuracy, PathAccuracy{});
}

TEST(RunStreamTest, Deterministic) {
  Rng rng(69);
  const auto ds = small_dataset(rng, 6, 10, 8, 60, 4, 0.5);
  const auto cfg = config_for(ds);
  const auto a = run_stream(cfg, ds);
  const auto b = run_stream(cfg, ds);
  EXPECT_EQ(a.records, b.records);
  EXPECT_EQ(a.accuracy, b.accuracy);
}

TEST(RunStreamTest, AccuracyIsExactCount) {
  Rng rng(70);
  const auto ds = small_dataset(rng, 5, 8, 6, 37, 3, 0.6);
  const auto r = run_stream(config_for(ds), ds);
  std::size_t fused = 0;
  std::size_t zs = 0;
  for (const auto& rec : r.records) {
    fused += rec.predicted.fused == rec.label;
    zs += rec.predicted.zero_shot == rec.label;
  }
  EXPECT_EQ(r.accuracy.fused, static_cast<double>(fused) / 37.0);
  EXPECT_EQ(r.accuracy.zero_shot, static_cast<double>(zs) / 37.0);
  EXPECT_EQ(r.records.size(), 37u);
}

TEST(RunStreamTest, PrefixStateMatchesFreshReplay) {
  Rng rng(71);
  const auto ds = small_dataset(rng, 5, 8, 6, 40, 3, 0.5);
  const auto cfg = config_for(ds);
  Engine engine(cfg, ds.text_features);
  for (std::size_t n = 0; n < ds.samples.size(); ++n) {
    if (n % 10 == 0) {
      std::optional<EngineState> fresh;
      run_stream(cfg, subset(ds, n), {}, &fresh);
      EXPECT_EQ(state_to_json(engine.state()).dump(), state_to_json(*fresh).dump()) << n;
    }
    engine.process_sample(ds.samples[n].views, ds.samples[n].label);
  }
}

TEST(RunStreamTest, ResumeFromStateContinuesIdentically) {
  Rng rng(72);
  const auto ds = small_dataset(rng, 5, 8, 6, 40, 3, 0.5);
  const auto cfg = config_for(ds);
  Engine whole(cfg, ds.text_features);
  Engine first(cfg, ds.text_features);
  std::vector<SampleRecord> expected;
  for (std::size_t n = 0; n < ds.samples.size(); ++n) {
    expected.push_back(whole.process_sample(ds.samples[n].views, ds.samples[n].label).record);
    if (n < 20) first.process_sample(ds.samples[n].views, ds.samples[n].label);
  }
  Engine resumed(first.state());
  for (std::size_t n = 20; n < ds.samples.size(); ++n) {
    EXPECT_EQ(resumed.process_sample(ds.samples[n].views, ds.samples[n].label).record, expected[n]);
  }
}

TEST(RunStreamTest, Errors) {
  Rng rng(73);
  auto ds = small_dataset(rng, 3, 4, 4, 2, 1, 0.1);
  auto cfg = config_for(ds);
  ds.samples[1].label = 3;
  EXPECT_EQ(code_of([&] { run_stream(cfg, ds); }), ErrorCode::kSchemaMismatch);
  cfg.css_dim = 5;
  EXPECT_EQ(code_of([&] { run_stream(cfg, ds); }), ErrorCode::kSchemaMismatch);
}

TEST(RunStreamTest, SweepSamplesNeedScores) {
  Rng rng(74);
  const auto ds = small_dataset(rng, 3, 4, 4, 5, 1, 0.1);
  const auto cfg = config_for(ds);
  EXPECT_EQ(code_of([&] { to_sweep_samples(run_stream(cfg, ds)); }), ErrorCode::kInvalidArgument);
  const auto kept = run_stream(cfg, ds, {.keep_scores = true});
  const auto samples = to_sweep_samples(kept);
  ASSERT_EQ(samples.size(), 5u);
  // beta = (1, 1, 1) reproduces the engine's fused accuracy.
  EXPECT_EQ(fused_accuracy(samples, {1, 1, 1}), kept.accuracy.fused);
}

}  // namespace
}  // namespace cosmic
