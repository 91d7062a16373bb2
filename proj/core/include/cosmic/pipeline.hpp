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

// Streaming adaptation engine.
//
// Per sample: entropy gate over the views, cache update under the gated
// pseudo-label (both spaces), periodic rebuild of the dual graphs and their
// clique sets, hyper-class ranking and masks, then the CSS / AFV / fused
// predictions. A plain cache adapter (TDA) is evaluated alongside for
// comparison and never feeds back into the other paths.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cosmic/cache.hpp"
#include "cosmic/graph.hpp"
#include "cosmic/hyperclass.hpp"
#include "cosmic/predict.hpp"

namespace cosmic {

enum class ZeroShotSource { kGated, kOriginalView };

std::string_view to_string(ZeroShotSource source) noexcept;

struct EngineConfig {
  int num_classes = 0;
  Eigen::Index css_dim = 0;
  Eigen::Index afv_dim = 0;

  double temperature = 0.01;
  double alpha = 5.0;
  std::size_t css_capacity = 3;
  std::size_t afv_capacity = 6;
  double threshold_init = 0.5;
  double threshold_growth = 0.0;
  double clique_ratio = 0.2;
  double view_ratio = 0.1;
  FusionWeights betas;
  AfvCenterMode afv_center_mode = AfvCenterMode::kAverage;
  double attn_temperature = 0.0;  // <= 0 means "use temperature"
  double ema_decay = 0.1;
  int graph_update_interval = 1;
  std::uint64_t seed = 0;

  // Weight on the cache logits of the TDA comparison path.
  double tda_weight = 2.0;
  ZeroShotSource zero_shot_source = ZeroShotSource::kGated;
  bool advance_threshold_on_reject = true;
  bool apply_masks = true;
  GraphOrder clique_graph = GraphOrder::kSecond;

  // Throws InvalidArgument naming the first offending field.
  void validate() const;
  double effective_attn_temperature() const {
    return attn_temperature > 0.0 ? attn_temperature : temperature;
  }

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

struct LabeledSample {
  std::vector<View> views;  // views[0] is the original
  int label = 0;
};

struct Dataset {
  Matrix text_features;  // K x d1
  Eigen::Index afv_dim = 0;
  std::vector<std::string> class_names;
  std::vector<LabeledSample> samples;
};

struct PathPredictions {
  int zero_shot = 0;
  int tda = 0;
  int css = 0;
  int afv = 0;
  int fused = 0;

  friend bool operator==(const PathPredictions&, const PathPredictions&) = default;
};

struct SampleRecord {
  std::uint64_t index = 0;
  int label = 0;
  int pseudo_label = 0;
  double gate_entropy = 0.0;
  PathPredictions predicted;
  InsertStatus css_insert = InsertStatus::kRejected;
  InsertStatus afv_insert = InsertStatus::kRejected;
  double threshold = 0.0;
  bool graphs_rebuilt = false;
  std::size_t css_cliques = 0;
  std::size_t afv_cliques = 0;
  std::size_t css_mask_size = 0;
  std::size_t afv_mask_size = 0;

  friend bool operator==(const SampleRecord&, const SampleRecord&) = default;
};

struct PathScores {
  Vector zero_shot;
  Vector tda;
  Vector css;
  Vector afv;
  Vector fused;
};

struct SampleOutcome {
  SampleRecord record;
  PathScores scores;
};

// Graphs and clique-derived data for one space at the last rebuild.
struct SpaceGraphs {
  AffinityGraph fog;
  AffinityGraph sog;
  CliqueSet cliques;  // on the graph selected by EngineConfig::clique_graph
  std::vector<HyperClass> hyperclasses;
  // Graph node -> mask slot. Identity for CSS; present class ids for AFV.
  std::vector<int> node_ids;
};

// Everything needed to resume a stream; serialized as the state dump.
struct EngineState {
  EngineConfig config;
  Matrix text_features;
  DualCache cache;
  ThresholdSchedule schedule;
  std::uint64_t sample_count = 0;
  double last_threshold = 0.0;
  std::optional<View> last_query;
};

class Engine {
 public:
  Engine(EngineConfig config, Matrix text_features);
  explicit Engine(EngineState state);

  // Views are normalized on entry. Throws DimensionMismatch on bad views and
  // InvalidArgument on a label outside [0, K).
  SampleOutcome process_sample(std::span<const View> views, int label);

  // Class centers for the given query as used by the predictions.
  ClassCenters css_centers(const FeatureVector& query) const;
  ClassCenters afv_centers(const FeatureVector* query) const;

  // Rebuilds graphs and cliques for one space from the current caches,
  // centered on `query` (null: no query, CSS falls back to text nodes).
  SpaceGraphs build_graphs(Space space, const View* query, double threshold) const;

  const EngineState& state() const { return state_; }
  const EngineConfig& config() const { return state_.config; }
  const DualCache& cache() const { return state_.cache; }
  std::uint64_t sample_count() const { return state_.sample_count; }

 private:
  InlierMask query_mask(const SpaceGraphs& graphs, const FeatureVector& query,
                        std::size_t n_slots, std::string_view space_name) const;

  EngineState state_;
  std::optional<SpaceGraphs> css_graphs_;
  std::optional<SpaceGraphs> afv_graphs_;
};

struct PathAccuracy {
  double zero_shot = 0.0;
  double tda = 0.0;
  double css = 0.0;
  double afv = 0.0;
  double fused = 0.0;

  friend bool operator==(const PathAccuracy&, const PathAccuracy&) = default;
};

struct StreamResult {
  std::vector<SampleRecord> records;
  PathAccuracy accuracy;
  std::vector<PathScores> scores;  // filled only with RunOptions::keep_scores
};

struct RunOptions {
  bool keep_scores = false;
};

// Checks the dataset against the config (SchemaMismatch) and runs every
// sample through a fresh engine. `final_state`, when given, receives the
// engine state after the last sample.
StreamResult run_stream(const EngineConfig& config, const Dataset& dataset,
                        const RunOptions& options = {},
                        std::optional<EngineState>* final_state = nullptr);

// Fills num_classes / css_dim / afv_dim from the dataset when they are zero,
// otherwise checks them (SchemaMismatch).
EngineConfig bind_config(EngineConfig config, const Dataset& dataset);

std::vector<SweepSample> to_sweep_samples(const StreamResult& result);

}  // namespace cosmic
