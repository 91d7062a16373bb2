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

#include <cmath>
#include <string>
#include <utility>

#include "cosmic/error.hpp"
#include "cosmic/logging.hpp"

namespace cosmic {

std::string_view to_string(ZeroShotSource source) noexcept {
  return source == ZeroShotSource::kGated ? "gated" : "original_view";
}

namespace {

void check(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("config.") + field + " " + rule);
  }
}

Matrix normalized_rows(Matrix m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    m.row(i) = normalize(Vector(m.row(i).transpose())).transpose();
  }
  return m;
}

}  // namespace

void EngineConfig::validate() const {
  check(num_classes >= 1, "num_classes", "must be >= 1");
  check(css_dim >= 1, "css_dim", "must be >= 1");
  check(afv_dim >= 1, "afv_dim", "must be >= 1");
  check(temperature > 0.0 && std::isfinite(temperature), "temperature", "must be > 0");
  check(alpha > 0.0 && std::isfinite(alpha), "alpha", "must be > 0");
  check(css_capacity >= 1, "css_capacity", "must be >= 1");
  check(afv_capacity >= 1, "afv_capacity", "must be >= 1");
  check(threshold_init >= -1.0 && threshold_init <= 1.0, "threshold_init", "must lie in [-1, 1]");
  check(threshold_growth >= 0.0 && std::isfinite(threshold_growth), "threshold_growth",
        "must be >= 0");
  check(clique_ratio > 0.0 && clique_ratio <= 1.0, "clique_ratio", "must lie in (0, 1]");
  check(view_ratio > 0.0 && view_ratio <= 1.0, "view_ratio", "must lie in (0, 1]");
  check(std::isfinite(attn_temperature), "attn_temperature", "must be finite");
  check(ema_decay > 0.0 && ema_decay <= 1.0, "ema_decay", "must lie in (0, 1]");
  check(graph_update_interval >= 1, "graph_update_interval", "must be >= 1");
  check(tda_weight >= 0.0 && std::isfinite(tda_weight), "tda_weight", "must be >= 0");
  betas.validate();
}

// Restored states keep their text rows as stored. Renormalizing is not
// bit-idempotent and would break resume equivalence.
Engine::Engine(EngineConfig config, Matrix text_features)
    : Engine(EngineState{
          config, normalized_rows(std::move(text_features)),
          DualCache(std::max(config.num_classes, 1), std::max<std::size_t>(config.css_capacity, 1),
                    std::max<Eigen::Index>(config.css_dim, 1),
                    std::max<std::size_t>(config.afv_capacity, 1),
                    std::max<Eigen::Index>(config.afv_dim, 1)),
          ThresholdSchedule(config.threshold_init, config.threshold_growth), 0,
          config.threshold_init, std::nullopt}) {}

Engine::Engine(EngineState state) : state_(std::move(state)) {
  const auto& c = state_.config;
  c.validate();
  if (state_.text_features.rows() != c.num_classes || state_.text_features.cols() != c.css_dim) {
    throw Error(ErrorCode::kSchemaMismatch, "text features must be num_classes x css_dim");
  }
  const auto& cache = state_.cache;
  if (cache.num_classes() != c.num_classes || cache.css(0).dim() != c.css_dim ||
      cache.afv(0).dim() != c.afv_dim || cache.css(0).capacity() != c.css_capacity ||
      cache.afv(0).capacity() != c.afv_capacity) {
    throw Error(ErrorCode::kSchemaMismatch, "cache layout does not match the config");
  }
}

ClassCenters Engine::css_centers(const FeatureVector& query) const {
  const auto& c = state_.config;
  ClassCenters centers{Matrix::Zero(c.num_classes, c.css_dim),
                       std::vector<bool>(static_cast<std::size_t>(c.num_classes), false)};
  for (int k = 0; k < c.num_classes; ++k) {
    const auto& cc = state_.cache.css(k);
    if (cc.empty()) continue;
    centers.rows.row(k) = css_class_center(cc, query, c.alpha).values.transpose();
    centers.present[static_cast<std::size_t>(k)] = true;
  }
  return centers;
}

ClassCenters Engine::afv_centers(const FeatureVector* query) const {
  const auto& c = state_.config;
  const AfvCenterParams params{c.effective_attn_temperature(), c.ema_decay};
  ClassCenters centers{Matrix::Zero(c.num_classes, c.afv_dim),
                       std::vector<bool>(static_cast<std::size_t>(c.num_classes), false)};
  for (int k = 0; k < c.num_classes; ++k) {
    const auto& ac = state_.cache.afv(k);
    if (ac.empty()) continue;
    centers.rows.row(k) = afv_class_center(ac, query, c.afv_center_mode, params).values.transpose();
    centers.present[static_cast<std::size_t>(k)] = true;
  }
  return centers;
}

SpaceGraphs Engine::build_graphs(Space space, const View* query, double threshold) const {
  const auto& c = state_.config;
  Matrix nodes;
  std::vector<int> node_ids;
  if (space == Space::kCss) {
    ClassCenters centers =
        query != nullptr
            ? css_centers(query->css)
            : ClassCenters{Matrix::Zero(c.num_classes, c.css_dim),
                           std::vector<bool>(static_cast<std::size_t>(c.num_classes), false)};
    nodes = css_nodes(state_.text_features, centers);
    node_ids.resize(static_cast<std::size_t>(nodes.rows()));
    for (std::size_t i = 0; i < node_ids.size(); ++i) node_ids[i] = static_cast<int>(i);
  } else {
    const bool needs_query = c.afv_center_mode == AfvCenterMode::kAttnWeighted;
    if (needs_query && query == nullptr) {
      nodes = Matrix(0, c.afv_dim);
    } else {
      const ClassCenters centers = afv_centers(query != nullptr ? &query->afv : nullptr);
      nodes = Matrix(static_cast<Eigen::Index>(centers.present_count()), c.afv_dim);
      Eigen::Index r = 0;
      for (int k = 0; k < c.num_classes; ++k) {
        if (!centers.present[static_cast<std::size_t>(k)]) continue;
        nodes.row(r++) = centers.rows.row(k);
        node_ids.push_back(k);
      }
    }
  }

  SpaceGraphs g;
  g.fog = build_fog(nodes, threshold, space);
  g.sog = build_sog(g.fog);
  g.cliques = maximal_cliques(c.clique_graph == GraphOrder::kSecond ? g.sog : g.fog);
  g.hyperclasses = make_hyperclasses(g.cliques, nodes, space);
  g.node_ids = std::move(node_ids);
  return g;
}

InlierMask Engine::query_mask(const SpaceGraphs& graphs, const FeatureVector& query,
                              std::size_t n_slots, std::string_view space_name) const {
  if (!state_.config.apply_masks || graphs.cliques.empty()) {
    return InlierMask::all_ones(n_slots);
  }
  const auto ranked = rank_by_affinity(query, graphs.hyperclasses);
  const auto selected = select_top_r(ranked, graphs.cliques.size(), state_.config.clique_ratio);
  const InlierMask local = build_mask(selected, graphs.cliques, graphs.node_ids.size());
  InlierMask mask{std::vector<bool>(n_slots, false)};
  for (std::size_t i = 0; i < local.size(); ++i) {
    if (local.bits[i]) mask.bits[static_cast<std::size_t>(graphs.node_ids[i])] = true;
  }
  if (!mask.any()) {
    log_warn(std::string(space_name) + " mask is empty after selection; using all-ones");
    return InlierMask::all_ones(n_slots);
  }
  return mask;
}

SampleOutcome Engine::process_sample(std::span<const View> views, int label) {
  auto& st = state_;
  const auto& c = st.config;
  if (views.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "a sample needs at least one view");
  }
  if (label < 0 || label >= c.num_classes) {
    throw Error(ErrorCode::kInvalidArgument, "label " + std::to_string(label) + " out of range");
  }
  std::vector<View> normed;
  normed.reserve(views.size());
  for (const auto& v : views) {
    if (v.css.space != Space::kCss || v.css.dim() != c.css_dim || v.afv.space != Space::kAfv ||
        v.afv.dim() != c.afv_dim) {
      throw Error(ErrorCode::kDimensionMismatch, "view does not match the configured spaces");
    }
    normed.push_back(View{normalize(v.css), normalize(v.afv)});
  }
  const View& query = normed.front();
  const std::uint64_t index = st.sample_count;

  const GateResult gate =
      marginal_entropy_gate(ViewBatch{normed, c.view_ratio}, st.text_features, c.temperature);
  const PredictionVector p_zs = c.zero_shot_source == ZeroShotSource::kGated
                                    ? gate.mean_probability
                                    : zero_shot(query.css, st.text_features, c.temperature);

  SampleRecord rec;
  rec.index = index;
  rec.label = label;
  rec.pseudo_label = gate.pseudo_label;
  rec.gate_entropy = gate.entropy;
  rec.css_insert =
      st.cache.css(gate.pseudo_label).consider_insert(CacheEntry{query.css, gate.entropy, index}).status;
  rec.afv_insert =
      st.cache.afv(gate.pseudo_label).consider_insert(CacheEntry{query.afv, gate.entropy, index}).status;

  const bool accepted =
      rec.css_insert != InsertStatus::kRejected || rec.afv_insert != InsertStatus::kRejected;
  const double threshold = (c.advance_threshold_on_reject || accepted) ? st.schedule.advance()
                                                                       : st.schedule.current();
  rec.threshold = threshold;

  const bool rebuild = !css_graphs_ || !afv_graphs_ ||
                       index % static_cast<std::uint64_t>(c.graph_update_interval) == 0;
  if (rebuild) {
    css_graphs_ = build_graphs(Space::kCss, &query, threshold);
    afv_graphs_ = build_graphs(Space::kAfv, &query, threshold);
    st.last_threshold = threshold;
  }
  rec.graphs_rebuilt = rebuild;
  rec.css_cliques = css_graphs_->cliques.size();
  rec.afv_cliques = afv_graphs_->cliques.size();

  const auto k = static_cast<std::size_t>(c.num_classes);
  const ClassCenters css_c = css_centers(query.css);
  const ClassCenters afv_c = afv_centers(&query.afv);
  const InlierMask css_mask = query_mask(*css_graphs_, query.css, 2 * k, "css");
  const PredictionVector p_css =
      css_prediction(query.css, st.text_features, css_c, css_mask, c.temperature);

  PredictionVector p_afv{Vector::Zero(c.num_classes), PredictionKind::kMaskedProbability};
  InlierMask afv_mask{std::vector<bool>(k, false)};
  if (afv_c.present_count() > 0) {
    afv_mask = query_mask(*afv_graphs_, query.afv, k, "afv");
    p_afv = afv_prediction(query.afv, afv_c, afv_mask, c.temperature);
  }
  rec.css_mask_size = css_mask.count();
  rec.afv_mask_size = afv_mask.count();

  const PredictionVector fused = fuse(p_zs, p_css, p_afv, c.betas);

  // TDA comparison: zero-shot logits plus weighted cache logits.
  const CacheSnapshot snap = st.cache.snapshot_matrices();
  Vector tda = (st.text_features * query.css.values) / c.temperature;
  if (snap.css.rows() > 0) {
    tda += c.tda_weight * tda_adapted(query.css, snap.css, snap.css_labels, c.alpha);
  }

  rec.predicted.zero_shot = static_cast<int>(argmax(p_zs.scores));
  rec.predicted.tda = static_cast<int>(argmax(tda));
  rec.predicted.css = static_cast<int>(argmax(p_css.scores));
  rec.predicted.afv = static_cast<int>(argmax(p_afv.scores));
  rec.predicted.fused = static_cast<int>(argmax(fused.scores));

  st.sample_count = index + 1;
  st.last_query = query;

  return SampleOutcome{rec, PathScores{p_zs.scores, std::move(tda), p_css.scores, p_afv.scores,
                                       fused.scores}};
}

EngineConfig bind_config(EngineConfig config, const Dataset& dataset) {
  const auto k = static_cast<int>(dataset.text_features.rows());
  const Eigen::Index d1 = dataset.text_features.cols();
  const Eigen::Index d2 = dataset.afv_dim;
  auto bind = [](auto& field, auto value, const char* name) {
    if (field == 0) {
      field = value;
    } else if (value != 0 && field != value) {
      throw Error(ErrorCode::kSchemaMismatch,
                  std::string("config.") + name + " does not match the dataset");
    }
  };
  bind(config.num_classes, k, "num_classes");
  bind(config.css_dim, d1, "css_dim");
  bind(config.afv_dim, d2, "afv_dim");
  return config;
}

StreamResult run_stream(const EngineConfig& config, const Dataset& dataset,
                        const RunOptions& options,
                        std::optional<EngineState>* final_state) {
  config.validate();
  if (dataset.text_features.rows() != config.num_classes ||
      dataset.text_features.cols() != config.css_dim) {
    throw Error(ErrorCode::kSchemaMismatch, "text features do not match num_classes x css_dim");
  }
  Engine engine(config, dataset.text_features);

  StreamResult result;
  result.records.reserve(dataset.samples.size());
  std::size_t correct[5] = {0, 0, 0, 0, 0};
  for (const auto& sample : dataset.samples) {
    if (sample.label < 0 || sample.label >= config.num_classes) {
      throw Error(ErrorCode::kSchemaMismatch,
                  "sample label " + std::to_string(sample.label) + " outside the label space");
    }
    SampleOutcome out = engine.process_sample(sample.views, sample.label);
    const auto& p = out.record.predicted;
    correct[0] += p.zero_shot == sample.label;
    correct[1] += p.tda == sample.label;
    correct[2] += p.css == sample.label;
    correct[3] += p.afv == sample.label;
    correct[4] += p.fused == sample.label;
    result.records.push_back(out.record);
    if (options.keep_scores) result.scores.push_back(std::move(out.scores));
  }
  if (const auto n = static_cast<double>(result.records.size()); n > 0) {
    result.accuracy = PathAccuracy{static_cast<double>(correct[0]) / n,
                                   static_cast<double>(correct[1]) / n,
                                   static_cast<double>(correct[2]) / n,
                                   static_cast<double>(correct[3]) / n,
                                   static_cast<double>(correct[4]) / n};
  }
  if (final_state != nullptr) *final_state = engine.state();
  return result;
}

std::vector<SweepSample> to_sweep_samples(const StreamResult& result) {
  if (result.scores.size() != result.records.size()) {
    throw Error(ErrorCode::kInvalidArgument, "stream was run without keep_scores");
  }
  std::vector<SweepSample> out;
  out.reserve(result.records.size());
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    const auto& s = result.scores[i];
    out.push_back(SweepSample{s.zero_shot, s.css, s.afv, result.records[i].label});
  }
  return out;
}

}  // namespace cosmic
