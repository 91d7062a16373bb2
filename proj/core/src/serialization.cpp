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

#include "cosmic/serialization.hpp"

#include <string>

#include "cosmic/base64.hpp"
#include "cosmic/error.hpp"

namespace cosmic {

using nlohmann::json;

namespace {

template <typename Fn>
auto guarded(const char* what, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string(what) + ": " + e.what());
  }
}

template <typename T>
void read_opt(const json& j, const char* key, T& field) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) field = it->get<T>();
}

GraphOrder parse_order(const std::string& s) {
  if (s == "second_order" || s == "second") return GraphOrder::kSecond;
  if (s == "first_order" || s == "first") return GraphOrder::kFirst;
  throw Error(ErrorCode::kSchemaMismatch, "unknown clique_graph '" + s + "'");
}

}  // namespace

json config_to_json(const EngineConfig& c) {
  return json{
      {"num_classes", c.num_classes},
      {"css_dim", c.css_dim},
      {"afv_dim", c.afv_dim},
      {"temperature", c.temperature},
      {"alpha", c.alpha},
      {"css_capacity", c.css_capacity},
      {"afv_capacity", c.afv_capacity},
      {"threshold_init", c.threshold_init},
      {"threshold_growth", c.threshold_growth},
      {"clique_ratio", c.clique_ratio},
      {"view_ratio", c.view_ratio},
      {"betas", {c.betas.beta1, c.betas.beta2, c.betas.beta3}},
      {"afv_center_mode", std::string(to_string(c.afv_center_mode))},
      {"attn_temperature", c.attn_temperature},
      {"ema_decay", c.ema_decay},
      {"graph_update_interval", c.graph_update_interval},
      {"seed", c.seed},
      {"tda_weight", c.tda_weight},
      {"zero_shot_source", std::string(to_string(c.zero_shot_source))},
      {"advance_threshold_on_reject", c.advance_threshold_on_reject},
      {"apply_masks", c.apply_masks},
      {"clique_graph", c.clique_graph == GraphOrder::kSecond ? "second_order" : "first_order"},
  };
}

EngineConfig config_from_json(const json& j) {
  return guarded("config", [&] {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaMismatch, "config must be a JSON object");
    EngineConfig c;
    read_opt(j, "num_classes", c.num_classes);
    read_opt(j, "css_dim", c.css_dim);
    read_opt(j, "afv_dim", c.afv_dim);
    read_opt(j, "temperature", c.temperature);
    read_opt(j, "alpha", c.alpha);
    read_opt(j, "css_capacity", c.css_capacity);
    read_opt(j, "afv_capacity", c.afv_capacity);
    read_opt(j, "threshold_init", c.threshold_init);
    read_opt(j, "threshold_growth", c.threshold_growth);
    read_opt(j, "clique_ratio", c.clique_ratio);
    read_opt(j, "view_ratio", c.view_ratio);
    if (auto it = j.find("betas"); it != j.end()) {
      const auto b = it->get<std::vector<double>>();
      if (b.size() != 3) throw Error(ErrorCode::kSchemaMismatch, "config.betas needs 3 values");
      c.betas = FusionWeights{b[0], b[1], b[2]};
    }
    if (auto it = j.find("afv_center_mode"); it != j.end()) {
      const auto name = it->get<std::string>();
      const auto mode = parse_afv_center_mode(name);
      if (!mode) throw Error(ErrorCode::kSchemaMismatch, "unknown afv_center_mode '" + name + "'");
      c.afv_center_mode = *mode;
    }
    read_opt(j, "attn_temperature", c.attn_temperature);
    read_opt(j, "ema_decay", c.ema_decay);
    read_opt(j, "graph_update_interval", c.graph_update_interval);
    read_opt(j, "seed", c.seed);
    read_opt(j, "tda_weight", c.tda_weight);
    if (auto it = j.find("zero_shot_source"); it != j.end()) {
      const auto s = it->get<std::string>();
      if (s == "gated") {
        c.zero_shot_source = ZeroShotSource::kGated;
      } else if (s == "original_view") {
        c.zero_shot_source = ZeroShotSource::kOriginalView;
      } else {
        throw Error(ErrorCode::kSchemaMismatch, "unknown zero_shot_source '" + s + "'");
      }
    }
    read_opt(j, "advance_threshold_on_reject", c.advance_threshold_on_reject);
    read_opt(j, "apply_masks", c.apply_masks);
    if (auto it = j.find("clique_graph"); it != j.end()) {
      c.clique_graph = parse_order(it->get<std::string>());
    }
    return c;
  });
}

json synth_spec_to_json(const SynthSpec& s) {
  return json{
      {"num_classes", s.num_classes},   {"css_dim", s.css_dim},
      {"afv_dim", s.afv_dim},           {"samples", s.samples},
      {"css_noise", s.css_noise},       {"afv_noise", s.afv_noise},
      {"shift_angle", s.shift_angle},   {"views_per_sample", s.views_per_sample},
      {"label_noise", s.label_noise},   {"seed", s.seed},
      {"max_mean_cosine", s.max_mean_cosine},
  };
}

SynthSpec synth_spec_from_json(const json& j) {
  return guarded("synth spec", [&] {
    if (!j.is_object()) throw Error(ErrorCode::kSchemaMismatch, "synth spec must be a JSON object");
    SynthSpec s;
    read_opt(j, "num_classes", s.num_classes);
    read_opt(j, "css_dim", s.css_dim);
    read_opt(j, "afv_dim", s.afv_dim);
    read_opt(j, "samples", s.samples);
    read_opt(j, "css_noise", s.css_noise);
    read_opt(j, "afv_noise", s.afv_noise);
    read_opt(j, "shift_angle", s.shift_angle);
    read_opt(j, "views_per_sample", s.views_per_sample);
    read_opt(j, "label_noise", s.label_noise);
    read_opt(j, "seed", s.seed);
    read_opt(j, "max_mean_cosine", s.max_mean_cosine);
    return s;
  });
}

namespace {

json caches_to_json(const std::vector<ClassCache>& caches) {
  json out = json::array();
  for (const auto& c : caches) {
    json entries = json::array();
    for (const auto& e : c.entries()) {
      entries.push_back({{"arrival_index", e.arrival_index},
                         {"entropy", e.entropy},
                         {"feature", encode_f32(e.feature.values)}});
    }
    out.push_back({{"class_id", c.class_id()}, {"capacity", c.capacity()}, {"entries", entries}});
  }
  return out;
}

void caches_from_json(const json& j, DualCache& cache, Space space) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(cache.num_classes())) {
    throw Error(ErrorCode::kSchemaMismatch, "state: cache must list every class");
  }
  for (const auto& jc : j) {
    const int k = jc.at("class_id").get<int>();
    if (k < 0 || k >= cache.num_classes()) {
      throw Error(ErrorCode::kSchemaMismatch, "state: class_id out of range");
    }
    ClassCache& cc = space == Space::kCss ? cache.css(k) : cache.afv(k);
    if (jc.at("capacity").get<std::size_t>() != cc.capacity()) {
      throw Error(ErrorCode::kSchemaMismatch, "state: cache capacity differs from config");
    }
    std::vector<CacheEntry> entries;
    for (const auto& je : jc.at("entries")) {
      entries.push_back(CacheEntry{
          FeatureVector{decode_f32(je.at("feature").get<std::string>(), cc.dim()), space},
          je.at("entropy").get<double>(), je.at("arrival_index").get<std::uint64_t>()});
    }
    cc.restore(std::move(entries));
  }
}

}  // namespace

json state_to_json(const EngineState& s) {
  json text = json::array();
  for (Eigen::Index i = 0; i < s.text_features.rows(); ++i) {
    text.push_back(encode_f32(s.text_features.row(i).transpose()));
  }
  json last = nullptr;
  if (s.last_query) {
    last = {{"css", encode_f32(s.last_query->css.values)},
            {"afv", encode_f32(s.last_query->afv.values)}};
  }
  return json{
      {"format", "cosmic-state"},
      {"version", kStateDumpVersion},
      {"config", config_to_json(s.config)},
      {"text_features", text},
      {"css_cache", caches_to_json(s.cache.css_caches())},
      {"afv_cache", caches_to_json(s.cache.afv_caches())},
      {"threshold_state",
       {{"t0", s.schedule.initial()},
        {"growth", s.schedule.growth()},
        {"samples_tested", s.schedule.samples_tested()},
        {"last_value", s.last_threshold}}},
      {"sample_count", s.sample_count},
      {"last_query", last},
  };
}

EngineState state_from_json(const json& j) {
  return guarded("state", [&] {
    if (j.value("format", std::string{}) != "cosmic-state") {
      throw Error(ErrorCode::kSchemaMismatch, "not a state dump");
    }
    if (j.at("version").get<int>() != kStateDumpVersion) {
      throw Error(ErrorCode::kVersionUnsupported, "unsupported state dump version");
    }
    const EngineConfig config = config_from_json(j.at("config"));
    config.validate();
    const auto& jt = j.at("text_features");
    if (!jt.is_array() || jt.size() != static_cast<std::size_t>(config.num_classes)) {
      throw Error(ErrorCode::kSchemaMismatch, "state: text_features must have num_classes rows");
    }
    Matrix text(config.num_classes, config.css_dim);
    for (std::size_t i = 0; i < jt.size(); ++i) {
      text.row(static_cast<Eigen::Index>(i)) =
          decode_f32(jt[i].get<std::string>(), config.css_dim).transpose();
    }
    DualCache cache(config.num_classes, config.css_capacity, config.css_dim, config.afv_capacity,
                    config.afv_dim);
    caches_from_json(j.at("css_cache"), cache, Space::kCss);
    caches_from_json(j.at("afv_cache"), cache, Space::kAfv);
    const auto& ts = j.at("threshold_state");
    EngineState s{config,
                  std::move(text),
                  std::move(cache),
                  ThresholdSchedule(ts.at("t0").get<double>(), ts.at("growth").get<double>(),
                                    ts.at("samples_tested").get<std::uint64_t>()),
                  j.at("sample_count").get<std::uint64_t>(),
                  ts.at("last_value").get<double>(),
                  std::nullopt};
    if (const auto& lq = j.at("last_query"); !lq.is_null()) {
      s.last_query = View{
          FeatureVector{decode_f32(lq.at("css").get<std::string>(), config.css_dim), Space::kCss},
          FeatureVector{decode_f32(lq.at("afv").get<std::string>(), config.afv_dim), Space::kAfv}};
    }
    return s;
  });
}

json report_to_json(const StreamResult& result, const EngineConfig& config, bool include_records) {
  json out{
      {"format", "cosmic-report"},
      {"version", kReportVersion},
      {"samples", result.records.size()},
      {"accuracy",
       {{"zero_shot", result.accuracy.zero_shot},
        {"tda", result.accuracy.tda},
        {"css", result.accuracy.css},
        {"afv", result.accuracy.afv},
        {"fused", result.accuracy.fused}}},
      {"config", config_to_json(config)},
  };
  if (include_records) {
    json records = json::array();
    for (const auto& r : result.records) {
      records.push_back({
          {"index", r.index},
          {"label", r.label},
          {"pseudo_label", r.pseudo_label},
          {"gate_entropy", r.gate_entropy},
          {"predicted",
           {{"zero_shot", r.predicted.zero_shot},
            {"tda", r.predicted.tda},
            {"css", r.predicted.css},
            {"afv", r.predicted.afv},
            {"fused", r.predicted.fused}}},
          {"css_insert", std::string(to_string(r.css_insert))},
          {"afv_insert", std::string(to_string(r.afv_insert))},
          {"threshold", r.threshold},
          {"graphs_rebuilt", r.graphs_rebuilt},
          {"css_cliques", r.css_cliques},
          {"afv_cliques", r.afv_cliques},
          {"css_mask_size", r.css_mask_size},
          {"afv_mask_size", r.afv_mask_size},
      });
    }
    out["records"] = std::move(records);
  }
  return out;
}

json graph_to_json(const AffinityGraph& graph) {
  json edges = json::array();
  for (const auto& [i, j] : graph.adjacency.edges()) edges.push_back({i, j});
  return json{{"n", graph.size()},
              {"edges", edges},
              {"threshold", graph.threshold},
              {"order", std::string(to_string(graph.order))}};
}

json space_graphs_to_json(const SpaceGraphs& graphs, Space space, GraphOrder clique_graph) {
  json out = graph_to_json(clique_graph == GraphOrder::kSecond ? graphs.sog : graphs.fog);
  out["space"] = std::string(to_string(space));
  out["node_ids"] = graphs.node_ids;
  out["cliques"] = graphs.cliques.cliques;
  out["first_order"] = graph_to_json(graphs.fog);
  out["second_order"] = graph_to_json(graphs.sog);
  return out;
}

std::string canonical_dump(const json& j) { return j.dump(); }

}  // namespace cosmic
