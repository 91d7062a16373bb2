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

// JSON documents: engine config, synthetic spec, state dump, run report and
// graph dump. Parsers throw SchemaMismatch on malformed documents and accept
// missing optional fields (defaults apply).

#pragma once

#include <nlohmann/json.hpp>

#include "cosmic/datagen.hpp"
#include "cosmic/pipeline.hpp"

namespace cosmic {

inline constexpr int kStateDumpVersion = 1;
inline constexpr int kReportVersion = 1;

nlohmann::json config_to_json(const EngineConfig& config);
EngineConfig config_from_json(const nlohmann::json& j);

nlohmann::json synth_spec_to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

// {format, version, config, text_features, css_cache, afv_cache,
//  threshold_state, sample_count, last_query}. Features are base64
// little-endian f32.
nlohmann::json state_to_json(const EngineState& state);
EngineState state_from_json(const nlohmann::json& j);

// {format, version, samples, accuracy{zero_shot,tda,css,afv,fused}, config
//  [, records]}.
nlohmann::json report_to_json(const StreamResult& result, const EngineConfig& config,
                              bool include_records);

// {n, edges: [[i,j],...], threshold, order} for one graph.
nlohmann::json graph_to_json(const AffinityGraph& graph);

// graph_to_json of the clique graph plus space, node_ids, cliques and the
// first-order graph under "first_order".
nlohmann::json space_graphs_to_json(const SpaceGraphs& graphs, Space space,
                                    GraphOrder clique_graph);

// Sorted keys, no insignificant whitespace.
std::string canonical_dump(const nlohmann::json& j);

}  // namespace cosmic
