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

// Prediction paths: zero-shot, the multi-view entropy gate, the plain cache
// (TDA) adapter, the masked CSS/AFV predictions and their fusion, plus the
// fusion-weight grid search.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cosmic/hyperclass.hpp"
#include "cosmic/math.hpp"

namespace cosmic {

struct FusionWeights {
  double beta1 = 1.0;
  double beta2 = 1.0;
  double beta3 = 1.0;

  // Throws InvalidArgument unless all weights are >= 0 and one is > 0.
  void validate() const;

  friend bool operator==(const FusionWeights&, const FusionWeights&) = default;
};

// One augmented view of a test sample in both spaces.
struct View {
  FeatureVector css;
  FeatureVector afv;
};

// views[0] is the un-augmented original.
struct ViewBatch {
  std::span<const View> views;
  double selection_ratio = 0.1;
};

struct GateResult {
  PredictionVector mean_probability;
  double entropy = 0.0;
  int pseudo_label = 0;
  std::vector<std::size_t> kept_views;  // ascending per-view entropy
};

// Per-class cached centers; rows of absent classes are zero and unused.
struct ClassCenters {
  Matrix rows;
  std::vector<bool> present;

  std::size_t present_count() const;
};

PredictionVector zero_shot(const FeatureVector& query, const Matrix& text_features,
                           double temperature);

// Keeps the ceil(R * N) views with the lowest zero-shot entropy (view index
// breaks ties), averages their probabilities and reports the entropy and
// argmax of that average.
GateResult marginal_entropy_gate(const ViewBatch& batch, const Matrix& text_features,
                                 double temperature);

// phi(query . M^T) L. Throws EmptyCache when the cache has no rows.
Vector tda_adapted(const FeatureVector& query, const Matrix& cache_features,
                   const Matrix& pseudo_labels, double alpha);

// query . (F^T L), i.e. cache logits read off per-class feature sums with the
// adaptation function left out.
Vector cache_logits_centroid_form(const FeatureVector& query, const Matrix& cache_features,
                                  const Matrix& pseudo_labels);

// The 2K CSS nodes: text rows, then visual-center rows. A class without a
// cached center reuses its text feature.
Matrix css_nodes(const Matrix& text_features, const ClassCenters& css_centers);

// softmax(query . f_s^T / tau) masked over 2K nodes, then folded:
// p_i = (P[i] + P[i + K]) / 2. No renormalization after masking.
PredictionVector css_prediction(const FeatureVector& query, const Matrix& text_features,
                                const ClassCenters& css_centers, const InlierMask& mask,
                                double temperature);

// softmax over the present AFV centers, masked. Absent classes score 0.
// Throws EmptyAFV when no class has a center.
PredictionVector afv_prediction(const FeatureVector& query_aux, const ClassCenters& afv_centers,
                                const InlierMask& mask, double temperature);

PredictionVector fuse(const PredictionVector& p_zs, const PredictionVector& p_css,
                      const PredictionVector& p_afv, const FusionWeights& weights);

// Per-sample path outputs consumed by the weight search.
struct SweepSample {
  Vector zero_shot;
  Vector css;
  Vector afv;
  int label = 0;
};

struct GridPoint {
  double beta2 = 0.0;
  double beta3 = 0.0;
  double accuracy = 0.0;
};

struct SweepResult {
  FusionWeights best;
  double best_accuracy = 0.0;
  std::vector<GridPoint> grid;  // beta2-major, ascending
};

// Grid values are i * step for i = 0 .. round(max / step).
std::vector<double> sweep_axis(double step, double max);

// beta1 is pinned at 1; (beta2, beta3) range over sweep_axis(step, max). The
// best top-1 accuracy wins; ties go to the lexicographically smaller pair.
// Throws EmptyStream.
SweepResult sweep_betas(std::span<const SweepSample> stream, double step, double max);

// Top-1 accuracy of beta1 zs + beta2 css + beta3 afv.
double fused_accuracy(std::span<const SweepSample> stream, const FusionWeights& weights);

}  // namespace cosmic
