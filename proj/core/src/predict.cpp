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

#include "cosmic/predict.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

void FusionWeights::validate() const {
  for (double b : {beta1, beta2, beta3}) {
    if (!(b >= 0.0) || !std::isfinite(b)) {
      throw Error(ErrorCode::kInvalidArgument, "fusion weights must be finite and >= 0");
    }
  }
  if (beta1 == 0.0 && beta2 == 0.0 && beta3 == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "at least one fusion weight must be positive");
  }
}

std::size_t ClassCenters::present_count() const {
  return static_cast<std::size_t>(std::count(present.begin(), present.end(), true));
}

namespace {

void require_dim(const FeatureVector& query, const Matrix& rows, const char* what) {
  if (query.dim() != rows.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": query has " + std::to_string(query.dim()) +
                    " dims, rows have " + std::to_string(rows.cols()));
  }
}

void require_centers(const ClassCenters& centers, Eigen::Index k) {
  if (centers.rows.rows() != k || centers.present.size() != static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kDimensionMismatch, "class centers do not cover every class");
  }
}

}  // namespace

PredictionVector zero_shot(const FeatureVector& query, const Matrix& text_features,
                           double temperature) {
  require_dim(query, text_features, "zero_shot");
  return softmax(text_features * query.values, temperature);
}

GateResult marginal_entropy_gate(const ViewBatch& batch, const Matrix& text_features,
                                 double temperature) {
  const std::size_t n = batch.views.size();
  if (n == 0) {
    throw Error(ErrorCode::kInvalidArgument, "entropy gate needs at least one view");
  }
  if (!(batch.selection_ratio > 0.0 && batch.selection_ratio <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "view selection ratio must lie in (0, 1]");
  }
  std::vector<PredictionVector> probs;
  std::vector<double> ent;
  probs.reserve(n);
  ent.reserve(n);
  for (const auto& view : batch.views) {
    probs.push_back(zero_shot(view.css, text_features, temperature));
    ent.push_back(entropy(probs.back()));
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return ent[a] < ent[b]; });
  const double raw = std::ceil(batch.selection_ratio * static_cast<double>(n) - 1e-9);
  const auto keep = std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, n);
  order.resize(keep);

  Vector mean = Vector::Zero(text_features.rows());
  for (std::size_t idx : order) mean += probs[idx].scores;
  mean /= static_cast<double>(keep);

  GateResult out;
  out.mean_probability = PredictionVector{std::move(mean), PredictionKind::kProbability};
  out.entropy = entropy(out.mean_probability);
  out.pseudo_label = static_cast<int>(argmax(out.mean_probability.scores));
  out.kept_views = std::move(order);
  return out;
}

Vector tda_adapted(const FeatureVector& query, const Matrix& cache_features,
                   const Matrix& pseudo_labels, double alpha) {
  if (cache_features.rows() == 0) {
    throw Error(ErrorCode::kEmptyCache, "TDA adaptation needs a nonempty cache");
  }
  require_dim(query, cache_features, "tda_adapted");
  if (pseudo_labels.rows() != cache_features.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "pseudo-label rows do not match cache rows");
  }
  const Vector affinity = cache_features * query.values;
  const Vector weights =
      affinity.unaryExpr([alpha](double x) { return adaptation_fn(x, alpha); });
  return pseudo_labels.transpose() * weights;
}

Vector cache_logits_centroid_form(const FeatureVector& query, const Matrix& cache_features,
                                  const Matrix& pseudo_labels) {
  require_dim(query, cache_features, "cache_logits_centroid_form");
  if (pseudo_labels.rows() != cache_features.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "pseudo-label rows do not match cache rows");
  }
  const Matrix class_sums = cache_features.transpose() * pseudo_labels;  // d x K
  return class_sums.transpose() * query.values;
}

Matrix css_nodes(const Matrix& text_features, const ClassCenters& css_centers) {
  const Eigen::Index k = text_features.rows();
  require_centers(css_centers, k);
  if (css_centers.rows.cols() != text_features.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "CSS centers and text features differ in width");
  }
  Matrix nodes(2 * k, text_features.cols());
  nodes.topRows(k) = text_features;
  for (Eigen::Index i = 0; i < k; ++i) {
    nodes.row(k + i) = css_centers.present[static_cast<std::size_t>(i)]
                           ? css_centers.rows.row(i)
                           : text_features.row(i);
  }
  return nodes;
}

PredictionVector css_prediction(const FeatureVector& query, const Matrix& text_features,
                                const ClassCenters& css_centers, const InlierMask& mask,
                                double temperature) {
  const Eigen::Index k = text_features.rows();
  if (mask.size() != static_cast<std::size_t>(2 * k)) {
    throw Error(ErrorCode::kDimensionMismatch, "CSS mask must have 2K entries");
  }
  const Matrix nodes = css_nodes(text_features, css_centers);
  require_dim(query, nodes, "css_prediction");
  Vector initial = softmax(nodes * query.values, temperature).scores;
  for (Eigen::Index i = 0; i < 2 * k; ++i) {
    if (!mask.bits[static_cast<std::size_t>(i)]) initial[i] = 0.0;
  }
  Vector folded(k);
  for (Eigen::Index i = 0; i < k; ++i) folded[i] = (initial[i] + initial[i + k]) / 2.0;
  return PredictionVector{std::move(folded), PredictionKind::kMaskedProbability};
}

PredictionVector afv_prediction(const FeatureVector& query_aux, const ClassCenters& afv_centers,
                                const InlierMask& mask, double temperature) {
  const Eigen::Index k = afv_centers.rows.rows();
  require_centers(afv_centers, k);
  if (mask.size() != static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kDimensionMismatch, "AFV mask must have K entries");
  }
  require_dim(query_aux, afv_centers.rows, "afv_prediction");
  std::vector<Eigen::Index> ids;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (afv_centers.present[static_cast<std::size_t>(i)]) ids.push_back(i);
  }
  if (ids.empty()) {
    throw Error(ErrorCode::kEmptyAfv, "no class has a cached AFV feature");
  }
  Vector logits(static_cast<Eigen::Index>(ids.size()));
  for (std::size_t j = 0; j < ids.size(); ++j) {
    logits[static_cast<Eigen::Index>(j)] = afv_centers.rows.row(ids[j]).dot(query_aux.values);
  }
  const Vector p = softmax(logits, temperature).scores;
  Vector out = Vector::Zero(k);
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (mask.bits[static_cast<std::size_t>(ids[j])]) out[ids[j]] = p[static_cast<Eigen::Index>(j)];
  }
  return PredictionVector{std::move(out), PredictionKind::kMaskedProbability};
}

PredictionVector fuse(const PredictionVector& p_zs, const PredictionVector& p_css,
                      const PredictionVector& p_afv, const FusionWeights& weights) {
  if (p_zs.size() != p_css.size() || p_zs.size() != p_afv.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "fusion inputs differ in length");
  }
  Vector out =
      weights.beta1 * p_zs.scores + weights.beta2 * p_css.scores + weights.beta3 * p_afv.scores;
  return PredictionVector{std::move(out), PredictionKind::kFused};
}

std::vector<double> sweep_axis(double step, double max) {
  if (!(step > 0.0) || !std::isfinite(step) || !(max >= 0.0) || !std::isfinite(max)) {
    throw Error(ErrorCode::kInvalidArgument, "sweep needs step > 0 and max >= 0");
  }
  const auto count = static_cast<std::size_t>(std::llround(max / step));
  std::vector<double> axis(count + 1);
  for (std::size_t i = 0; i <= count; ++i) axis[i] = static_cast<double>(i) * step;
  return axis;
}

double fused_accuracy(std::span<const SweepSample> stream, const FusionWeights& weights) {
  if (stream.empty()) {
    throw Error(ErrorCode::kEmptyStream, "accuracy of an empty stream");
  }
  std::size_t correct = 0;
  for (const auto& s : stream) {
    const Vector fused = weights.beta1 * s.zero_shot + weights.beta2 * s.css + weights.beta3 * s.afv;
    if (argmax(fused) == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(stream.size());
}

SweepResult sweep_betas(std::span<const SweepSample> stream, double step, double max) {
  if (stream.empty()) {
    throw Error(ErrorCode::kEmptyStream, "beta sweep needs a nonempty validation stream");
  }
  const auto axis = sweep_axis(step, max);
  SweepResult result;
  result.grid.reserve(axis.size() * axis.size());
  bool first = true;
  for (double b2 : axis) {
    for (double b3 : axis) {
      const double acc = fused_accuracy(stream, FusionWeights{1.0, b2, b3});
      result.grid.push_back(GridPoint{b2, b3, acc});
      if (first || acc > result.best_accuracy) {
        result.best = FusionWeights{1.0, b2, b3};
        result.best_accuracy = acc;
        first = false;
      }
    }
  }
  return result;
}

}  // namespace cosmic
