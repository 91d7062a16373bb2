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

#include "cosmic/math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

std::string_view to_string(Space space) noexcept {
  return space == Space::kCss ? "css" : "afv";
}

Vector normalize(const Vector& v) {
  const double norm = v.norm();
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero or non-finite vector");
  }
  return v / norm;
}

FeatureVector normalize(const FeatureVector& v) {
  return FeatureVector{normalize(v.values), v.space};
}

double cosine(const FeatureVector& a, const FeatureVector& b) {
  if (a.space != b.space || a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cosine: operands differ in space or length (" + std::to_string(a.dim()) +
                    " vs " + std::to_string(b.dim()) + ")");
  }
  const double denom = a.values.norm() * b.values.norm();
  if (denom == 0.0) {
    throw Error(ErrorCode::kZeroVector, "cosine: zero-length operand");
  }
  return std::clamp(a.values.dot(b.values) / denom, -1.0, 1.0);
}

PredictionVector softmax(const Vector& logits, double temperature) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kNonPositiveTemperature,
                "softmax temperature must be positive, got " + std::to_string(temperature));
  }
  if (logits.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "softmax of an empty vector");
  }
  if (!logits.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "softmax logits must be finite");
  }
  const Vector scaled = logits / temperature;
  const Vector e = (scaled.array() - scaled.maxCoeff()).exp();
  return PredictionVector{e / e.sum(), PredictionKind::kProbability};
}

double entropy(const PredictionVector& p) {
  if (p.size() == 0) {
    throw Error(ErrorCode::kNotAProbability, "entropy of an empty vector");
  }
  if ((p.scores.array() < 0.0).any() || std::abs(p.scores.sum() - 1.0) > 1e-4) {
    throw Error(ErrorCode::kNotAProbability, "entropy input is not a probability vector");
  }
  double h = 0.0;
  for (const double q : p.scores) {
    if (q > 0.0) h -= q * std::log(q);
  }
  return h;
}

double adaptation_fn(double similarity, double alpha) {
  return std::exp(-alpha * (1.0 - similarity));
}

Eigen::Index argmax(const Vector& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

bool is_unit(const Vector& v, double tolerance) {
  return std::abs(v.norm() - 1.0) <= tolerance;
}

}  // namespace cosmic
