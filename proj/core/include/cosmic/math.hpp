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

// Shared numeric kernels. Everything here is a pure function.

#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace cosmic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// CSS: the shared text/image embedding space. AFV: the auxiliary
// fine-grained visual embedding space.
enum class Space : std::uint8_t { kCss = 0, kAfv = 1 };

std::string_view to_string(Space space) noexcept;

struct FeatureVector {
  Vector values;
  Space space = Space::kCss;

  Eigen::Index dim() const { return values.size(); }
};

enum class PredictionKind { kProbability, kMaskedProbability, kFused };

struct PredictionVector {
  Vector scores;
  PredictionKind kind = PredictionKind::kProbability;

  Eigen::Index size() const { return scores.size(); }
};

// Throws ZeroVector when every entry is zero.
FeatureVector normalize(const FeatureVector& v);
Vector normalize(const Vector& v);

// Cosine of the angle between a and b, clamped to [-1, 1]. Operands need not
// be unit length. Throws DimensionMismatch on a space or length mismatch.
double cosine(const FeatureVector& a, const FeatureVector& b);

// Temperature softmax with max-subtraction. Throws NonPositiveTemperature.
PredictionVector softmax(const Vector& logits, double temperature);

// Shannon entropy in nats; 0 log 0 is taken as 0. Throws NotAProbability if
// an entry is negative or the sum is off by more than 1e-4.
double entropy(const PredictionVector& p);

// phi(x) = exp(-alpha (1 - x)).
double adaptation_fn(double similarity, double alpha);

// Index of the largest entry; the lowest index wins ties.
Eigen::Index argmax(const Vector& v);

inline constexpr double kUnitNormTolerance = 1e-4;

bool is_unit(const Vector& v, double tolerance = kUnitNormTolerance);

}  // namespace cosmic
