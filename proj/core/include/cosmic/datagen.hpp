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

// Synthetic dual-space classification streams.
//
// CSS class means are random unit vectors (pairwise cosine below
// max_mean_cosine); the text features are those means. Test-time CSS means
// are each rotated by shift_angle toward a random orthogonal direction. The
// AFV space has its own independent means and no shift; only labels tie the
// two spaces together. A sample point is mean + isotropic Gaussian noise,
// renormalized, and each extra view redraws noise around that point.

#pragma once

#include <cstddef>
#include <cstdint>

#include "cosmic/pipeline.hpp"

namespace cosmic {

struct SynthSpec {
  int num_classes = 10;
  Eigen::Index css_dim = 64;
  Eigen::Index afv_dim = 64;
  std::size_t samples = 1000;
  double css_noise = 0.1;
  double afv_noise = 0.05;
  double shift_angle = 0.0;  // radians
  int views_per_sample = 16;
  // Fraction of emitted ground-truth labels replaced with a wrong class.
  double label_noise = 0.0;
  std::uint64_t seed = 0;
  double max_mean_cosine = 0.8;

  // Throws InvalidArgument.
  void validate() const;

  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

// Deterministic per seed. Throws InfeasibleSpec when a class mean cannot be
// placed under the cosine cap within 10^4 draws.
Dataset generate(const SynthSpec& spec);

}  // namespace cosmic
