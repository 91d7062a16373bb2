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

#include "cosmic/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

void SynthSpec::validate() const {
  auto require = [](bool ok, const char* msg) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, std::string("synth spec: ") + msg);
  };
  require(num_classes >= 1, "num_classes must be >= 1");
  require(css_dim >= 2 && afv_dim >= 2, "dimensions must be >= 2");
  require(css_noise >= 0.0 && afv_noise >= 0.0, "noise must be >= 0");
  require(std::isfinite(shift_angle), "shift_angle must be finite");
  require(views_per_sample >= 1, "views_per_sample must be >= 1");
  require(label_noise >= 0.0 && label_noise < 1.0, "label_noise must lie in [0, 1)");
  require(label_noise == 0.0 || num_classes >= 2, "label noise needs at least two classes");
  require(max_mean_cosine > -1.0 && max_mean_cosine <= 1.0, "max_mean_cosine must lie in (-1, 1]");
}

namespace {

constexpr int kMaxPlacementDraws = 10000;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  Vector gaussian(Eigen::Index d, double stddev) {
    Vector v(d);
    for (Eigen::Index i = 0; i < d; ++i) v[i] = normal_(rng_) * stddev;
    return v;
  }

  Vector unit(Eigen::Index d) {
    for (;;) {
      Vector v = gaussian(d, 1.0);
      if (const double n = v.norm(); n > 1e-12) return v / n;
    }
  }

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

Matrix place_means(Sampler& rng, int k, Eigen::Index d, double max_cos, const char* space) {
  Matrix means(k, d);
  for (int i = 0; i < k; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementDraws && !placed; ++attempt) {
      const Vector cand = rng.unit(d);
      placed = true;
      for (int j = 0; j < i && placed; ++j) {
        placed = means.row(j).dot(cand) < max_cos;
      }
      if (placed) means.row(i) = cand.transpose();
    }
    if (!placed) {
      throw Error(ErrorCode::kInfeasibleSpec,
                  std::string("cannot place ") + std::to_string(k) + " " + space +
                      " class means in " + std::to_string(d) + " dims under the cosine cap");
    }
  }
  return means;
}

// Rotate `mean` by `angle` toward a random direction orthogonal to it.
Vector rotate(Sampler& rng, const Vector& mean, double angle) {
  Vector dir;
  do {
    dir = rng.unit(mean.size());
    dir -= dir.dot(mean) * mean;
  } while (dir.norm() < 1e-9);
  dir.normalize();
  return std::cos(angle) * mean + std::sin(angle) * dir;
}

Vector jitter(Sampler& rng, const Vector& center, double stddev) {
  Vector v = center + rng.gaussian(center.size(), stddev);
  return normalize(v);
}

}  // namespace

Dataset generate(const SynthSpec& spec) {
  spec.validate();
  Sampler rng(spec.seed);
  const int k = spec.num_classes;

  const Matrix css_means = place_means(rng, k, spec.css_dim, spec.max_mean_cosine, "CSS");
  const Matrix afv_means = place_means(rng, k, spec.afv_dim, spec.max_mean_cosine, "AFV");
  Matrix shifted(k, spec.css_dim);
  for (int i = 0; i < k; ++i) {
    shifted.row(i) = rotate(rng, css_means.row(i).transpose(), spec.shift_angle).transpose();
  }

  Dataset ds;
  ds.text_features = css_means;
  ds.afv_dim = spec.afv_dim;
  ds.class_names.reserve(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) ds.class_names.push_back("class_" + std::to_string(i));

  ds.samples.reserve(spec.samples);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    const int label = rng.uniform_int(0, k - 1);
    const Vector css_point = jitter(rng, shifted.row(label).transpose(), spec.css_noise);
    const Vector afv_point = jitter(rng, afv_means.row(label).transpose(), spec.afv_noise);
    LabeledSample sample;
    sample.label = label;
    sample.views.reserve(static_cast<std::size_t>(spec.views_per_sample));
    sample.views.push_back(View{{css_point, Space::kCss}, {afv_point, Space::kAfv}});
    for (int v = 1; v < spec.views_per_sample; ++v) {
      sample.views.push_back(View{{jitter(rng, css_point, spec.css_noise), Space::kCss},
                                  {jitter(rng, afv_point, spec.afv_noise), Space::kAfv}});
    }
    ds.samples.push_back(std::move(sample));
  }

  // Corrupt the emitted ground truth of an exact fraction of samples.
  const auto n_noisy =
      static_cast<std::size_t>(std::floor(spec.label_noise * static_cast<double>(spec.samples)));
  if (n_noisy > 0) {
    std::vector<std::size_t> idx(spec.samples);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::shuffle(idx.begin(), idx.end(), rng.engine());
    for (std::size_t j = 0; j < n_noisy; ++j) {
      auto& s = ds.samples[idx[j]];
      const int offset = rng.uniform_int(1, k - 1);
      s.label = (s.label + offset) % k;
    }
  }
  return ds;
}

}  // namespace cosmic
