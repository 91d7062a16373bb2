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

#include "cosmic/cache.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "cosmic/error.hpp"

namespace cosmic {

std::string_view to_string(InsertStatus status) noexcept {
  switch (status) {
    case InsertStatus::kInserted: return "inserted";
    case InsertStatus::kReplaced: return "replaced";
    case InsertStatus::kRejected: return "rejected";
  }
  return "unknown";
}

ClassCache::ClassCache(int class_id, std::size_t capacity, Space space, Eigen::Index dim)
    : class_id_(class_id), capacity_(capacity), space_(space), dim_(dim) {
  if (capacity == 0) {
    throw Error(ErrorCode::kInvalidArgument, "cache capacity must be at least 1");
  }
  if (dim <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "cache dimension must be positive");
  }
  entries_.reserve(capacity);
}

void ClassCache::check_feature(const FeatureVector& feature) const {
  if (feature.space != space_ || feature.dim() != dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cache for class " + std::to_string(class_id_) + " expects " +
                    std::string(to_string(space_)) + "[" + std::to_string(dim_) + "], got " +
                    std::string(to_string(feature.space)) + "[" +
                    std::to_string(feature.dim()) + "]");
  }
}

void ClassCache::insert_sorted(CacheEntry entry) {
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), entry.arrival_index,
                              [](std::uint64_t idx, const CacheEntry& e) {
                                return idx < e.arrival_index;
                              });
  entries_.insert(pos, std::move(entry));
}

InsertOutcome ClassCache::consider_insert(CacheEntry entry) {
  check_feature(entry.feature);
  if (!std::isfinite(entry.entropy) || entry.entropy < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cache entry entropy must be finite and >= 0");
  }
  entry.feature = normalize(entry.feature);

  if (entries_.size() < capacity_) {
    insert_sorted(std::move(entry));
    return {InsertStatus::kInserted, std::nullopt};
  }

  // Entries are in arrival order, so the first strict maximum is the oldest.
  auto worst = entries_.begin();
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if (it->entropy > worst->entropy) worst = it;
  }
  if (entry.entropy < worst->entropy) {
    CacheEntry evicted = std::move(*worst);
    entries_.erase(worst);
    insert_sorted(std::move(entry));
    return {InsertStatus::kReplaced, std::move(evicted)};
  }
  return {InsertStatus::kRejected, std::nullopt};
}

void ClassCache::restore(std::vector<CacheEntry> entries) {
  if (entries.size() > capacity_) {
    throw Error(ErrorCode::kSchemaMismatch, "restored cache exceeds its capacity");
  }
  // Features already unit-length up to f32 rounding are kept verbatim so a
  // dump reloads to the same bytes.
  for (auto& e : entries) {
    check_feature(e.feature);
    if (std::abs(e.feature.values.norm() - 1.0) > 1e-6) e.feature = normalize(e.feature);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const CacheEntry& a, const CacheEntry& b) {
                     return a.arrival_index < b.arrival_index;
                   });
  entries_ = std::move(entries);
}

Matrix ClassCache::feature_matrix() const {
  Matrix m(static_cast<Eigen::Index>(entries_.size()), dim_);
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = entries_[i].feature.values.transpose();
  }
  return m;
}

double ClassCache::max_entropy() const {
  if (entries_.empty()) {
    throw Error(ErrorCode::kEmptyCache, "max_entropy of an empty cache");
  }
  double h = entries_.front().entropy;
  for (const auto& e : entries_) h = std::max(h, e.entropy);
  return h;
}

namespace {

void require_nonempty(const ClassCache& cache) {
  if (cache.empty()) {
    throw Error(ErrorCode::kEmptyCache,
                "class " + std::to_string(cache.class_id()) + " has no cached features");
  }
}

void require_query(const ClassCache& cache, const FeatureVector& query) {
  if (query.space != cache.space() || query.dim() != cache.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "query does not match the cache's space");
  }
}

}  // namespace

FeatureVector css_class_center(const ClassCache& cache, const FeatureVector& query, double alpha) {
  require_nonempty(cache);
  require_query(cache, query);
  Vector acc = Vector::Zero(cache.dim());
  for (const auto& e : cache.entries()) {
    acc += adaptation_fn(query.values.dot(e.feature.values), alpha) * e.feature.values;
  }
  return FeatureVector{normalize(acc), cache.space()};
}

std::string_view to_string(AfvCenterMode mode) noexcept {
  switch (mode) {
    case AfvCenterMode::kAverage: return "average";
    case AfvCenterMode::kAttnWeighted: return "attn_weighted";
    case AfvCenterMode::kEma: return "ema";
  }
  return "unknown";
}

std::optional<AfvCenterMode> parse_afv_center_mode(std::string_view name) noexcept {
  if (name == "average") return AfvCenterMode::kAverage;
  if (name == "attn_weighted") return AfvCenterMode::kAttnWeighted;
  if (name == "ema") return AfvCenterMode::kEma;
  return std::nullopt;
}

FeatureVector afv_class_center(const ClassCache& cache, const FeatureVector* query,
                               AfvCenterMode mode, const AfvCenterParams& params) {
  require_nonempty(cache);
  const auto& entries = cache.entries();
  Vector acc = Vector::Zero(cache.dim());

  switch (mode) {
    case AfvCenterMode::kAverage:
      for (const auto& e : entries) acc += e.feature.values;
      acc /= static_cast<double>(entries.size());
      break;

    case AfvCenterMode::kAttnWeighted: {
      if (query == nullptr) {
        throw Error(ErrorCode::kMissingQuery, "attn_weighted AFV center needs a query");
      }
      require_query(cache, *query);
      Vector logits(static_cast<Eigen::Index>(entries.size()));
      for (std::size_t j = 0; j < entries.size(); ++j) {
        logits[static_cast<Eigen::Index>(j)] = query->values.dot(entries[j].feature.values);
      }
      const Vector w = softmax(logits, params.attn_temperature).scores;
      for (std::size_t j = 0; j < entries.size(); ++j) {
        acc += w[static_cast<Eigen::Index>(j)] * entries[j].feature.values;
      }
      break;
    }

    case AfvCenterMode::kEma:
      if (!(params.ema_decay > 0.0 && params.ema_decay <= 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "EMA decay must lie in (0, 1]");
      }
      acc = entries.front().feature.values;
      for (std::size_t j = 1; j < entries.size(); ++j) {
        acc = (1.0 - params.ema_decay) * acc + params.ema_decay * entries[j].feature.values;
      }
      break;
  }
  return FeatureVector{normalize(acc), cache.space()};
}

DualCache::DualCache(int num_classes, std::size_t css_capacity, Eigen::Index css_dim,
                     std::size_t afv_capacity, Eigen::Index afv_dim)
    : num_classes_(num_classes) {
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "a dual cache needs at least one class");
  }
  css_.reserve(static_cast<std::size_t>(num_classes));
  afv_.reserve(static_cast<std::size_t>(num_classes));
  for (int k = 0; k < num_classes; ++k) {
    css_.emplace_back(k, css_capacity, Space::kCss, css_dim);
    afv_.emplace_back(k, afv_capacity, Space::kAfv, afv_dim);
  }
}

void DualCache::check_class(int class_id) const {
  if (class_id < 0 || class_id >= num_classes_) {
    throw Error(ErrorCode::kInvalidArgument,
                "class id " + std::to_string(class_id) + " out of range");
  }
}

ClassCache& DualCache::css(int class_id) {
  check_class(class_id);
  return css_[static_cast<std::size_t>(class_id)];
}
const ClassCache& DualCache::css(int class_id) const {
  check_class(class_id);
  return css_[static_cast<std::size_t>(class_id)];
}
ClassCache& DualCache::afv(int class_id) {
  check_class(class_id);
  return afv_[static_cast<std::size_t>(class_id)];
}
const ClassCache& DualCache::afv(int class_id) const {
  check_class(class_id);
  return afv_[static_cast<std::size_t>(class_id)];
}

namespace {

void stack(const std::vector<ClassCache>& caches, int num_classes, Matrix& features,
           Matrix& labels) {
  Eigen::Index rows = 0;
  for (const auto& c : caches) rows += static_cast<Eigen::Index>(c.size());
  features = Matrix::Zero(rows, caches.front().dim());
  labels = Matrix::Zero(rows, num_classes);
  Eigen::Index r = 0;
  for (const auto& c : caches) {
    for (const auto& e : c.entries()) {
      features.row(r) = e.feature.values.transpose();
      labels(r, c.class_id()) = 1.0;
      ++r;
    }
  }
}

}  // namespace

CacheSnapshot DualCache::snapshot_matrices() const {
  CacheSnapshot snap;
  stack(css_, num_classes_, snap.css, snap.css_labels);
  stack(afv_, num_classes_, snap.afv, snap.afv_labels);
  return snap;
}

}  // namespace cosmic
