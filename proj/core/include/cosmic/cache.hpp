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

// Entropy-gated per-class feature caches.
//
// Each class keeps at most `capacity` entries. A new entry is accepted while
// there is room; once full it displaces the entry with the highest entropy,
// but only if its own entropy is strictly lower. Among equal-entropy maxima the
// oldest entry (smallest arrival index) is evicted.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "cosmic/math.hpp"

namespace cosmic {

struct CacheEntry {
  FeatureVector feature;
  double entropy = 0.0;
  std::uint64_t arrival_index = 0;
};

enum class InsertStatus { kInserted, kReplaced, kRejected };

std::string_view to_string(InsertStatus status) noexcept;

struct InsertOutcome {
  InsertStatus status = InsertStatus::kRejected;
  std::optional<CacheEntry> evicted;  // set iff status == kReplaced
};

class ClassCache {
 public:
  ClassCache(int class_id, std::size_t capacity, Space space, Eigen::Index dim);

  // Normalizes entry.feature before storing it. Throws DimensionMismatch when
  // the feature's space or length does not match this cache.
  InsertOutcome consider_insert(CacheEntry entry);

  // Replaces the contents wholesale (state restore). Entries are validated,
  // renormalized when off unit length and re-sorted by arrival index.
  void restore(std::vector<CacheEntry> entries);

  int class_id() const { return class_id_; }
  std::size_t capacity() const { return capacity_; }
  Space space() const { return space_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  bool full() const { return entries_.size() >= capacity_; }

  // Sorted by arrival index.
  const std::vector<CacheEntry>& entries() const { return entries_; }

  // Rows are the cached features in arrival order.
  Matrix feature_matrix() const;

  // Throws EmptyCache.
  double max_entropy() const;

 private:
  void check_feature(const FeatureVector& feature) const;
  void insert_sorted(CacheEntry entry);

  int class_id_;
  std::size_t capacity_;
  Space space_;
  Eigen::Index dim_;
  std::vector<CacheEntry> entries_;
};

// f = normalize(sum_j phi(query . m_j) m_j) over the cached features m_j.
// Throws EmptyCache or DimensionMismatch.
FeatureVector css_class_center(const ClassCache& cache, const FeatureVector& query, double alpha);

enum class AfvCenterMode { kAverage, kAttnWeighted, kEma };

std::string_view to_string(AfvCenterMode mode) noexcept;
std::optional<AfvCenterMode> parse_afv_center_mode(std::string_view name) noexcept;

struct AfvCenterParams {
  double attn_temperature = 0.01;
  // c <- (1 - decay) c + decay e, seeded with the oldest entry.
  double ema_decay = 0.1;
};

// Class center for the auxiliary space, always unit length. `query` is only
// read in kAttnWeighted mode, where a null query throws MissingQuery.
FeatureVector afv_class_center(const ClassCache& cache, const FeatureVector* query,
                               AfvCenterMode mode, const AfvCenterParams& params = {});

struct CacheSnapshot {
  Matrix css;         // rows ordered by (class_id, arrival_index)
  Matrix css_labels;  // one-hot, css.rows() x K
  Matrix afv;
  Matrix afv_labels;
};

class DualCache {
 public:
  DualCache(int num_classes, std::size_t css_capacity, Eigen::Index css_dim,
            std::size_t afv_capacity, Eigen::Index afv_dim);

  int num_classes() const { return num_classes_; }

  ClassCache& css(int class_id);
  const ClassCache& css(int class_id) const;
  ClassCache& afv(int class_id);
  const ClassCache& afv(int class_id) const;

  const std::vector<ClassCache>& css_caches() const { return css_; }
  const std::vector<ClassCache>& afv_caches() const { return afv_; }

  CacheSnapshot snapshot_matrices() const;

 private:
  void check_class(int class_id) const;

  int num_classes_;
  std::vector<ClassCache> css_;
  std::vector<ClassCache> afv_;
};

}  // namespace cosmic
