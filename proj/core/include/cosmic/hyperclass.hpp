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

#pragma once

#include <cstddef>
#include <vector>

#include "cosmic/graph.hpp"
#include "cosmic/math.hpp"

namespace cosmic {

// Clique centroid used as a multi-class query target.
struct HyperClass {
  std::vector<int> member_nodes;
  FeatureVector center;  // normalize(mean of member node features)
};

struct InlierMask {
  std::vector<bool> bits;

  static InlierMask all_ones(std::size_t n) { return InlierMask{std::vector<bool>(n, true)}; }

  std::size_t size() const { return bits.size(); }
  std::size_t count() const;
  bool any() const { return count() > 0; }

  friend bool operator==(const InlierMask&, const InlierMask&) = default;
};

std::vector<HyperClass> make_hyperclasses(const CliqueSet& cliques, const Matrix& features,
                                          Space space = Space::kCss);

// Indices into `hyper`, by descending cos(query, center); ascending index on
// ties. Throws DimensionMismatch.
std::vector<std::size_t> rank_by_affinity(const FeatureVector& query,
                                          const std::vector<HyperClass>& hyper);

// The first ceil(r * m) ranked indices. Throws EmptyCliqueSet when m == 0.
std::vector<std::size_t> select_top_r(const std::vector<std::size_t>& ranked, std::size_t m,
                                      double r);

// Bit i set iff node i belongs to one of the selected cliques.
InlierMask build_mask(const std::vector<std::size_t>& selected, const CliqueSet& cliques,
                      std::size_t n_nodes);

}  // namespace cosmic
