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

#include "cosmic/hyperclass.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

std::size_t InlierMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

std::vector<HyperClass> make_hyperclasses(const CliqueSet& cliques, const Matrix& features,
                                          Space space) {
  std::vector<HyperClass> out;
  out.reserve(cliques.size());
  for (const auto& clique : cliques.cliques) {
    if (clique.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "empty clique");
    }
    Vector sum = Vector::Zero(features.cols());
    for (int node : clique) {
      if (node < 0 || node >= features.rows()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "clique node " + std::to_string(node) + " out of range");
      }
      sum += features.row(node).transpose();
    }
    sum /= static_cast<double>(clique.size());
    out.push_back(HyperClass{clique, FeatureVector{normalize(sum), space}});
  }
  return out;
}

std::vector<std::size_t> rank_by_affinity(const FeatureVector& query,
                                          const std::vector<HyperClass>& hyper) {
  std::vector<double> affinity(hyper.size());
  for (std::size_t i = 0; i < hyper.size(); ++i) {
    affinity[i] = cosine(query, hyper[i].center);
  }
  std::vector<std::size_t> order(hyper.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return affinity[a] > affinity[b];
  });
  return order;
}

std::vector<std::size_t> select_top_r(const std::vector<std::size_t>& ranked, std::size_t m,
                                      double r) {
  if (m == 0) {
    throw Error(ErrorCode::kEmptyCliqueSet, "no cliques to select from");
  }
  if (!(r > 0.0 && r <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "selection ratio must lie in (0, 1]");
  }
  if (ranked.size() != m) {
    throw Error(ErrorCode::kInvalidArgument, "ranking length does not match clique count");
  }
  // The epsilon keeps products like 0.3 * 10 = 3.0000000000000004 from rounding up.
  const double raw = std::ceil(r * static_cast<double>(m) - 1e-9);
  const auto k = std::clamp<std::size_t>(static_cast<std::size_t>(raw), 1, m);
  return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k)};
}

InlierMask build_mask(const std::vector<std::size_t>& selected, const CliqueSet& cliques,
                      std::size_t n_nodes) {
  InlierMask mask{std::vector<bool>(n_nodes, false)};
  for (std::size_t idx : selected) {
    if (idx >= cliques.size()) {
      throw Error(ErrorCode::kInvalidArgument, "selected clique index out of range");
    }
    for (int node : cliques.cliques[idx]) {
      if (node < 0 || static_cast<std::size_t>(node) >= n_nodes) {
        throw Error(ErrorCode::kInvalidArgument, "clique node outside the mask");
      }
      mask.bits[static_cast<std::size_t>(node)] = true;
    }
  }
  return mask;
}

}  // namespace cosmic
