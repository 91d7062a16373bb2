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

#include "cosmic/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cosmic/error.hpp"

namespace cosmic {

int Adjacency::degree(int i) const {
  int d = 0;
  for (int j = 0; j < n_; ++j) d += bits_[index(i, j)];
  return d;
}

std::vector<int> Adjacency::neighbors(int i) const {
  std::vector<int> out;
  for (int j = 0; j < n_; ++j) {
    if (bits_[index(i, j)]) out.push_back(j);
  }
  return out;
}

std::vector<std::pair<int, int>> Adjacency::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n_; ++i) {
    for (int j = i + 1; j < n_; ++j) {
      if (bits_[index(i, j)]) out.emplace_back(i, j);
    }
  }
  return out;
}

std::size_t Adjacency::edge_count() const {
  std::size_t c = 0;
  for (auto b : bits_) c += b;
  return c / 2;
}

std::string_view to_string(GraphOrder order) noexcept {
  return order == GraphOrder::kFirst ? "first" : "second";
}

AffinityGraph build_fog(const Matrix& features, double threshold, Space space) {
  if (!std::isfinite(threshold) || threshold < -1.0 || threshold > 1.0) {
    throw Error(ErrorCode::kInvalidArgument,
                "affinity threshold must lie in [-1, 1], got " + std::to_string(threshold));
  }
  const auto n = static_cast<int>(features.rows());
  for (int i = 0; i < n; ++i) {
    if (!is_unit(features.row(i).transpose())) {
      throw Error(ErrorCode::kNonUnitNode, "graph node " + std::to_string(i) + " is not unit length");
    }
  }
  AffinityGraph g;
  g.node_features = features;
  g.adjacency = Adjacency(n);
  g.order = GraphOrder::kFirst;
  g.space = space;
  g.threshold = threshold;
  const Matrix gram = features * features.transpose();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (gram(i, j) > threshold) g.adjacency.connect(i, j);
    }
  }
  return g;
}

AffinityGraph build_sog(const AffinityGraph& fog) {
  if (fog.order != GraphOrder::kFirst) {
    throw Error(ErrorCode::kWrongOrder, "second-order graph needs a first-order input");
  }
  const int n = fog.size();
  const Adjacency& w = fog.adjacency;
  AffinityGraph sog = fog;
  sog.order = GraphOrder::kSecond;
  sog.adjacency = Adjacency(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (!w(i, j)) continue;
      for (int k = 0; k < n; ++k) {
        if (w(i, k) && w(k, j)) {
          sog.adjacency.connect(i, j);
          break;
        }
      }
    }
  }
  return sog;
}

ThresholdSchedule::ThresholdSchedule(double t0, double growth, std::uint64_t samples_tested)
    : t0_(t0), growth_(growth), i_(samples_tested) {
  if (!(t0 >= -1.0 && t0 <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "initial threshold must lie in [-1, 1]");
  }
  if (!(growth >= 0.0) || !std::isfinite(growth)) {
    throw Error(ErrorCode::kInvalidArgument, "threshold growth must be finite and >= 0");
  }
}

double ThresholdSchedule::current() const {
  return std::min(1.0, t0_ + growth_ * static_cast<double>(i_));
}

double ThresholdSchedule::advance() {
  const double t = current();
  ++i_;
  return t;
}

std::vector<int> degeneracy_order(const Adjacency& adjacency, int* degeneracy) {
  const int n = adjacency.size();
  std::vector<int> deg(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) deg[static_cast<std::size_t>(i)] = adjacency.degree(i);
  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  int b = 0;
  for (int step = 0; step < n; ++step) {
    int pick = -1;
    for (int v = 0; v < n; ++v) {
      if (removed[static_cast<std::size_t>(v)]) continue;
      if (pick < 0 || deg[static_cast<std::size_t>(v)] < deg[static_cast<std::size_t>(pick)]) {
        pick = v;
      }
    }
    b = std::max(b, deg[static_cast<std::size_t>(pick)]);
    removed[static_cast<std::size_t>(pick)] = true;
    order.push_back(pick);
    for (int u = 0; u < n; ++u) {
      if (!removed[static_cast<std::size_t>(u)] && adjacency(pick, u)) {
        --deg[static_cast<std::size_t>(u)];
      }
    }
  }
  if (degeneracy != nullptr) *degeneracy = b;
  return order;
}

namespace {

class BronKerbosch {
 public:
  explicit BronKerbosch(const Adjacency& adj) : adj_(adj) {}

  void expand(std::vector<int>& r, const std::vector<int>& p, const std::vector<int>& x) {
    if (p.empty()) {
      if (x.empty()) {
        std::vector<int> clique = r;
        std::sort(clique.begin(), clique.end());
        out_.push_back(std::move(clique));
      }
      return;
    }
    const int pivot = choose_pivot(p, x);
    std::vector<int> candidates;
    for (int v : p) {
      if (!adj_(pivot, v)) candidates.push_back(v);
    }
    std::vector<int> p_cur = p;
    std::vector<int> x_cur = x;
    for (int v : candidates) {
      std::vector<int> p_next;
      std::vector<int> x_next;
      for (int u : p_cur) {
        if (adj_(v, u)) p_next.push_back(u);
      }
      for (int u : x_cur) {
        if (adj_(v, u)) x_next.push_back(u);
      }
      r.push_back(v);
      expand(r, p_next, x_next);
      r.pop_back();
      p_cur.erase(std::find(p_cur.begin(), p_cur.end(), v));
      x_cur.insert(std::upper_bound(x_cur.begin(), x_cur.end(), v), v);
    }
  }

  std::vector<std::vector<int>> take() { return std::move(out_); }

 private:
  // Vertex of P u X with the most neighbours in P; lowest index on ties.
  int choose_pivot(const std::vector<int>& p, const std::vector<int>& x) const {
    int best = -1;
    int best_count = -1;
    auto consider = [&](int u) {
      int count = 0;
      for (int v : p) count += adj_(u, v) ? 1 : 0;
      if (count > best_count || (count == best_count && u < best)) {
        best = u;
        best_count = count;
      }
    };
    for (int u : p) consider(u);
    for (int u : x) consider(u);
    return best;
  }

  const Adjacency& adj_;
  std::vector<std::vector<int>> out_;
};

}  // namespace

CliqueSet maximal_cliques(const Adjacency& adjacency) {
  const int n = adjacency.size();
  const std::vector<int> order = degeneracy_order(adjacency);
  std::vector<int> position(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) position[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  BronKerbosch bk(adjacency);
  for (int v : order) {
    std::vector<int> p;
    std::vector<int> x;
    for (int u = 0; u < n; ++u) {
      if (!adjacency(v, u)) continue;
      if (position[static_cast<std::size_t>(u)] > position[static_cast<std::size_t>(v)]) {
        p.push_back(u);
      } else {
        x.push_back(u);
      }
    }
    std::vector<int> r{v};
    bk.expand(r, p, x);
  }
  CliqueSet result{bk.take()};
  std::sort(result.cliques.begin(), result.cliques.end());
  return result;
}

}  // namespace cosmic
