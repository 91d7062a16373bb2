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

// Affinity graphs over class-center nodes and maximal clique enumeration.

#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

#include "cosmic/math.hpp"

namespace cosmic {

// Dense symmetric boolean adjacency with a false diagonal.
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(int n) : n_(n), bits_(static_cast<std::size_t>(n) * n, 0) {}

  int size() const { return n_; }

  bool operator()(int i, int j) const { return bits_[index(i, j)] != 0; }

  // Sets both (i, j) and (j, i). Self-loops are ignored.
  void connect(int i, int j) {
    if (i == j) return;
    bits_[index(i, j)] = 1;
    bits_[index(j, i)] = 1;
  }

  int degree(int i) const;
  std::vector<int> neighbors(int i) const;
  // Each undirected edge once, as (i, j) with i < j, in row-major order.
  std::vector<std::pair<int, int>> edges() const;
  std::size_t edge_count() const;

  friend bool operator==(const Adjacency&, const Adjacency&) = default;

 private:
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_ + j; }

  int n_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class GraphOrder { kFirst, kSecond };

std::string_view to_string(GraphOrder order) noexcept;

struct AffinityGraph {
  Matrix node_features;  // N x D, unit rows
  Adjacency adjacency;
  GraphOrder order = GraphOrder::kFirst;
  Space space = Space::kCss;
  double threshold = 0.0;

  int size() const { return adjacency.size(); }
};

// Edge (i, j) iff cos(F_i, F_j) > threshold, strictly. Rows must be unit
// length within 1e-4 (NonUnitNode). threshold must lie in [-1, 1].
AffinityGraph build_fog(const Matrix& features, double threshold, Space space = Space::kCss);

// W_sog = W_fog AND (W_fog x W_fog) over booleans: an edge survives iff it
// also closes a path of length two. Throws WrongOrder for a non-first-order input.
AffinityGraph build_sog(const AffinityGraph& fog);

// t_i = min(1, t0 + growth * i), where i counts processed samples.
class ThresholdSchedule {
 public:
  ThresholdSchedule() = default;
  ThresholdSchedule(double t0, double growth, std::uint64_t samples_tested = 0);

  double current() const;
  // Returns the value for the current count, then increments the count.
  double advance();

  double initial() const { return t0_; }
  double growth() const { return growth_; }
  std::uint64_t samples_tested() const { return i_; }

 private:
  double t0_ = 0.0;
  double growth_ = 0.0;
  std::uint64_t i_ = 0;
};

struct CliqueSet {
  // Each clique sorted ascending; the list sorted lexicographically.
  std::vector<std::vector<int>> cliques;

  std::size_t size() const { return cliques.size(); }
  bool empty() const { return cliques.empty(); }

  friend bool operator==(const CliqueSet&, const CliqueSet&) = default;
};

// All maximal cliques (isolated vertices come back as singletons).
// Bron-Kerbosch with Tomita pivoting, with the outer level driven by a
// degeneracy ordering; ties in the ordering go to the lower node index.
CliqueSet maximal_cliques(const Adjacency& adjacency);
inline CliqueSet maximal_cliques(const AffinityGraph& graph) {
  return maximal_cliques(graph.adjacency);
}

// Degeneracy ordering used by maximal_cliques; also reports the degeneracy.
std::vector<int> degeneracy_order(const Adjacency& adjacency, int* degeneracy = nullptr);

}  // namespace cosmic
