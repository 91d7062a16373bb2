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


// Library output against the independent reference implementations.

#include <gtest/gtest.h>

#include <map>

#include "cosmic/cache.hpp"
#include "cosmic/graph.hpp"
#include "cosmic/pipeline.hpp"
#include "cosmic/predict.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

namespace cosmic {
namespace {

using testing::Rng;

void expect_matches(const ClassCache& cache, const std::vector<oracle::SimEntry>& expected) {
  ASSERT_EQ(cache.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(cache.entries()[i].arrival_index, expected[i].arrival);
    EXPECT_EQ(cache.entries()[i].entropy, expected[i].entropy);
  }
}

TEST(CacheOracleTest, RandomSequences) {
  Rng rng(201);
  for (int t = 0; t < 300; ++t) {
    const auto capacity = static_cast<std::size_t>(rng.uniform_int(1, 12));
    const int length = rng.uniform_int(0, 200);
    const int levels = t % 3 == 0 ? 3 : 1000;  // few levels: many ties
    std::vector<double> entropies;
    ClassCache cache(0, capacity, Space::kAfv, 2);
    for (int i = 0; i < length; ++i) {
      const double h = rng.uniform_int(0, levels) / static_cast<double>(levels);
      entropies.push_back(h);
      cache.consider_insert(CacheEntry{rng.feature(2, Space::kAfv), h, static_cast<std::uint64_t>(i)});
      ASSERT_LE(cache.size(), capacity);
    }
    expect_matches(cache, oracle::simulate_cache(capacity, entropies));
  }
}

TEST(CacheOracleTest, EngineCachesFollowTheRecords) {
  // Replaying (pseudo_label, gate_entropy) from the records through the
  // reference rule reproduces both engine caches.
  Rng rng(202);
  const auto ds = testing::small_dataset(rng, 6, 10, 8, 150, 4, 0.6);
  auto cfg = bind_config(EngineConfig{}, ds);
  cfg.css_capacity = 2;
  cfg.afv_capacity = 4;
  std::optional<EngineState> state;
  const auto result = run_stream(cfg, ds, {}, &state);

  for (int k = 0; k < cfg.num_classes; ++k) {
    std::vector<double> per_class;
    std::vector<std::uint64_t> arrivals;
    for (const auto& r : result.records) {
      if (r.pseudo_label != k) continue;
      per_class.push_back(r.gate_entropy);
      arrivals.push_back(r.index);
    }
    for (auto [cache, cap] : {std::pair{&state->cache.css(k), cfg.css_capacity},
                              std::pair{&state->cache.afv(k), cfg.afv_capacity}}) {
      auto expected = oracle::simulate_cache(cap, per_class);
      for (auto& e : expected) e.arrival = arrivals[e.arrival];
      expect_matches(*cache, expected);
    }
  }
}

TEST(CliqueOracleTest, DenseAndSparseGraphs) {
  Rng rng(203);
  for (int t = 0; t < 300; ++t) {
    const auto adj = rng.random_graph(rng.uniform_int(0, 14), rng.uniform(0.0, 1.0));
    ASSERT_EQ(maximal_cliques(adj).cliques, oracle::brute_force_cliques(adj));
  }
}

TEST(CliqueOracleTest, SecondOrderGraphsFromFeatures) {
  Rng rng(204);
  for (int t = 0; t < 100; ++t) {
    const auto fog = build_fog(rng.unit_rows(rng.uniform_int(1, 14), 3), rng.uniform(-0.3, 0.7));
    const auto sog = build_sog(fog);
    EXPECT_EQ(maximal_cliques(sog).cliques, oracle::brute_force_cliques(sog.adjacency));
  }
}

TEST(AssociativityOracleTest, ClassMeansFromSums) {
  Rng rng(205);
  for (int t = 0; t < 50; ++t) {
    const int k = rng.uniform_int(1, 6);
    const int d = rng.uniform_int(2, 10);
    const int n = rng.uniform_int(1, 40);
    const Matrix f = rng.unit_rows(n, d);
    Matrix l = Matrix::Zero(n, k);
    std::map<int, std::vector<int>> members;
    for (int i = 0; i < n; ++i) {
      const int c = rng.uniform_int(0, k - 1);
      l(i, c) = 1.0;
      members[c].push_back(i);
    }
    const Matrix sums = oracle::naive_class_sums(f, l, k);
    for (const auto& [c, rows] : members) {
      Vector mean = Vector::Zero(d);
      for (int i : rows) mean += f.row(i).transpose() / static_cast<double>(rows.size());
      EXPECT_NEAR((sums.col(c) / static_cast<double>(rows.size()) - mean).norm(), 0.0, 1e-12);
      // Query by the mean direction: library output at c equals q . sum_c.
      const Vector q = rng.unit(d);
      const Vector out = cache_logits_centroid_form(FeatureVector{q, Space::kCss}, f, l);
      EXPECT_NEAR(out[c], q.dot(sums.col(c)), 1e-9);
    }
  }
}

TEST(SweepOracleTest, FinerGrids) {
  Rng rng(206);
  for (double step : {0.5, 0.25}) {
    std::vector<SweepSample> stream;
    for (int i = 0; i < 60; ++i) {
      SweepSample s;
      s.label = rng.uniform_int(0, 3);
      s.zero_shot = softmax(rng.gaussian(4), 0.5).scores;
      s.css = softmax(rng.gaussian(4), 0.5).scores;
      s.afv = softmax(rng.gaussian(4), 0.5).scores;
      stream.push_back(s);
    }
    const auto r = sweep_betas(stream, step, 2.0);
    const auto grid = oracle::exhaustive_sweep(stream, step, 2.0);
    ASSERT_EQ(r.grid.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(r.grid[i].accuracy, grid[i].accuracy);
    const auto best = oracle::best_point(grid);
    EXPECT_EQ(r.best, (FusionWeights{1.0, best.beta2, best.beta3}));
  }
}

}  // namespace
}  // namespace cosmic
