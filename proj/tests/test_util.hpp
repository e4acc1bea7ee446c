// Copyright 2026 The div2vec Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Shared helpers for the unit tests.

#pragma once

#include <boost/math/distributions/chi_squared.hpp>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "div2vec/graph.hpp"

namespace testutil {

// G(n, p) with node count n; may contain isolated nodes.
inline div2vec::Graph random_graph(std::mt19937_64& rng, std::size_t n,
                                   double p) {
  std::bernoulli_distribution coin(p);
  std::vector<div2vec::Edge> edges;
  for (div2vec::NodeId u = 0; u < n; ++u) {
    for (div2vec::NodeId v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  return div2vec::build_graph(edges, n);
}

// Random bipartite graph: users 0..users-1, items after them.
inline div2vec::Graph random_bipartite(std::mt19937_64& rng, std::size_t users,
                                       std::size_t items, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<div2vec::Edge> edges;
  for (div2vec::NodeId u = 0; u < users; ++u) {
    for (std::size_t i = 0; i < items; ++i) {
      if (coin(rng)) edges.emplace_back(u, static_cast<div2vec::NodeId>(users + i));
    }
  }
  std::vector<div2vec::Side> part(users + items, div2vec::Side::kItem);
  std::fill(part.begin(), part.begin() + static_cast<std::ptrdiff_t>(users),
            div2vec::Side::kUser);
  return div2vec::build_graph(edges, users + items, part);
}

// Upper-tail p-value of Pearson's chi-square statistic for observed counts
// against expected probabilities. Cells with zero probability must be empty.
inline double chi_square_p(std::span<const std::size_t> observed,
                           std::span<const double> probs) {
  std::size_t n = 0;
  for (auto c : observed) n += c;
  double stat = 0.0;
  std::size_t cells = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (probs[i] == 0.0) {
      if (observed[i] != 0) return 0.0;
      continue;
    }
    double e = probs[i] * static_cast<double>(n);
    double d = static_cast<double>(observed[i]) - e;
    stat += d * d / e;
    ++cells;
  }
  if (cells < 2) return 1.0;
  boost::math::chi_squared dist(static_cast<double>(cells - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("div2vec_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testutil
