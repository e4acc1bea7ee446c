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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "div2vec/edgeops.hpp"

using namespace div2vec;

namespace {

// Matrix over `n` nodes with every node present and random entries.
EmbeddingMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                              std::vector<NodeId> absent = {}) {
  EmbeddingMatrix m(n, dim);
  std::normal_distribution<float> nd;
  for (NodeId v = 0; v < n; ++v) {
    if (std::find(absent.begin(), absent.end(), v) != absent.end()) continue;
    m.set_present(v);
    for (float& x : m.vector(v)) x = nd(rng);
  }
  return m;
}

}  // namespace

TEST_CASE("operators on the worked example") {
  std::vector<float> a{1, 3}, b{3, 1};
  CHECK(apply_operator(EdgeOperator::kAverage, a, b) == std::vector<double>{2, 2});
  CHECK(apply_operator(EdgeOperator::kHadamard, a, b) == std::vector<double>{3, 3});
  CHECK(apply_operator(EdgeOperator::kWeightedL1, a, b) == std::vector<double>{2, 2});
  CHECK(apply_operator(EdgeOperator::kWeightedL2, a, b) == std::vector<double>{4, 4});
}

TEST_CASE("operators: identical inputs, symmetry, L2 = L1 squared") {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> nd;
  for (int t = 0; t < 100; ++t) {
    std::vector<float> a(7), b(7);
    for (auto& x : a) x = nd(rng);
    for (auto& x : b) x = nd(rng);
    for (auto op : kAllOperators) {
      auto ab = apply_operator(op, a, b);
      CHECK(ab == apply_operator(op, b, a));
      for (double x : ab) CHECK(std::isfinite(x));
    }
    auto l1 = apply_operator(EdgeOperator::kWeightedL1, a, b);
    auto l2 = apply_operator(EdgeOperator::kWeightedL2, a, b);
    for (std::size_t i = 0; i < l1.size(); ++i) CHECK(l2[i] == doctest::Approx(l1[i] * l1[i]));
    for (auto op : {EdgeOperator::kWeightedL1, EdgeOperator::kWeightedL2}) {
      for (double x : apply_operator(op, a, a)) CHECK(x == 0.0);
    }
  }
}

TEST_CASE("operators: dimension mismatch and names") {
  std::vector<float> a{1, 2}, b{1};
  CHECK_THROWS_AS(apply_operator(EdgeOperator::kAverage, a, b), std::invalid_argument);
  for (auto op : kAllOperators) CHECK(parse_edge_operator(to_string(op)) == op);
  CHECK(to_string(EdgeOperator::kWeightedL2) == "weighted_l2");
  CHECK_THROWS(parse_edge_operator("cosine"));
}

TEST_CASE("edge feature: layout and zero fill") {
  std::mt19937_64 rng(5);
  auto pos = random_matrix(rng, 4, 64);
  auto neg = random_matrix(rng, 4, 64, {1});
  auto f = edge_feature(EdgeOperator::kHadamard, 0, 1, pos, neg);
  REQUIRE(f.values.size() == 128);
  auto pos_half = apply_operator(EdgeOperator::kHadamard, pos.vector(0), pos.vector(1));
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(f.values[i] == pos_half[i]);
    CHECK(f.values[64 + i] == 0.0);
  }
  auto avg = edge_feature(EdgeOperator::kAverage, 2, 3, pos, neg);
  auto pa = apply_operator(EdgeOperator::kAverage, pos.vector(2), pos.vector(3));
  auto na = apply_operator(EdgeOperator::kAverage, neg.vector(2), neg.vector(3));
  for (std::size_t i = 0; i < 64; ++i) {
    CHECK(avg.values[i] == pa[i]);
    CHECK(avg.values[64 + i] == na[i]);
  }
  // Average against an absent node halves the present vector.
  auto half = edge_feature(EdgeOperator::kAverage, 0, 1, pos, neg);
  for (std::size_t i = 0; i < 64; ++i) CHECK(half.values[64 + i] == double(neg.vector(0)[i]) / 2);
}

TEST_CASE("edge feature: symmetric in u and v") {
  std::mt19937_64 rng(8);
  auto pos = random_matrix(rng, 10, 8, {7});
  auto neg = random_matrix(rng, 10, 8, {2, 3});
  for (auto op : kAllOperators) {
    for (NodeId u = 0; u < 10; ++u) {
      for (NodeId v = 0; v < 10; ++v) {
        CHECK(edge_feature(op, u, v, pos, neg).values ==
              edge_feature(op, v, u, pos, neg).values);
      }
    }
  }
}

TEST_CASE("edge feature: mismatched matrices rejected") {
  std::mt19937_64 rng(1);
  auto pos = random_matrix(rng, 3, 8);
  auto neg = random_matrix(rng, 3, 4);
  CHECK_THROWS_AS(edge_feature(EdgeOperator::kAverage, 0, 1, pos, neg), std::invalid_argument);
}

TEST_CASE("edge feature dump") {
  std::mt19937_64 rng(2);
  auto pos = random_matrix(rng, 3, 2);
  auto neg = random_matrix(rng, 3, 2);
  LabeledEdgeSet set;
  set.edges = {{0, 1, Label::kPositive, Split::kTrain}, {0, 2, Label::kNegative, Split::kTest}};
  std::ostringstream out;
  write_edge_features(EdgeOperator::kHadamard, set, pos, neg, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "u,v,label,f1,f2,f3,f4");
  std::getline(in, line);
  CHECK(line.rfind("0,1,pos,", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("0,2,neg,", 0) == 0);
}
