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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "div2vec/embed.hpp"
#include "div2vec/graph.hpp"

namespace div2vec {

// Symmetric combiners from two node vectors to one edge vector.
enum class EdgeOperator : std::uint8_t {
  kAverage,     // (a + b) / 2
  kHadamard,    // a * b
  kWeightedL1,  // |a - b|
  kWeightedL2,  // (a - b)^2
};

inline constexpr EdgeOperator kAllOperators[] = {
    EdgeOperator::kWeightedL1, EdgeOperator::kWeightedL2,
    EdgeOperator::kHadamard, EdgeOperator::kAverage};

std::string to_string(EdgeOperator op);
// Accepts "average", "hadamard", "weighted_l1", "weighted_l2".
EdgeOperator parse_edge_operator(const std::string& name);

// Writes op(a, b) into `out`. Throws std::invalid_argument if the three
// spans differ in length.
void apply_operator(EdgeOperator op, std::span<const float> a,
                    std::span<const float> b, std::span<double> out);
std::vector<double> apply_operator(EdgeOperator op, std::span<const float> a,
                                   std::span<const float> b);

// [op(pos(u), pos(v)) | op(neg(u), neg(v))], 2 * dim entries. Nodes missing
// from either matrix contribute zero vectors.
struct EdgeFeature {
  std::vector<double> values;
};

void edge_feature(EdgeOperator op, NodeId u, NodeId v,
                  const EmbeddingMatrix& pos, const EmbeddingMatrix& neg,
                  std::span<double> out);
EdgeFeature edge_feature(EdgeOperator op, NodeId u, NodeId v,
                         const EmbeddingMatrix& pos,
                         const EmbeddingMatrix& neg);

// "u,v,label,f1..fN" rows, one per labeled edge.
void write_edge_features(EdgeOperator op, const LabeledEdgeSet& edges,
                         const EmbeddingMatrix& pos,
                         const EmbeddingMatrix& neg, std::ostream& out);

}  // namespace div2vec
