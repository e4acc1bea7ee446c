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

#include "div2vec/edgeops.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace div2vec {

std::string to_string(EdgeOperator op) {
  switch (op) {
    case EdgeOperator::kAverage:
      return "average";
    case EdgeOperator::kHadamard:
      return "hadamard";
    case EdgeOperator::kWeightedL1:
      return "weighted_l1";
    case EdgeOperator::kWeightedL2:
      return "weighted_l2";
  }
  return "average";
}

EdgeOperator parse_edge_operator(const std::string& name) {
  for (auto op : kAllOperators) {
    if (to_string(op) == name) return op;
  }
  throw std::invalid_argument("unknown edge operator '" + name + "'");
}

void apply_operator(EdgeOperator op, std::span<const float> a,
                    std::span<const float> b, std::span<double> out) {
  if (a.size() != b.size() || out.size() != a.size()) {
    throw std::invalid_argument("edge operator: dimension mismatch (" +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  const std::size_t n = a.size();
  switch (op) {
    case EdgeOperator::kAverage:
      for (std::size_t i = 0; i < n; ++i) out[i] = (double(a[i]) + b[i]) / 2.0;
      break;
    case EdgeOperator::kHadamard:
      for (std::size_t i = 0; i < n; ++i) out[i] = double(a[i]) * b[i];
      break;
    case EdgeOperator::kWeightedL1:
      for (std::size_t i = 0; i < n; ++i) out[i] = std::abs(double(a[i]) - b[i]);
      break;
    case EdgeOperator::kWeightedL2:
      for (std::size_t i = 0; i < n; ++i) {
        double d = double(a[i]) - b[i];
        out[i] = d * d;
      }
      break;
  }
}

std::vector<double> apply_operator(EdgeOperator op, std::span<const float> a,
                                   std::span<const float> b) {
  std::vector<double> out(a.size());
  apply_operator(op, a, b, out);
  return out;
}

void edge_feature(EdgeOperator op, NodeId u, NodeId v,
                  const EmbeddingMatrix& pos, const EmbeddingMatrix& neg,
                  std::span<double> out) {
  const std::size_t dim = pos.dimension();
  if (neg.dimension() != dim) {
    throw std::invalid_argument("positive and negative embeddings differ in "
                                "dimension");
  }
  if (out.size() != 2 * dim) {
    throw std::invalid_argument("edge feature buffer has the wrong size");
  }
  apply_operator(op, lookup(pos, u).vector, lookup(pos, v).vector,
                 out.first(dim));
  apply_operator(op, lookup(neg, u).vector, lookup(neg, v).vector,
                 out.last(dim));
}

EdgeFeature edge_feature(EdgeOperator op, NodeId u, NodeId v,
                         const EmbeddingMatrix& pos,
                         const EmbeddingMatrix& neg) {
  EdgeFeature f{std::vector<double>(2 * pos.dimension())};
  edge_feature(op, u, v, pos, neg, f.values);
  return f;
}

void write_edge_features(EdgeOperator op, const LabeledEdgeSet& edges,
                         const EmbeddingMatrix& pos,
                         const EmbeddingMatrix& neg, std::ostream& out) {
  const std::size_t width = 2 * pos.dimension();
  out << "u,v,label";
  for (std::size_t i = 1; i <= width; ++i) out << ",f" << i;
  out << '\n';
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  std::vector<double> f(width);
  for (const auto& e : edges.edges) {
    edge_feature(op, e.u, e.v, pos, neg, f);
    out << e.u << ',' << e.v << ','
        << (e.label == Label::kPositive ? "pos" : "neg");
    for (double x : f) out << ',' << x;
    out << '\n';
  }
}

}  // namespace div2vec
