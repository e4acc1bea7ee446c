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
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "div2vec/graph.hpp"

namespace div2vec {

// Weight applied to a neighbor's degree by the degree-biased walk.
enum class DegreeFunction : std::uint8_t {
  kInverse,      // 1 / x
  kInverseSqrt,  // 1 / sqrt(x)
  kConstant,     // 1
};

double apply_degree_function(DegreeFunction f, std::uint32_t degree);
std::string to_string(DegreeFunction f);
DegreeFunction parse_degree_function(const std::string& name);

struct WalkStrategy {
  enum class Kind : std::uint8_t { kUniform, kSecondOrder, kDegreeBiased };

  Kind kind = Kind::kUniform;
  // Return and in-out parameters of the second-order walk.
  double p = 1.0;
  double q = 1.0;
  DegreeFunction f = DegreeFunction::kConstant;

  static WalkStrategy uniform() { return {}; }
  static WalkStrategy second_order(double p, double q);
  static WalkStrategy degree_biased(DegreeFunction f);

  // Throws std::invalid_argument unless p > 0 and q > 0.
  void validate() const;
  // Stable textual form, e.g. "uniform", "second_order(p=1,q=2)",
  // "degree_biased(f=inverse)". parse() accepts the same text.
  std::string describe() const;
  static WalkStrategy parse(const std::string& text);

  bool operator==(const WalkStrategy&) const = default;
};

// Raised when the walk reaches a node with no neighbors.
class DeadEnd : public std::runtime_error {
 public:
  explicit DeadEnd(NodeId node)
      : std::runtime_error("node " + std::to_string(node) +
                           " has no neighbors"),
        node_(node) {}
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

// Probability of moving from `current` to each entry of
// graph.neighbors(current), in slice order. `previous` is only consulted by
// the second-order strategy; without it that strategy falls back to a
// uniform first step.
std::vector<double> transition_distribution(const Graph& graph,
                                            const WalkStrategy& strategy,
                                            NodeId current,
                                            std::optional<NodeId> previous);

// How often each branch of the second-order weight was evaluated while
// sampling (rejected proposals included).
struct SecondOrderCounts {
  std::uint64_t returned = 0;  // x == previous
  std::uint64_t adjacent = 0;  // x adjacent to previous
  std::uint64_t outward = 0;   // otherwise

  SecondOrderCounts& operator+=(const SecondOrderCounts& o) {
    returned += o.returned;
    adjacent += o.adjacent;
    outward += o.outward;
    return *this;
  }
};

struct CorpusOptions {
  std::size_t walk_length = 80;
  std::size_t walks_per_node = 10;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void validate() const;
};

struct WalkCorpus {
  std::vector<std::vector<NodeId>> walks;
  std::size_t walk_length = 0;
  std::size_t walks_per_node = 0;
  WalkStrategy strategy;
  std::uint64_t seed = 0;

  // Generation statistics; not serialized.
  SecondOrderCounts branch_counts;
  std::size_t truncated_walks = 0;

  std::size_t token_count() const;
};

// Generates walks_per_node walks from every node with at least one neighbor,
// ordered by start node then walk index. Each walk draws from its own RNG
// stream derived from (seed, start node, walk index), so the result does not
// depend on the thread count. Throws std::invalid_argument for an edgeless
// graph or invalid options.
WalkCorpus generate_corpus(const Graph& graph, const WalkStrategy& strategy,
                           const CorpusOptions& options);

// One walk per line, space separated; a leading comment block records the
// strategy, seed and sizes.
void write_corpus(const WalkCorpus& corpus, std::ostream& out);
WalkCorpus read_corpus(std::istream& in);

// Degree versus corpus frequency, rows sorted by degree ascending (then by
// node id).
struct FrequencyProfile {
  struct Row {
    NodeId node = 0;
    std::uint32_t degree = 0;
    std::uint64_t occurrences = 0;
  };
  std::vector<Row> rows;
  // Spearman rank correlation between degree and occurrences over nodes of
  // degree >= 1.
  double spearman = 0.0;

  std::uint64_t total_occurrences() const;
  void write_csv(std::ostream& out) const;
};

FrequencyProfile frequency_profile(const WalkCorpus& corpus,
                                   const Graph& graph);

// Spearman correlation with mid-ranks for ties. Returns 0 when either side
// is constant. Throws std::invalid_argument on length mismatch.
double spearman_correlation(std::span<const double> x,
                            std::span<const double> y);

}  // namespace div2vec
