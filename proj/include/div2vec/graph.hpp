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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "div2vec/common.hpp"

namespace div2vec {

enum class Side : std::uint8_t { kUser = 0, kItem = 1 };

using Edge = std::pair<NodeId, NodeId>;

// Immutable undirected graph in compressed sparse row form. Every neighbor
// slice is strictly increasing, there are no self-loops, and adjacency is
// symmetric. When a partition is attached, every edge joins a user node to
// an item node.
class Graph {
 public:
  Graph() : offsets_{0} {}

  std::size_t node_count() const { return offsets_.size() - 1; }
  // Number of undirected edges.
  std::size_t edge_count() const { return neighbors_.size() / 2; }

  std::uint32_t degree(NodeId v) const {
    return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]);
  }
  std::span<const NodeId> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v],
            neighbors_.data() + offsets_[v + 1]};
  }
  // O(log deg(u)) membership test on the sorted neighbor slice.
  bool has_edge(NodeId u, NodeId v) const;

  std::span<const std::uint64_t> offsets() const { return offsets_; }
  std::span<const NodeId> neighbor_array() const { return neighbors_; }
  std::vector<std::uint32_t> degrees() const;

  bool has_partition() const { return !partition_.empty(); }
  std::span<const Side> partition() const { return partition_; }

  // Each undirected edge once, as (u, v) with u < v, in CSR order.
  std::vector<Edge> edges() const;

  bool operator==(const Graph&) const = default;

 private:
  friend Graph build_graph(std::span<const Edge>, std::size_t,
                           std::optional<std::vector<Side>>);

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> neighbors_;
  std::vector<Side> partition_;
};

// Builds a graph from an edge list over contiguous internal ids. Both
// orientations of a pair and repeated pairs collapse to one edge. The node
// count is max(node_count, largest id + 1), so isolated trailing nodes can be
// kept. Throws std::invalid_argument on self-loops or on an edge that joins
// two nodes with the same partition tag.
Graph build_graph(std::span<const Edge> edges, std::size_t node_count = 0,
                  std::optional<std::vector<Side>> partition = std::nullopt);

// Edge-list text: one "u<TAB>v" per line; lines starting with '#' are
// comments. Any run of blanks is accepted as the separator when reading.
void write_edge_list(const Graph& graph, std::ostream& out);
std::vector<Edge> read_edge_list(std::istream& in);

// ---------------------------------------------------------------------------
// Rating ingestion.

struct RatingRecord {
  std::string user;
  std::string item;
  double rating = 0.0;
};

// MovieLens-style "user,item,rating[,timestamp]" CSV; the header line is
// optional and the timestamp is ignored. Ratings must be half-star multiples
// in [0.5, 5.0].
std::vector<RatingRecord> read_ratings_csv(std::istream& in);
std::vector<RatingRecord> read_ratings_csv(const std::string& path);

enum class Label : std::uint8_t { kNegative = 0, kPositive = 1 };

struct LabeledRating {
  std::string user;
  std::string item;
  Label label = Label::kPositive;

  bool operator==(const LabeledRating&) const = default;
};

struct BinarizeOptions {
  double positive_threshold = 4.0;
  double negative_threshold = 3.0;
  // Strict reading: rating > positive_threshold is positive and
  // rating < negative_threshold is negative.
  bool strict = false;

  bool operator==(const BinarizeOptions&) const = default;
};

// Ratings between the thresholds are dropped. A (user, item) pair that
// occurs more than once keeps its first label unless the occurrences
// disagree, in which case the pair is dropped entirely. The output is sorted
// by (user, item), so it does not depend on input order.
std::vector<LabeledRating> binarize_ratings(
    std::span<const RatingRecord> records, const BinarizeOptions& options);

struct FilterOptions {
  std::size_t min_item_records = 10;
  std::size_t min_user_records = 10;
  std::size_t max_user_records = 1000;
  // Repeat item and user removal until nothing changes. With false, one
  // item pass followed by one user pass.
  bool fixed_point = true;

  bool operator==(const FilterOptions&) const = default;
};

// Drops items with fewer than min_item_records and users outside
// [min_user_records, max_user_records]. Works on any record type with
// `user` and `item` members; relative order of survivors is preserved.
template <typename Record>
std::vector<Record> filter_records(std::vector<Record> records,
                                   const FilterOptions& options) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::unordered_map<std::string, std::size_t> item_count;
    for (const auto& r : records) ++item_count[r.item];
    std::erase_if(records, [&](const Record& r) {
      bool drop = item_count[r.item] < options.min_item_records;
      changed |= drop;
      return drop;
    });
    std::unordered_map<std::string, std::size_t> user_count;
    for (const auto& r : records) ++user_count[r.user];
    std::erase_if(records, [&](const Record& r) {
      std::size_t n = user_count[r.user];
      bool drop =
          n < options.min_user_records || n > options.max_user_records;
      changed |= drop;
      return drop;
    });
    if (!options.fixed_point) break;
  }
  return records;
}

// ---------------------------------------------------------------------------
// Dense id space. Users and items share one id space: users first, then
// items, each block sorted by external key. External ids are written with a
// "u:" or "i:" prefix so the two key spaces cannot collide.

class IdMap {
 public:
  IdMap() = default;
  static IdMap from_ratings(std::span<const LabeledRating> ratings);

  std::size_t size() const { return external_.size(); }
  std::size_t user_count() const { return user_count_; }
  std::size_t item_count() const { return external_.size() - user_count_; }

  std::optional<NodeId> user(const std::string& key) const;
  std::optional<NodeId> item(const std::string& key) const;
  Side side(NodeId id) const {
    return id < user_count_ ? Side::kUser : Side::kItem;
  }
  // Raw external key without the side prefix.
  const std::string& key(NodeId id) const { return external_[id]; }
  std::vector<Side> partition() const;

  // "external_id<TAB>internal_id" per line, external ids prefixed.
  void write(std::ostream& out) const;
  static IdMap read(std::istream& in);

  bool operator==(const IdMap&) const = default;

 private:
  std::vector<std::string> external_;
  std::size_t user_count_ = 0;
  std::map<std::string, NodeId> users_;
  std::map<std::string, NodeId> items_;
};

// ---------------------------------------------------------------------------
// Labeled train/test edge set.

enum class Split : std::uint8_t { kTrain = 0, kTest = 1 };

struct LabeledEdge {
  NodeId u = 0;
  NodeId v = 0;
  Label label = Label::kPositive;
  Split split = Split::kTrain;

  bool operator==(const LabeledEdge&) const = default;
};

struct LabeledEdgeSet {
  std::vector<LabeledEdge> edges;

  std::size_t test_count() const;
  // Edges with the given split (and label, when given) as plain pairs.
  std::vector<Edge> select(Split split,
                           std::optional<Label> label = std::nullopt) const;

  void write_csv(std::ostream& out) const;
  static LabeledEdgeSet read_csv(std::istream& in);

  bool operator==(const LabeledEdgeSet&) const = default;
};

struct LabeledPair {
  NodeId u = 0;
  NodeId v = 0;
  Label label = Label::kPositive;
};

// Marks round(test_fraction * |pairs|) pairs as test, chosen by a seeded
// shuffle; pairs keep their input order. Throws std::invalid_argument for
// fewer than 2 pairs, a fraction outside (0, 1), or a repeated pair.
LabeledEdgeSet split_edges(std::span<const LabeledPair> pairs,
                           double test_fraction, std::uint64_t seed);

// Maps binarized ratings into the id space.
std::vector<LabeledPair> to_internal(std::span<const LabeledRating> ratings,
                                     const IdMap& ids);

// ---------------------------------------------------------------------------
// Item feature vectors (tag relevance).

class ItemFeatureMatrix {
 public:
  ItemFeatureMatrix() = default;

  std::size_t dimension() const { return tags_.size(); }
  std::size_t item_count() const { return rows_.size(); }
  std::span<const std::string> tags() const { return tags_; }

  // nullptr when the item has no feature vector.
  const std::vector<double>* find(const std::string& item) const;

  // Re-keys the matrix by internal node id. Items unknown to `ids` are
  // skipped.
  std::unordered_map<NodeId, std::vector<double>> by_node(
      const IdMap& ids) const;

  // "item,tag,relevance" triples; the header line is optional. Missing
  // (item, tag) cells are 0. Throws std::invalid_argument for relevance
  // outside [0, 1] or an all-zero item vector.
  static ItemFeatureMatrix read_csv(std::istream& in);
  static ItemFeatureMatrix read_csv(const std::string& path);

 private:
  std::vector<std::string> tags_;
  std::map<std::string, std::vector<double>> rows_;
};

}  // namespace div2vec
