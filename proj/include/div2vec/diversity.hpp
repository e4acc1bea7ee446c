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

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "div2vec/edgeops.hpp"
#include "div2vec/embed.hpp"
#include "div2vec/predictor.hpp"

namespace div2vec {

struct ScoredItem {
  NodeId item = 0;
  double score = 0.0;

  bool operator==(const ScoredItem&) const = default;
};

struct UserRecommendations {
  NodeId user = 0;
  std::vector<ScoredItem> items;  // score descending, ties by item id
  // The user had no candidate items at all.
  bool no_candidates = false;
};

struct RecommendationTable {
  std::size_t k = 0;
  std::vector<UserRecommendations> users;

  // Every list cut to its first k entries (k <= this->k).
  RecommendationTable truncated(std::size_t k) const;

  // "user,rank,item,score" with 1-based ranks.
  void write_csv(std::ostream& out) const;
  static RecommendationTable read_csv(std::istream& in);
};

using ItemScorer = std::function<double(NodeId user, NodeId item)>;

// For each user: score every item not in that user's exclusion set, sort by
// score descending (ties by ascending item id) and keep the first k.
// Throws std::invalid_argument for k == 0.
RecommendationTable recommend_topk(
    const ItemScorer& score, std::span<const NodeId> users,
    std::span<const NodeId> items,
    const std::unordered_map<NodeId, std::unordered_set<NodeId>>& exclude,
    std::size_t k);

// recommend_topk with the classifier over [pos | neg] edge features.
RecommendationTable recommend_topk(
    const MlpModel& model, EdgeOperator op, const EmbeddingMatrix& pos,
    const EmbeddingMatrix& neg, std::span<const NodeId> users,
    std::span<const NodeId> items,
    const std::unordered_map<NodeId, std::unordered_set<NodeId>>& exclude,
    std::size_t k);

// Number of distinct items across all lists.
std::size_t coverage(const RecommendationTable& table);

// -sum_i (rec(i) / (k |U|)) ln(rec(i) / (k |U|)) over items recommended at
// least once. Throws std::invalid_argument if any list length differs from k.
double entropy_diversity(const RecommendationTable& table,
                         std::size_t user_count, std::size_t k);

using ItemFeatures = std::unordered_map<NodeId, std::vector<double>>;

// 1 - cos(a, b). Throws std::invalid_argument on a zero vector or width
// mismatch.
double dissimilarity(std::span<const double> a, std::span<const double> b);

// Mean of dissimilarity() over the unordered pairs of the list. Throws
// std::invalid_argument if an item has no features or the list has fewer
// than 2 items.
double intra_list_similarity(std::span<const NodeId> list,
                             const ItemFeatures& features);

struct AverageIls {
  double value = 0.0;
  std::size_t users_used = 0;
  // Users whose lists had fewer than 2 items with features.
  std::size_t users_excluded = 0;
};

// Unweighted mean of per-user ILS. Items without features are skipped
// within a list. Throws std::invalid_argument if no user is usable.
AverageIls average_ils(const RecommendationTable& table,
                       const ItemFeatures& features);

struct MetricReport {
  std::string method;
  std::string op;
  double auc = 0.0;
  struct AtK {
    std::size_t k = 0;
    std::size_t coverage = 0;
    double entropy_diversity = 0.0;
    std::optional<double> avg_ils;  // undefined for k < 2
    std::size_t ils_users_excluded = 0;
  };
  std::vector<AtK> at_k;
};

// Header "method,operator,auc,co_<k>,ed_<k>[,ils_<k>]..." where ils columns
// appear for k >= 2 only; with k = {1, 10, 50} this is the
// co_1,ed_1,co_10,ed_10,ils_10,co_50,ed_50,ils_50 scheme. Values are printed
// with fixed precision so equal reports are byte-identical.
void write_metric_report(std::span<const MetricReport> reports,
                         std::ostream& out);

}  // namespace div2vec
