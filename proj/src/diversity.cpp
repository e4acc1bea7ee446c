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

#include "div2vec/diversity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "text_util.hpp"

namespace div2vec {

RecommendationTable RecommendationTable::truncated(std::size_t new_k) const {
  if (new_k > k) {
    throw std::invalid_argument("cannot extend a top-" + std::to_string(k) +
                                " table to top-" + std::to_string(new_k));
  }
  RecommendationTable t;
  t.k = new_k;
  t.users = users;
  for (auto& u : t.users) {
    if (u.items.size() > new_k) u.items.resize(new_k);
  }
  return t;
}

void RecommendationTable::write_csv(std::ostream& out) const {
  out << "user,rank,item,score\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& u : users) {
    for (std::size_t r = 0; r < u.items.size(); ++r) {
      out << u.user << ',' << r + 1 << ',' << u.items[r].item << ','
          << u.items[r].score << '\n';
    }
  }
}

RecommendationTable RecommendationTable::read_csv(std::istream& in) {
  RecommendationTable t;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto s = detail::trim(line);
    if (s.empty() || s.starts_with("user,")) continue;
    auto f = detail::split(s, ',');
    if (f.size() != 4) {
      throw std::invalid_argument("recommendation line " +
                                  std::to_string(lineno) + " is malformed");
    }
    auto user = detail::parse_or_throw<NodeId>(f[0], "user", lineno);
    auto rank = detail::parse_or_throw<std::size_t>(f[1], "rank", lineno);
    if (t.users.empty() || t.users.back().user != user) {
      t.users.push_back({user, {}, false});
    }
    auto& items = t.users.back().items;
    if (rank != items.size() + 1) {
      throw std::invalid_argument("recommendation line " +
                                  std::to_string(lineno) + ": ranks out of order");
    }
    items.push_back({detail::parse_or_throw<NodeId>(f[2], "item", lineno),
                     detail::parse_or_throw<double>(f[3], "score", lineno)});
    t.k = std::max(t.k, items.size());
  }
  return t;
}

RecommendationTable recommend_topk(
    const ItemScorer& score, std::span<const NodeId> users,
    std::span<const NodeId> items,
    const std::unordered_map<NodeId, std::unordered_set<NodeId>>& exclude,
    std::size_t k) {
  if (k == 0) throw std::invalid_argument("k must be >= 1");
  RecommendationTable table;
  table.k = k;
  table.users.reserve(users.size());
  std::vector<ScoredItem> scored;
  static const std::unordered_set<NodeId> kNone;
  for (NodeId u : users) {
    auto it = exclude.find(u);
    const auto& skip = it == exclude.end() ? kNone : it->second;
    scored.clear();
    for (NodeId i : items) {
      if (!skip.contains(i)) scored.push_back({i, score(u, i)});
    }
    auto better = [](const ScoredItem& a, const ScoredItem& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.item < b.item;
    };
    std::size_t take = std::min(k, scored.size());
    std::partial_sort(scored.begin(),
                      scored.begin() + static_cast<std::ptrdiff_t>(take),
                      scored.end(), better);
    UserRecommendations rec{u, {scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take)},
                            scored.empty()};
    table.users.push_back(std::move(rec));
  }
  return table;
}

RecommendationTable recommend_topk(
    const MlpModel& model, EdgeOperator op, const EmbeddingMatrix& pos,
    const EmbeddingMatrix& neg, std::span<const NodeId> users,
    std::span<const NodeId> items,
    const std::unordered_map<NodeId, std::unordered_set<NodeId>>& exclude,
    std::size_t k) {
  std::vector<double> feature(2 * pos.dimension());
  return recommend_topk(
      [&](NodeId u, NodeId i) {
        edge_feature(op, u, i, pos, neg, feature);
        return mlp_forward(model, feature);
      },
      users, items, exclude, k);
}

std::size_t coverage(const RecommendationTable& table) {
  std::unordered_set<NodeId> seen;
  for (const auto& u : table.users) {
    for (const auto& s : u.items) seen.insert(s.item);
  }
  return seen.size();
}

double entropy_diversity(const RecommendationTable& table,
                         std::size_t user_count, std::size_t k) {
  if (k == 0 || user_count == 0) {
    throw std::invalid_argument("entropy diversity needs k >= 1 and users");
  }
  std::map<NodeId, std::size_t> rec;
  for (const auto& u : table.users) {
    if (u.items.size() != k) {
      throw std::invalid_argument(
          "entropy diversity needs every list to have exactly k items (user " +
          std::to_string(u.user) + " has " + std::to_string(u.items.size()) +
          ")");
    }
    for (const auto& s : u.items) ++rec[s.item];
  }
  const double total = static_cast<double>(k) * static_cast<double>(user_count);
  double h = 0.0;
  for (const auto& [item, count] : rec) {
    double p = static_cast<double>(count) / total;
    h -= p * std::log(p);
  }
  return h;
}

double dissimilarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("feature width mismatch");
  }
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) {
    throw std::invalid_argument("cosine undefined for a zero feature vector");
  }
  return 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
}

double intra_list_similarity(std::span<const NodeId> list,
                             const ItemFeatures& features) {
  if (list.size() < 2) {
    throw std::invalid_argument("intra-list similarity needs >= 2 items");
  }
  std::vector<const std::vector<double>*> v;
  v.reserve(list.size());
  for (NodeId i : list) {
    auto it = features.find(i);
    if (it == features.end()) {
      throw std::invalid_argument("item " + std::to_string(i) +
                                  " has no feature vector");
    }
    v.push_back(&it->second);
  }
  double sum = 0.0;
  for (std::size_t a = 0; a < v.size(); ++a) {
    for (std::size_t b = a + 1; b < v.size(); ++b) {
      sum += dissimilarity(*v[a], *v[b]);
    }
  }
  const double pairs =
      static_cast<double>(list.size()) * static_cast<double>(list.size() - 1) / 2.0;
  return sum / pairs;
}

AverageIls average_ils(const RecommendationTable& table,
                       const ItemFeatures& features) {
  AverageIls out;
  double sum = 0.0;
  std::vector<NodeId> list;
  for (const auto& u : table.users) {
    list.clear();
    for (const auto& s : u.items) {
      if (features.contains(s.item)) list.push_back(s.item);
    }
    if (list.size() < 2) {
      ++out.users_excluded;
      continue;
    }
    sum += intra_list_similarity(list, features);
    ++out.users_used;
  }
  if (out.users_used == 0) {
    throw std::invalid_argument("no user has a list of 2+ items with features");
  }
  out.value = sum / static_cast<double>(out.users_used);
  return out;
}

void write_metric_report(std::span<const MetricReport> reports,
                         std::ostream& out) {
  if (reports.empty()) return;
  out << "method,operator,auc";
  for (const auto& m : reports.front().at_k) {
    out << ",co_" << m.k << ",ed_" << m.k;
    if (m.k >= 2) out << ",ils_" << m.k;
  }
  out << '\n';
  char buf[64];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof(buf), "%.6f", r.auc);
    out << r.method << ',' << r.op << ',' << buf;
    for (const auto& m : r.at_k) {
      std::snprintf(buf, sizeof(buf), "%.6f", m.entropy_diversity);
      out << ',' << m.coverage << ',' << buf;
      if (m.k >= 2) {
        if (m.avg_ils) {
          std::snprintf(buf, sizeof(buf), "%.6f", *m.avg_ils);
          out << ',' << buf;
        } else {
          out << ",nan";
        }
      }
    }
    out << '\n';
  }
}

}  // namespace div2vec
