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

#include "div2vec/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

#include "text_util.hpp"

namespace div2vec {

bool Graph::has_edge(NodeId u, NodeId v) const {
  if (u >= node_count()) return false;
  auto n = neighbors(u);
  return std::binary_search(n.begin(), n.end(), v);
}

std::vector<std::uint32_t> Graph::degrees() const {
  std::vector<std::uint32_t> out(node_count());
  for (NodeId v = 0; v < out.size(); ++v) out[v] = degree(v);
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (NodeId u = 0; u < node_count(); ++u) {
    for (NodeId v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph build_graph(std::span<const Edge> edges, std::size_t node_count,
                  std::optional<std::vector<Side>> partition) {
  std::size_t n = node_count;
  for (const auto& [u, v] : edges) {
    if (u == v) {
      throw std::invalid_argument("self-loop on node " + std::to_string(u));
    }
    n = std::max<std::size_t>(n, std::max(u, v) + std::size_t{1});
  }
  if (partition) {
    if (partition->size() < n) {
      throw std::invalid_argument("partition covers " +
                                  std::to_string(partition->size()) +
                                  " nodes, graph needs " + std::to_string(n));
    }
    n = partition->size();
    for (const auto& [u, v] : edges) {
      if ((*partition)[u] == (*partition)[v]) {
        throw std::invalid_argument(
            "edge (" + std::to_string(u) + ", " + std::to_string(v) +
            ") joins two nodes on the same side of the partition");
      }
    }
  }

  std::vector<std::uint64_t> counts(n + 1, 0);
  for (const auto& [u, v] : edges) {
    ++counts[u + 1];
    ++counts[v + 1];
  }
  std::partial_sum(counts.begin(), counts.end(), counts.begin());
  std::vector<NodeId> raw(counts.back());
  std::vector<std::uint64_t> cursor(counts.begin(), counts.end() - 1);
  for (const auto& [u, v] : edges) {
    raw[cursor[u]++] = v;
    raw[cursor[v]++] = u;
  }

  // Sort and deduplicate each slice, then compact.
  Graph g;
  g.offsets_.assign(n + 1, 0);
  g.neighbors_.reserve(raw.size());
  for (std::size_t v = 0; v < n; ++v) {
    auto first = raw.begin() + static_cast<std::ptrdiff_t>(counts[v]);
    auto last = raw.begin() + static_cast<std::ptrdiff_t>(counts[v + 1]);
    std::sort(first, last);
    last = std::unique(first, last);
    g.neighbors_.insert(g.neighbors_.end(), first, last);
    g.offsets_[v + 1] = g.neighbors_.size();
  }
  g.neighbors_.shrink_to_fit();
  if (partition) g.partition_ = std::move(*partition);
  return g;
}

void write_edge_list(const Graph& graph, std::ostream& out) {
  out << "# nodes " << graph.node_count() << " edges " << graph.edge_count()
      << '\n';
  for (const auto& [u, v] : graph.edges()) out << u << '\t' << v << '\n';
}

std::vector<Edge> read_edge_list(std::istream& in) {
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = detail::split_blanks(t);
    if (fields.size() != 2) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected 'u<TAB>v'");
    }
    edges.emplace_back(detail::parse_or_throw<NodeId>(fields[0], "node", lineno),
                       detail::parse_or_throw<NodeId>(fields[1], "node", lineno));
  }
  return edges;
}

// ---------------------------------------------------------------------------

std::vector<RatingRecord> read_ratings_csv(std::istream& in) {
  std::vector<RatingRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = detail::split(t, ',');
    if (fields.size() < 3) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": expected user,item,rating[,timestamp]");
    }
    auto rating = detail::parse_number<double>(fields[2]);
    if (!rating) {
      if (out.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": bad rating '" + std::string(fields[2]) +
                                  "'");
    }
    double twice = *rating * 2.0;
    if (*rating < 0.5 || *rating > 5.0 || twice != std::round(twice)) {
      throw std::invalid_argument("line " + std::to_string(lineno) +
                                  ": rating " + std::string(fields[2]) +
                                  " is not a half-star value in [0.5, 5]");
    }
    out.push_back({std::string(fields[0]), std::string(fields[1]), *rating});
  }
  return out;
}

std::vector<RatingRecord> read_ratings_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_ratings_csv(in);
}

std::vector<LabeledRating> binarize_ratings(
    std::span<const RatingRecord> records, const BinarizeOptions& options) {
  if (!(options.positive_threshold > options.negative_threshold)) {
    throw std::invalid_argument(
        "positive threshold must exceed negative threshold");
  }
  std::map<std::pair<std::string, std::string>, std::optional<Label>> pairs;
  for (const auto& r : records) {
    std::optional<Label> label;
    if (options.strict ? r.rating > options.positive_threshold
                       : r.rating >= options.positive_threshold) {
      label = Label::kPositive;
    } else if (options.strict ? r.rating < options.negative_threshold
                              : r.rating <= options.negative_threshold) {
      label = Label::kNegative;
    } else {
      continue;
    }
    auto [it, inserted] = pairs.try_emplace({r.user, r.item}, label);
    if (!inserted && it->second != label) it->second.reset();
  }
  std::vector<LabeledRating> out;
  out.reserve(pairs.size());
  for (auto& [key, label] : pairs) {
    if (label) out.push_back({key.first, key.second, *label});
  }
  return out;
}

// ---------------------------------------------------------------------------

IdMap IdMap::from_ratings(std::span<const LabeledRating> ratings) {
  std::set<std::string> users, items;
  for (const auto& r : ratings) {
    users.insert(r.user);
    items.insert(r.item);
  }
  IdMap m;
  for (const auto& u : users) {
    m.users_.emplace(u, static_cast<NodeId>(m.external_.size()));
    m.external_.push_back(u);
  }
  m.user_count_ = m.external_.size();
  for (const auto& i : items) {
    m.items_.emplace(i, static_cast<NodeId>(m.external_.size()));
    m.external_.push_back(i);
  }
  return m;
}

std::optional<NodeId> IdMap::user(const std::string& key) const {
  auto it = users_.find(key);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> IdMap::item(const std::string& key) const {
  auto it = items_.find(key);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

std::vector<Side> IdMap::partition() const {
  std::vector<Side> p(external_.size(), Side::kItem);
  std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(user_count_),
            Side::kUser);
  return p;
}

void IdMap::write(std::ostream& out) const {
  for (NodeId id = 0; id < external_.size(); ++id) {
    out << (id < user_count_ ? "u:" : "i:") << external_[id] << '\t' << id
        << '\n';
  }
}

IdMap IdMap::read(std::istream& in) {
  IdMap m;
  std::string line;
  std::size_t lineno = 0;
  bool in_items = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = detail::split(t, '\t');
    if (fields.size() != 2 || fields[0].size() < 2 || fields[0][1] != ':') {
      throw std::invalid_argument("id map line " + std::to_string(lineno) +
                                  ": expected 'u:key<TAB>id' or 'i:key<TAB>id'");
    }
    auto id = detail::parse_or_throw<NodeId>(fields[1], "id", lineno);
    if (id != m.external_.size()) {
      throw std::invalid_argument("id map line " + std::to_string(lineno) +
                                  ": ids must be dense and in order");
    }
    std::string key(fields[0].substr(2));
    char side = fields[0][0];
    if (side == 'u' && !in_items) {
      m.users_.emplace(key, id);
      ++m.user_count_;
    } else if (side == 'i') {
      in_items = true;
      m.items_.emplace(key, id);
    } else {
      throw std::invalid_argument("id map line " + std::to_string(lineno) +
                                  ": users must precede items");
    }
    m.external_.push_back(std::move(key));
  }
  return m;
}

// ---------------------------------------------------------------------------

std::size_t LabeledEdgeSet::test_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges.begin(), edges.end(),
                    [](const LabeledEdge& e) { return e.split == Split::kTest; }));
}

std::vector<Edge> LabeledEdgeSet::select(Split split,
                                         std::optional<Label> label) const {
  std::vector<Edge> out;
  for (const auto& e : edges) {
    if (e.split == split && (!label || e.label == *label)) {
      out.emplace_back(e.u, e.v);
    }
  }
  return out;
}

void LabeledEdgeSet::write_csv(std::ostream& out) const {
  out << "u,v,label,split\n";
  for (const auto& e : edges) {
    out << e.u << ',' << e.v << ','
        << (e.label == Label::kPositive ? "pos" : "neg") << ','
        << (e.split == Split::kTest ? "test" : "train") << '\n';
  }
}

LabeledEdgeSet LabeledEdgeSet::read_csv(std::istream& in) {
  LabeledEdgeSet set;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#' || (lineno == 1 && t.starts_with("u,"))) {
      continue;
    }
    auto f = detail::split(t, ',');
    if (f.size() != 4 || (f[2] != "pos" && f[2] != "neg") ||
        (f[3] != "train" && f[3] != "test")) {
      throw std::invalid_argument("labeled edge line " +
                                  std::to_string(lineno) + " is malformed");
    }
    set.edges.push_back(
        {detail::parse_or_throw<NodeId>(f[0], "node", lineno),
         detail::parse_or_throw<NodeId>(f[1], "node", lineno),
         f[2] == "pos" ? Label::kPositive : Label::kNegative,
         f[3] == "test" ? Split::kTest : Split::kTrain});
  }
  return set;
}

LabeledEdgeSet split_edges(std::span<const LabeledPair> pairs,
                           double test_fraction, std::uint64_t seed) {
  if (pairs.size() < 2) {
    throw std::invalid_argument("split needs at least 2 pairs");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("test fraction must lie in (0, 1)");
  }
  std::set<Edge> seen;
  for (const auto& p : pairs) {
    Edge key = std::minmax(p.u, p.v);
    if (!seen.insert(key).second) {
      throw std::invalid_argument("pair (" + std::to_string(p.u) + ", " +
                                  std::to_string(p.v) + ") appears twice");
    }
  }

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto n_test = static_cast<std::size_t>(
      std::llround(test_fraction * static_cast<double>(pairs.size())));

  LabeledEdgeSet set;
  set.edges.reserve(pairs.size());
  for (const auto& p : pairs) set.edges.push_back({p.u, p.v, p.label, Split::kTrain});
  for (std::size_t i = 0; i < n_test; ++i) set.edges[order[i]].split = Split::kTest;
  return set;
}

std::vector<LabeledPair> to_internal(std::span<const LabeledRating> ratings,
                                     const IdMap& ids) {
  std::vector<LabeledPair> out;
  out.reserve(ratings.size());
  for (const auto& r : ratings) {
    auto u = ids.user(r.user);
    auto v = ids.item(r.item);
    if (!u || !v) {
      throw std::invalid_argument("rating (" + r.user + ", " + r.item +
                                  ") is not in the id map");
    }
    out.push_back({*u, *v, r.label});
  }
  return out;
}

// ---------------------------------------------------------------------------

const std::vector<double>* ItemFeatureMatrix::find(
    const std::string& item) const {
  auto it = rows_.find(item);
  return it == rows_.end() ? nullptr : &it->second;
}

std::unordered_map<NodeId, std::vector<double>> ItemFeatureMatrix::by_node(
    const IdMap& ids) const {
  std::unordered_map<NodeId, std::vector<double>> out;
  for (const auto& [item, vec] : rows_) {
    if (auto id = ids.item(item)) out.emplace(*id, vec);
  }
  return out;
}

ItemFeatureMatrix ItemFeatureMatrix::read_csv(std::istream& in) {
  struct Cell {
    std::string item, tag;
    double relevance;
  };
  std::vector<Cell> cells;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto f = detail::split(t, ',');
    if (f.size() != 3) {
      throw std::invalid_argument("feature line " + std::to_string(lineno) +
                                  ": expected item,tag,relevance");
    }
    auto rel = detail::parse_number<double>(f[2]);
    if (!rel) {
      if (cells.empty() && lineno == 1) continue;  // header
      throw std::invalid_argument("feature line " + std::to_string(lineno) +
                                  ": bad relevance");
    }
    if (!(*rel >= 0.0 && *rel <= 1.0)) {
      throw std::invalid_argument("feature line " + std::to_string(lineno) +
                                  ": relevance outside [0, 1]");
    }
    cells.push_back({std::string(f[0]), std::string(f[1]), *rel});
  }

  std::vector<std::string> tags;
  {
    std::set<std::string> unique;
    for (const auto& c : cells) unique.insert(c.tag);
    tags.assign(unique.begin(), unique.end());
  }
  bool numeric = std::all_of(tags.begin(), tags.end(), [](const auto& s) {
    return detail::parse_number<long long>(s).has_value();
  });
  if (numeric) {
    std::sort(tags.begin(), tags.end(), [](const auto& a, const auto& b) {
      return *detail::parse_number<long long>(a) <
             *detail::parse_number<long long>(b);
    });
  }
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < tags.size(); ++i) column.emplace(tags[i], i);

  ItemFeatureMatrix m;
  m.tags_ = std::move(tags);
  for (const auto& c : cells) {
    auto& row = m.rows_[c.item];
    if (row.empty()) row.assign(m.tags_.size(), 0.0);
    row[column.at(c.tag)] = c.relevance;
  }
  for (const auto& [item, row] : m.rows_) {
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) {
      throw std::invalid_argument("item " + item +
                                  " has an all-zero feature vector");
    }
  }
  return m;
}

ItemFeatureMatrix ItemFeatureMatrix::read_csv(const std::string& path) {
  auto in = detail::open_input(path);
  return read_csv(in);
}

}  // namespace div2vec
