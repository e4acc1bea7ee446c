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

#include "div2vec/walker.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "div2vec/alias.hpp"
#include "text_util.hpp"

namespace div2vec {
namespace {

std::string format_real(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

// Per-edge alias tables laid out parallel to the graph's neighbor array.
class DegreeBiasedSampler {
 public:
  DegreeBiasedSampler(const Graph& graph, DegreeFunction f)
      : graph_(graph),
        prob_(graph.neighbor_array().size()),
        alias_(graph.neighbor_array().size()) {
    std::vector<double> weights;
    for (NodeId v = 0; v < graph.node_count(); ++v) {
      auto n = graph.neighbors(v);
      if (n.empty()) continue;
      weights.resize(n.size());
      for (std::size_t i = 0; i < n.size(); ++i) {
        weights[i] = apply_degree_function(f, graph.degree(n[i]));
      }
      auto off = graph.offsets()[v];
      build_alias(weights, std::span(prob_).subspan(off, n.size()),
                  std::span(alias_).subspan(off, n.size()));
    }
  }

  template <typename Rng>
  NodeId next(NodeId current, Rng& rng) const {
    auto off = graph_.offsets()[current];
    auto deg = graph_.degree(current);
    auto i = sample_alias(std::span<const double>(prob_).subspan(off, deg),
                          std::span<const std::uint32_t>(alias_).subspan(off, deg),
                          rng);
    return graph_.neighbors(current)[i];
  }

 private:
  const Graph& graph_;
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

template <typename Rng>
NodeId uniform_neighbor(const Graph& graph, NodeId current, Rng& rng) {
  auto n = graph.neighbors(current);
  std::uniform_int_distribution<std::size_t> pick(0, n.size() - 1);
  return n[pick(rng)];
}

double second_order_weight(const Graph& graph, const WalkStrategy& s,
                           NodeId previous, NodeId x,
                           SecondOrderCounts* counts) {
  if (x == previous) {
    if (counts) ++counts->returned;
    return 1.0 / s.p;
  }
  if (graph.has_edge(previous, x)) {
    if (counts) ++counts->adjacent;
    return 1.0;
  }
  if (counts) ++counts->outward;
  return 1.0 / s.q;
}

struct WalkContext {
  const Graph& graph;
  const WalkStrategy& strategy;
  const DegreeBiasedSampler* biased;
  double envelope;
};

// Returns false if the walk hit a dead end before reaching full length.
bool walk_from(const WalkContext& ctx, NodeId start, std::size_t length,
               std::mt19937_64& rng, std::vector<NodeId>& walk,
               SecondOrderCounts& counts) {
  walk.clear();
  walk.push_back(start);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (walk.size() < length) {
    NodeId current = walk.back();
    if (ctx.graph.degree(current) == 0) return false;
    NodeId next = 0;
    switch (ctx.strategy.kind) {
      case WalkStrategy::Kind::kUniform:
        next = uniform_neighbor(ctx.graph, current, rng);
        break;
      case WalkStrategy::Kind::kDegreeBiased:
        next = ctx.biased->next(current, rng);
        break;
      case WalkStrategy::Kind::kSecondOrder: {
        if (walk.size() < 2) {
          next = uniform_neighbor(ctx.graph, current, rng);
          break;
        }
        NodeId previous = walk[walk.size() - 2];
        // Rejection sampling under the envelope max(1/p, 1, 1/q).
        while (true) {
          NodeId x = uniform_neighbor(ctx.graph, current, rng);
          double w = second_order_weight(ctx.graph, ctx.strategy, previous, x,
                                         &counts);
          if (unit(rng) * ctx.envelope < w) {
            next = x;
            break;
          }
        }
        break;
      }
    }
    walk.push_back(next);
  }
  return true;
}

}  // namespace

double apply_degree_function(DegreeFunction f, std::uint32_t degree) {
  switch (f) {
    case DegreeFunction::kInverse:
      return 1.0 / static_cast<double>(degree);
    case DegreeFunction::kInverseSqrt:
      return 1.0 / std::sqrt(static_cast<double>(degree));
    case DegreeFunction::kConstant:
      return 1.0;
  }
  return 1.0;
}

std::string to_string(DegreeFunction f) {
  switch (f) {
    case DegreeFunction::kInverse:
      return "inverse";
    case DegreeFunction::kInverseSqrt:
      return "inverse_sqrt";
    case DegreeFunction::kConstant:
      return "constant";
  }
  return "constant";
}

DegreeFunction parse_degree_function(const std::string& name) {
  if (name == "inverse") return DegreeFunction::kInverse;
  if (name == "inverse_sqrt") return DegreeFunction::kInverseSqrt;
  if (name == "constant") return DegreeFunction::kConstant;
  throw std::invalid_argument("unknown degree function '" + name +
                              "' (expected inverse, inverse_sqrt, constant)");
}

WalkStrategy WalkStrategy::second_order(double p, double q) {
  WalkStrategy s{Kind::kSecondOrder, p, q, DegreeFunction::kConstant};
  s.validate();
  return s;
}

WalkStrategy WalkStrategy::degree_biased(DegreeFunction f) {
  return {Kind::kDegreeBiased, 1.0, 1.0, f};
}

void WalkStrategy::validate() const {
  if (!(p > 0.0) || !(q > 0.0) || !std::isfinite(p) || !std::isfinite(q)) {
    throw std::invalid_argument("walk parameters p and q must be positive");
  }
}

std::string WalkStrategy::describe() const {
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kSecondOrder:
      return "second_order(p=" + format_real(p) + ",q=" + format_real(q) + ")";
    case Kind::kDegreeBiased:
      return "degree_biased(f=" + to_string(f) + ")";
  }
  return "uniform";
}

WalkStrategy WalkStrategy::parse(const std::string& text) {
  auto t = std::string(detail::trim(text));
  if (t == "uniform") return uniform();
  auto args_of = [&](std::string_view prefix) -> std::optional<std::string> {
    if (t.size() > prefix.size() + 1 && t.starts_with(prefix) &&
        t.back() == ')') {
      return t.substr(prefix.size(), t.size() - prefix.size() - 1);
    }
    return std::nullopt;
  };
  if (auto args = args_of("degree_biased(")) {
    if (!args->starts_with("f=")) {
      throw std::invalid_argument("bad strategy '" + t + "'");
    }
    return degree_biased(parse_degree_function(args->substr(2)));
  }
  if (auto args = args_of("second_order(")) {
    auto parts = detail::split(*args, ',');
    if (parts.size() != 2 || !parts[0].starts_with("p=") ||
        !parts[1].starts_with("q=")) {
      throw std::invalid_argument("bad strategy '" + t + "'");
    }
    auto p = detail::parse_number<double>(parts[0].substr(2));
    auto q = detail::parse_number<double>(parts[1].substr(2));
    if (!p || !q) throw std::invalid_argument("bad strategy '" + t + "'");
    return second_order(*p, *q);
  }
  throw std::invalid_argument("unknown walk strategy '" + t + "'");
}

std::vector<double> transition_distribution(const Graph& graph,
                                            const WalkStrategy& strategy,
                                            NodeId current,
                                            std::optional<NodeId> previous) {
  auto n = graph.neighbors(current);
  if (n.empty()) throw DeadEnd(current);
  std::vector<double> w(n.size());
  switch (strategy.kind) {
    case WalkStrategy::Kind::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case WalkStrategy::Kind::kDegreeBiased:
      for (std::size_t i = 0; i < n.size(); ++i) {
        w[i] = apply_degree_function(strategy.f, graph.degree(n[i]));
      }
      break;
    case WalkStrategy::Kind::kSecondOrder:
      strategy.validate();
      for (std::size_t i = 0; i < n.size(); ++i) {
        w[i] = previous ? second_order_weight(graph, strategy, *previous,
                                              n[i], nullptr)
                        : 1.0;
      }
      break;
  }
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

void CorpusOptions::validate() const {
  if (walk_length < 2) throw std::invalid_argument("walk length must be >= 2");
  if (walks_per_node < 1) {
    throw std::invalid_argument("walks per node must be >= 1");
  }
}

std::size_t WalkCorpus::token_count() const {
  std::size_t n = 0;
  for (const auto& w : walks) n += w.size();
  return n;
}

WalkCorpus generate_corpus(const Graph& graph, const WalkStrategy& strategy,
                           const CorpusOptions& options) {
  options.validate();
  strategy.validate();
  if (graph.edge_count() == 0) {
    throw std::invalid_argument("cannot walk a graph with no edges");
  }

  std::optional<DegreeBiasedSampler> biased;
  if (strategy.kind == WalkStrategy::Kind::kDegreeBiased) {
    biased.emplace(graph, strategy.f);
  }
  WalkContext ctx{graph, strategy, biased ? &*biased : nullptr,
                  std::max({1.0 / strategy.p, 1.0, 1.0 / strategy.q})};

  std::vector<NodeId> starts;
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    if (graph.degree(v) > 0) starts.push_back(v);
  }

  const std::size_t per = options.walks_per_node;
  std::vector<std::vector<NodeId>> slots(starts.size() * per);
  std::vector<std::uint8_t> complete(slots.size(), 1);
  const std::size_t threads =
      std::max<std::size_t>(1, std::min(options.threads, starts.size()));
  std::vector<SecondOrderCounts> counts(threads);

  auto work = [&](std::size_t t) {
    std::size_t begin = starts.size() * t / threads;
    std::size_t end = starts.size() * (t + 1) / threads;
    std::vector<NodeId> walk;
    for (std::size_t s = begin; s < end; ++s) {
      for (std::size_t k = 0; k < per; ++k) {
        std::mt19937_64 rng(derive_seed(options.seed, starts[s], k));
        complete[s * per + k] =
            walk_from(ctx, starts[s], options.walk_length, rng, walk,
                      counts[t]);
        slots[s * per + k] = walk;
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  WalkCorpus corpus;
  corpus.walk_length = options.walk_length;
  corpus.walks_per_node = per;
  corpus.strategy = strategy;
  corpus.seed = options.seed;
  for (const auto& c : counts) corpus.branch_counts += c;
  corpus.walks.reserve(slots.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!complete[i]) ++corpus.truncated_walks;
    if (slots[i].size() >= 2) corpus.walks.push_back(std::move(slots[i]));
  }
  return corpus;
}

void write_corpus(const WalkCorpus& corpus, std::ostream& out) {
  out << "# strategy " << corpus.strategy.describe() << '\n'
      << "# seed " << corpus.seed << '\n'
      << "# walk_length " << corpus.walk_length << '\n'
      << "# walks_per_node " << corpus.walks_per_node << '\n'
      << "# walks " << corpus.walks.size() << '\n';
  for (const auto& walk : corpus.walks) {
    for (std::size_t i = 0; i < walk.size(); ++i) {
      if (i) out << ' ';
      out << walk[i];
    }
    out << '\n';
  }
}

WalkCorpus read_corpus(std::istream& in) {
  WalkCorpus corpus;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      auto f = detail::split_blanks(t.substr(1));
      if (f.size() != 2) continue;
      if (f[0] == "strategy") {
        corpus.strategy = WalkStrategy::parse(std::string(f[1]));
      } else if (f[0] == "seed") {
        corpus.seed = detail::parse_or_throw<std::uint64_t>(f[1], "seed", lineno);
      } else if (f[0] == "walk_length") {
        corpus.walk_length =
            detail::parse_or_throw<std::size_t>(f[1], "walk_length", lineno);
      } else if (f[0] == "walks_per_node") {
        corpus.walks_per_node =
            detail::parse_or_throw<std::size_t>(f[1], "walks_per_node", lineno);
      }
      continue;
    }
    std::vector<NodeId> walk;
    for (auto tok : detail::split_blanks(t)) {
      walk.push_back(detail::parse_or_throw<NodeId>(tok, "node", lineno));
    }
    corpus.walks.push_back(std::move(walk));
  }
  return corpus;
}

std::uint64_t FrequencyProfile::total_occurrences() const {
  std::uint64_t n = 0;
  for (const auto& r : rows) n += r.occurrences;
  return n;
}

void FrequencyProfile::write_csv(std::ostream& out) const {
  out << "node,degree,occurrences\n";
  for (const auto& r : rows) {
    out << r.node << ',' << r.degree << ',' << r.occurrences << '\n';
  }
  out << "# spearman," << format_real(spearman) << '\n';
}

FrequencyProfile frequency_profile(const WalkCorpus& corpus,
                                   const Graph& graph) {
  std::vector<std::uint64_t> occ(graph.node_count(), 0);
  for (const auto& walk : corpus.walks) {
    for (NodeId v : walk) {
      if (v >= occ.size()) {
        throw std::invalid_argument("corpus mentions node " +
                                    std::to_string(v) +
                                    " outside the graph");
      }
      ++occ[v];
    }
  }
  FrequencyProfile profile;
  profile.rows.reserve(graph.node_count());
  for (NodeId v = 0; v < graph.node_count(); ++v) {
    profile.rows.push_back({v, graph.degree(v), occ[v]});
  }
  std::stable_sort(profile.rows.begin(), profile.rows.end(),
                   [](const auto& a, const auto& b) { return a.degree < b.degree; });

  std::vector<double> deg, freq;
  for (const auto& r : profile.rows) {
    if (r.degree == 0) continue;
    deg.push_back(r.degree);
    freq.push_back(static_cast<double>(r.occurrences));
  }
  profile.spearman = spearman_correlation(deg, freq);
  return profile;
}

namespace {

std::vector<double> mid_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman_correlation(std::span<const double> x,
                            std::span<const double> y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("spearman: length mismatch");
  }
  if (x.size() < 2) return 0.0;
  auto rx = mid_ranks(x);
  auto ry = mid_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double a = rx[i] - mean, b = ry[i] - mean;
    sxy += a * b;
    sxx += a * a;
    syy += b * b;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace div2vec
