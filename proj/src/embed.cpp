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

#include "div2vec/embed.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "div2vec/alias.hpp"
#include "div2vec/walker.hpp"
#include "text_util.hpp"

namespace div2vec {

void SkipGramConfig::validate() const {
  if (dimension < 1 || dimension > 1024) {
    throw std::invalid_argument("embedding dimension must be in [1, 1024]");
  }
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (negatives < 1 || negatives > 64) {
    throw std::invalid_argument("negatives must be in [1, 64]");
  }
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(initial_learning_rate > 0.0) || !(min_learning_rate > 0.0) ||
      min_learning_rate > initial_learning_rate) {
    throw std::invalid_argument(
        "learning rates must be positive with min <= initial");
  }
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t node_count, std::size_t dimension)
    : dimension_(dimension),
      vectors_(node_count * dimension, 0.0f),
      present_(node_count, 0) {}

std::size_t EmbeddingMatrix::row_count() const {
  return static_cast<std::size_t>(
      std::count(present_.begin(), present_.end(), std::uint8_t{1}));
}

void EmbeddingMatrix::write_text(std::ostream& out) const {
  out << row_count() << ' ' << dimension_ << '\n';
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (NodeId v = 0; v < present_.size(); ++v) {
    if (!present_[v]) continue;
    out << v;
    for (float x : vector(v)) out << ' ' << x;
    out << '\n';
  }
}

namespace {

struct Row {
  NodeId node;
  std::vector<float> values;
};

EmbeddingMatrix from_rows(std::vector<Row> rows, std::size_t dim) {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max<std::size_t>(n, r.node + std::size_t{1});
  EmbeddingMatrix m(n, dim);
  for (auto& r : rows) {
    if (m.contains(r.node)) {
      throw std::invalid_argument("embedding row for node " +
                                  std::to_string(r.node) + " repeats");
    }
    std::copy(r.values.begin(), r.values.end(), m.vector(r.node).begin());
    m.set_present(r.node);
  }
  return m;
}

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_integral_v<T>);
  unsigned char b[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    b[i] = static_cast<unsigned char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff);
  }
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T))) {
    throw std::runtime_error("truncated binary embedding file");
  }
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= std::uint64_t{b[i]} << (8 * i);
  return static_cast<T>(v);
}

constexpr char kMagic[4] = {'D', '2', 'V', 'E'};
constexpr std::uint32_t kBinaryVersion = 1;

}  // namespace

EmbeddingMatrix EmbeddingMatrix::read_text(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::size_t rows_expected = 0, dim = 0;
  bool header = false;
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = detail::trim(line);
    if (t.empty()) continue;
    auto f = detail::split_blanks(t);
    if (!header) {
      if (f.size() != 2) {
        throw std::invalid_argument("embedding header must be 'rows dim'");
      }
      rows_expected = detail::parse_or_throw<std::size_t>(f[0], "rows", lineno);
      dim = detail::parse_or_throw<std::size_t>(f[1], "dimension", lineno);
      header = true;
      continue;
    }
    if (f.size() != dim + 1) {
      throw std::invalid_argument("embedding line " + std::to_string(lineno) +
                                  ": expected " + std::to_string(dim + 1) +
                                  " fields");
    }
    Row r{detail::parse_or_throw<NodeId>(f[0], "node", lineno), {}};
    r.values.reserve(dim);
    for (std::size_t i = 1; i < f.size(); ++i) {
      r.values.push_back(detail::parse_or_throw<float>(f[i], "value", lineno));
    }
    rows.push_back(std::move(r));
  }
  if (!header) throw std::invalid_argument("empty embedding file");
  if (rows.size() != rows_expected) {
    throw std::invalid_argument("embedding file declares " +
                                std::to_string(rows_expected) + " rows, has " +
                                std::to_string(rows.size()));
  }
  return from_rows(std::move(rows), dim);
}

void EmbeddingMatrix::write_binary(std::ostream& out) const {
  out.write(kMagic, 4);
  put_le<std::uint32_t>(out, kBinaryVersion);
  put_le<std::uint64_t>(out, row_count());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  for (NodeId v = 0; v < present_.size(); ++v) {
    if (!present_[v]) continue;
    put_le<std::uint32_t>(out, v);
    for (float x : vector(v)) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
  }
}

EmbeddingMatrix EmbeddingMatrix::read_binary(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::invalid_argument("not a binary embedding file");
  }
  if (get_le<std::uint32_t>(in) != kBinaryVersion) {
    throw std::invalid_argument("unsupported binary embedding version");
  }
  auto rows = get_le<std::uint64_t>(in);
  auto dim = get_le<std::uint32_t>(in);
  std::vector<Row> out;
  out.reserve(rows);
  for (std::uint64_t r = 0; r < rows; ++r) {
    Row row{get_le<std::uint32_t>(in), std::vector<float>(dim)};
    for (auto& x : row.values) x = std::bit_cast<float>(get_le<std::uint32_t>(in));
    out.push_back(std::move(row));
  }
  return from_rows(std::move(out), dim);
}

LookupResult lookup(const EmbeddingMatrix& matrix, NodeId v) {
  static const std::vector<float> kZeros(1024, 0.0f);
  if (matrix.contains(v)) return {matrix.vector(v), true};
  if (matrix.dimension() > kZeros.size()) {
    throw std::invalid_argument("embedding too wide for zero-fill lookup");
  }
  return {std::span<const float>(kZeros.data(), matrix.dimension()), false};
}

std::vector<std::pair<NodeId, NodeId>> training_pairs(const WalkCorpus& corpus,
                                                      std::size_t window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& walk : corpus.walks) {
    for_each_training_pair(walk, window,
                           [&](NodeId c, NodeId o) { out.emplace_back(c, o); });
  }
  return out;
}

std::size_t pair_count(std::size_t walk_length, std::size_t window) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < walk_length; ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(walk_length - 1, i + window);
    n += hi - lo;
  }
  return n;
}

double sgns_step(NodeId center, NodeId context,
                 std::span<const NodeId> negatives, double learning_rate,
                 EmbeddingMatrix& matrix) {
  std::span<float> neg[64];
  if (negatives.size() > 64) {
    throw std::invalid_argument("too many negatives per step");
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    neg[k] = matrix.context(negatives[k]);
  }
  return sgns_update<float>(matrix.vector(center), matrix.context(context),
                            std::span<const std::span<float>>(neg, negatives.size()),
                            learning_rate);
}

double learning_rate_at(const SkipGramConfig& config, std::uint64_t t,
                        std::uint64_t total_pairs) {
  double frac = total_pairs == 0 ? 0.0
                                 : static_cast<double>(t) /
                                       static_cast<double>(total_pairs);
  return std::max(config.min_learning_rate,
                  config.initial_learning_rate * (1.0 - frac));
}

std::vector<double> negative_sampling_weights(const WalkCorpus& corpus,
                                              double power) {
  std::vector<double> counts;
  for (const auto& walk : corpus.walks) {
    for (NodeId v : walk) {
      if (v >= counts.size()) counts.resize(v + std::size_t{1}, 0.0);
      counts[v] += 1.0;
    }
  }
  for (double& c : counts) {
    if (c > 0) c = std::pow(c, power);
  }
  return counts;
}

NegativeSampler::NegativeSampler(std::span<const double> weights) {
  std::vector<double> w;
  for (NodeId v = 0; v < weights.size(); ++v) {
    if (weights[v] > 0) {
      nodes_.push_back(v);
      w.push_back(weights[v]);
    }
  }
  table_ = AliasTable(w);
}

TrainedEmbedding train_embeddings(const WalkCorpus& corpus,
                                  const SkipGramConfig& config) {
  config.validate();
  std::uint64_t pairs_per_epoch = 0;
  for (const auto& walk : corpus.walks) {
    pairs_per_epoch += pair_count(walk.size(), config.window);
  }
  if (corpus.walks.empty() || pairs_per_epoch == 0) {
    throw std::invalid_argument("cannot train on an empty corpus");
  }
  const std::uint64_t total_pairs = pairs_per_epoch * config.epochs;

  auto weights = negative_sampling_weights(corpus, config.unigram_power);
  NegativeSampler sampler(weights);

  TrainedEmbedding result;
  EmbeddingMatrix& m = result.matrix;
  m = EmbeddingMatrix(weights.size(), config.dimension);
  m.allocate_context();
  {
    std::mt19937_64 rng(derive_seed(config.seed, 0x1417));
    const double half = 0.5 / static_cast<double>(config.dimension);
    std::uniform_real_distribution<double> init(-half, half);
    for (NodeId v = 0; v < weights.size(); ++v) {
      if (weights[v] == 0) continue;
      m.set_present(v);
      for (float& x : m.vector(v)) x = static_cast<float>(init(rng));
    }
  }

  std::vector<std::size_t> order(corpus.walks.size());
  std::atomic<std::uint64_t> processed{0};
  const std::size_t threads = config.threads;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 shuffle_rng(derive_seed(config.seed, 0x5eed, epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    std::vector<double> shard_loss(threads, 0.0);
    auto work = [&](std::size_t t) {
      std::mt19937_64 rng(derive_seed(config.seed, epoch + 1, t + 1));
      std::vector<NodeId> negatives(config.negatives);
      std::size_t begin = order.size() * t / threads;
      std::size_t end = order.size() * (t + 1) / threads;
      std::uint64_t local = threads == 1 ? processed.load() : 0;
      double loss_sum = 0.0;
      for (std::size_t w = begin; w < end; ++w) {
        for_each_training_pair(
            corpus.walks[order[w]], config.window, [&](NodeId c, NodeId o) {
              std::uint64_t step =
                  threads == 1 ? local++
                               : processed.fetch_add(1, std::memory_order_relaxed);
              for (auto& n : negatives) n = sampler.draw(rng, o);
              double rate = learning_rate_at(config, step, total_pairs);
              try {
                loss_sum += sgns_step(c, o, negatives, rate, m);
              } catch (const std::runtime_error&) {
                throw std::runtime_error(
                    "SGNS diverged at pair " + std::to_string(step) +
                    " (center " + std::to_string(c) + ", context " +
                    std::to_string(o) + ", rate " + std::to_string(rate) + ")");
              }
            });
      }
      if (threads == 1) processed.store(local);
      shard_loss[t] = loss_sum;
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) {
          pool.emplace_back([&, t] {
            try {
              work(t);
            } catch (...) {
              errors[t] = std::current_exception();
            }
          });
        }
      }
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    double mean = std::accumulate(shard_loss.begin(), shard_loss.end(), 0.0) /
                  static_cast<double>(pairs_per_epoch);
    if (!result.epoch_losses.empty() && mean > result.epoch_losses.back()) {
      result.loss_increased = true;
    }
    result.epoch_losses.push_back(mean);
  }

  for (NodeId v = 0; v < m.node_count(); ++v) {
    if (!m.contains(v)) continue;
    for (float x : m.vector(v)) {
      if (!std::isfinite(x)) {
        throw std::runtime_error("non-finite embedding for node " +
                                 std::to_string(v));
      }
    }
  }
  m.release_context();
  return result;
}

}  // namespace div2vec
