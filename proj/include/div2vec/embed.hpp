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

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "div2vec/alias.hpp"
#include "div2vec/common.hpp"

namespace div2vec {

struct WalkCorpus;

struct SkipGramConfig {
  std::size_t dimension = 64;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double initial_learning_rate = 0.025;
  double min_learning_rate = 1e-4;
  double unigram_power = 0.75;
  std::uint64_t seed = 1;
  // threads > 1 switches to lock-free parallel updates, which are not
  // bit-reproducible.
  std::size_t threads = 1;

  void validate() const;
  bool operator==(const SkipGramConfig&) const = default;
};

// Dense node-id -> vector map. Input ("center") vectors are the embedding;
// context vectors exist only while training.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t node_count, std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  // Size of the id space (largest id + 1), not the number of stored rows.
  std::size_t node_count() const { return present_.size(); }
  std::size_t row_count() const;
  bool contains(NodeId v) const {
    return v < present_.size() && present_[v] != 0;
  }

  std::span<float> vector(NodeId v) {
    return {vectors_.data() + std::size_t{v} * dimension_, dimension_};
  }
  std::span<const float> vector(NodeId v) const {
    return {vectors_.data() + std::size_t{v} * dimension_, dimension_};
  }
  std::span<float> context(NodeId v) {
    return {context_.data() + std::size_t{v} * dimension_, dimension_};
  }
  std::span<const float> context(NodeId v) const {
    return {context_.data() + std::size_t{v} * dimension_, dimension_};
  }
  bool has_context() const { return !context_.empty(); }

  void set_present(NodeId v) { present_[v] = 1; }
  void allocate_context() { context_.assign(vectors_.size(), 0.0f); }
  void release_context() { context_ = {}; }

  // Text: "rows dimension" then "node v1 ... vd" per stored row, floats
  // printed with enough digits to round-trip exactly.
  void write_text(std::ostream& out) const;
  static EmbeddingMatrix read_text(std::istream& in);
  // Binary: magic "D2VE", u32 version, u64 rows, u32 dimension, then per
  // row u32 node id and `dimension` float32, all little-endian.
  void write_binary(std::ostream& out) const;
  static EmbeddingMatrix read_binary(std::istream& in);

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t dimension_ = 0;
  std::vector<float> vectors_;
  std::vector<float> context_;
  std::vector<std::uint8_t> present_;
};

struct LookupResult {
  std::span<const float> vector;
  bool hit = false;
};

// Returns the node's input vector. A node without a vector (absent from this
// graph) gets an all-zero vector of the matrix dimension and hit == false.
LookupResult lookup(const EmbeddingMatrix& matrix, NodeId v);

// Calls fn(center, context) for each ordered pair (walk[i], walk[j]) with
// 0 < |i - j| <= window, walking positions left to right.
template <typename Fn>
void for_each_training_pair(std::span<const NodeId> walk, std::size_t window,
                            Fn&& fn) {
  for (std::size_t i = 0; i < walk.size(); ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(walk.size() - 1, i + window);
    for (std::size_t j = lo; j <= hi; ++j) {
      if (j != i) fn(walk[i], walk[j]);
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> training_pairs(const WalkCorpus& corpus,
                                                      std::size_t window);

// Number of pairs for_each_training_pair emits on a walk of this length.
std::size_t pair_count(std::size_t walk_length, std::size_t window);

inline double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

// One SGNS gradient-descent step on
//   loss = -ln s(v_c . u_o) - sum_n ln s(-v_c . u_n).
// All dot products are taken before any update, so the step is exact
// gradient descent even when a negative repeats or coincides with the
// context. Returns the pre-update loss. Throws std::runtime_error if the loss
// is not finite.
template <typename Real>
double sgns_update(std::span<Real> center, std::span<Real> context,
                   std::span<const std::span<Real>> negatives,
                   double learning_rate) {
  const std::size_t dim = center.size();
  auto dot = [dim](std::span<const Real> a, std::span<const Real> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += double(a[i]) * double(b[i]);
    return s;
  };

  // d loss / d score: sigma(s) - 1 for the positive, sigma(s) for negatives.
  constexpr std::size_t kMaxNegatives = 64;
  if (negatives.size() > kMaxNegatives) {
    throw std::invalid_argument("too many negatives per step");
  }
  double coeff[kMaxNegatives + 1];
  double s_pos = dot(center, context);
  double loss = -log_sigmoid(s_pos);
  coeff[0] = 1.0 / (1.0 + std::exp(-s_pos)) - 1.0;
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    double s = dot(center, negatives[k]);
    loss -= log_sigmoid(-s);
    coeff[k + 1] = 1.0 / (1.0 + std::exp(-s));
  }
  if (!std::isfinite(loss)) {
    throw std::runtime_error("non-finite SGNS loss");
  }

  // Center gradient against the pre-update context vectors.
  constexpr std::size_t kMaxDim = 1024;
  if (dim > kMaxDim) throw std::invalid_argument("embedding too wide");
  double grad_center[kMaxDim];
  for (std::size_t i = 0; i < dim; ++i) {
    double g = coeff[0] * double(context[i]);
    for (std::size_t k = 0; k < negatives.size(); ++k) {
      g += coeff[k + 1] * double(negatives[k][i]);
    }
    grad_center[i] = g;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    context[i] -= Real(learning_rate * coeff[0] * double(center[i]));
  }
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    for (std::size_t i = 0; i < dim; ++i) {
      negatives[k][i] -= Real(learning_rate * coeff[k + 1] * double(center[i]));
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    center[i] -= Real(learning_rate * grad_center[i]);
  }
  return loss;
}

// sgns_update over a matrix: center vector of `center`, context vectors of
// `context` and each negative.
double sgns_step(NodeId center, NodeId context,
                 std::span<const NodeId> negatives, double learning_rate,
                 EmbeddingMatrix& matrix);

// max(min_rate, initial * (1 - t / total_pairs)).
double learning_rate_at(const SkipGramConfig& config, std::uint64_t t,
                        std::uint64_t total_pairs);

// Draws negatives from fixed node weights (unigram^power in training). A
// draw equal to `avoid` is retried up to 8 times, then accepted.
class NegativeSampler {
 public:
  explicit NegativeSampler(std::span<const double> weights);

  template <typename Rng>
  NodeId draw(Rng& rng, NodeId avoid) const {
    NodeId v = nodes_[table_.sample(rng)];
    for (int tries = 0; v == avoid && tries < 8 && nodes_.size() > 1; ++tries) {
      v = nodes_[table_.sample(rng)];
    }
    return v;
  }

 private:
  AliasTable table_;
  std::vector<NodeId> nodes_;
};

struct TrainedEmbedding {
  EmbeddingMatrix matrix;
  std::vector<double> epoch_losses;
  // Set when some epoch's mean loss exceeded the previous one.
  bool loss_increased = false;
};

// Trains SGNS over the corpus. Walk order is reshuffled every epoch from
// the config seed; negatives are drawn from the unigram^power distribution
// of corpus node frequencies. Throws std::invalid_argument on an empty
// corpus.
TrainedEmbedding train_embeddings(const WalkCorpus& corpus,
                                  const SkipGramConfig& config);

// Unigram^power weights over nodes, indexed by node id (zero for nodes that
// never occur).
std::vector<double> negative_sampling_weights(const WalkCorpus& corpus,
                                              double power);

}  // namespace div2vec
