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

#include "div2vec/graph.hpp"

namespace div2vec {

inline constexpr std::size_t kHiddenWidth = 128;

enum class Activation : std::uint8_t { kRelu, kTanh };

std::string to_string(Activation a);
Activation parse_activation(const std::string& name);

// One-hidden-layer binary classifier:
//   p(x) = sigmoid(w2 . act(W1 z + b1) + b2),  z = (x - shift) * scale.
// The input standardization (shift, scale) is fitted on the training set and
// is part of the model; it is the identity for a freshly constructed model.
struct MlpModel {
  std::size_t input_dim = 0;
  Activation activation = Activation::kRelu;
  std::vector<double> shift;  // input_dim
  std::vector<double> scale;  // input_dim
  std::vector<double> w1;     // kHiddenWidth x input_dim, row-major
  std::vector<double> b1;     // kHiddenWidth
  std::vector<double> w2;     // kHiddenWidth
  double b2 = 0.0;

  // All-zero parameters with identity standardization.
  static MlpModel zeros(std::size_t input_dim,
                        Activation activation = Activation::kRelu);

  // Text header ("div2vec-mlp", dims, activation) followed by the
  // parameters as little-endian float64: shift, scale, w1, b1, w2, b2.
  void write(std::ostream& out) const;
  static MlpModel read(std::istream& in);

  bool operator==(const MlpModel&) const = default;
};

// Throws std::invalid_argument if the feature width does not match.
double mlp_forward(const MlpModel& model, std::span<const double> feature);

// Gradient of the binary cross-entropy, laid out like MlpModel's parameters
// (standardization is fixed and has no gradient).
struct MlpGradient {
  std::vector<double> w1, b1, w2;
  double b2 = 0.0;

  explicit MlpGradient(std::size_t input_dim)
      : w1(kHiddenWidth * input_dim, 0.0),
        b1(kHiddenWidth, 0.0),
        w2(kHiddenWidth, 0.0) {}
  void clear();
};

// Adds d loss / d theta for one example to `grad` and returns the loss
// -[y ln p + (1 - y) ln(1 - p)].
double mlp_accumulate_gradient(const MlpModel& model,
                               std::span<const double> feature, bool label,
                               MlpGradient& grad);

double binary_cross_entropy(const MlpModel& model,
                            std::span<const double> feature, bool label);

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 64;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  Activation activation = Activation::kRelu;
  // Fit per-column mean/std standardization on the training features.
  bool standardize = true;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

// Row-major feature matrix with one label per row.
struct FeatureSet {
  std::size_t width = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> labels;  // 1 = positive

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return {values.data() + i * width, width};
  }
  void add(std::span<const double> feature, bool label);
};

struct TrainedClassifier {
  MlpModel model;
  std::vector<double> epoch_losses;
};

// Mini-batch gradient descent at a fixed rate from a seeded initialization
// and seeded per-epoch shuffles. Throws std::invalid_argument if the
// training set lacks either label.
TrainedClassifier train_classifier(const FeatureSet& data,
                                   const TrainConfig& config);

struct ScoredLabel {
  double score = 0.0;
  bool positive = false;
};

// Area under the ROC curve: the probability that a random positive outscores
// a random negative, ties counting one half. Computed from mid-ranks in
// O(n log n). Throws std::invalid_argument unless both labels are present.
double auc(std::span<const ScoredLabel> scores);

}  // namespace div2vec
