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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "div2vec/edgeops.hpp"
#include "div2vec/embed.hpp"
#include "div2vec/graph.hpp"
#include "div2vec/predictor.hpp"
#include "div2vec/walker.hpp"

namespace div2vec {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MethodSpec {
  std::string name;  // [A-Za-z0-9_-]+, used in artifact file names
  WalkStrategy strategy;

  bool operator==(const MethodSpec&) const = default;
};

// Graph used by the degree-versus-frequency analysis.
struct Figure2Config {
  // "positive" / "negative": the training graph of that polarity from the
  // ingest stage. "preferential_attachment": a synthetic bipartite graph.
  std::string graph = "positive";
  std::size_t pa_users = 500;
  std::size_t pa_items = 500;
  double pa_mean_degree = 5.0;
  double pa_attractiveness = 3.0;
  std::vector<WalkStrategy> strategies = {
      WalkStrategy::uniform(),
      WalkStrategy::degree_biased(DegreeFunction::kInverse),
      WalkStrategy::degree_biased(DegreeFunction::kInverseSqrt)};

  bool operator==(const Figure2Config&) const = default;
};

struct ExperimentConfig {
  std::string ratings_path;
  std::string item_features_path;  // optional; ILS columns need it

  BinarizeOptions binarize;
  FilterOptions filter;
  // Apply the record filters to labeled records (true) or to raw ratings
  // before binarization (false).
  bool filter_after_binarize = true;
  double test_fraction = 0.2;

  // Base seed; a stage seed left unset is derived from it.
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> split_seed;
  std::optional<std::uint64_t> walk_seed;
  std::optional<std::uint64_t> embed_seed;
  std::optional<std::uint64_t> classifier_seed;

  std::size_t walk_length = 80;
  std::size_t walks_per_node = 10;
  std::vector<MethodSpec> methods;

  SkipGramConfig skipgram;  // seed and threads are filled in per run
  TrainConfig classifier;   // seed is filled in per run
  std::vector<EdgeOperator> operators;
  std::vector<std::size_t> k_values = {1, 10, 50};
  // "test": users present in the test split; "all": every user.
  std::string eval_users = "test";
  // Single-threaded SGNS so every artifact is bit-reproducible.
  bool deterministic = true;
  bool dump_edge_features = false;

  Figure2Config figure2;

  // Five methods and four operators of the reference comparison grid.
  static ExperimentConfig defaults();

  std::uint64_t resolved_split_seed() const;
  std::uint64_t resolved_walk_seed() const;
  std::uint64_t resolved_embed_seed() const;
  std::uint64_t resolved_classifier_seed() const;

  // Checks every module precondition; throws ConfigError. The ratings path
  // may be left empty only for runs that never ingest.
  void validate(bool require_ratings = true) const;

  nlohmann::json to_json() const;
  // Missing keys keep their defaults; unknown keys are rejected. Throws
  // ConfigError.
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::string& path);

  bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace div2vec
