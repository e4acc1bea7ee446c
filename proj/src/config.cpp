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

#include "div2vec/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

namespace div2vec {

using nlohmann::json;

namespace {

// Stage tags for seed derivation.
enum SeedTag : std::uint64_t { kSplit = 1, kWalk = 2, kEmbed = 3, kClassifier = 4 };

void check_keys(const json& obj, const std::string& where,
                std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = std::any_of(allowed.begin(), allowed.end(),
                          [&](const char* a) { return key == a; });
    if (!ok) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

void read_seed(const json& obj, const char* key,
               std::optional<std::uint64_t>& out, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return;
  std::uint64_t v = 0;
  read(obj, key, v, where);
  out = v;
}

json seed_json(const std::optional<std::uint64_t>& s) {
  return s ? json(*s) : json(nullptr);
}

const json& section(const json& root, const char* key) {
  static const json kEmpty = json::object();
  return root.contains(key) ? root.at(key) : kEmpty;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig c;
  c.methods = {
      {"deepwalk", WalkStrategy::uniform()},
      {"n2v_1_2", WalkStrategy::second_order(1.0, 2.0)},
      {"n2v_2_1", WalkStrategy::second_order(2.0, 1.0)},
      {"div2vec", WalkStrategy::degree_biased(DegreeFunction::kInverse)},
      {"rooted_div2vec",
       WalkStrategy::degree_biased(DegreeFunction::kInverseSqrt)},
  };
  c.operators.assign(std::begin(kAllOperators), std::end(kAllOperators));
  return c;
}

std::uint64_t ExperimentConfig::resolved_split_seed() const {
  return split_seed.value_or(derive_seed(seed, kSplit));
}
std::uint64_t ExperimentConfig::resolved_walk_seed() const {
  return walk_seed.value_or(derive_seed(seed, kWalk));
}
std::uint64_t ExperimentConfig::resolved_embed_seed() const {
  return embed_seed.value_or(derive_seed(seed, kEmbed));
}
std::uint64_t ExperimentConfig::resolved_classifier_seed() const {
  return classifier_seed.value_or(derive_seed(seed, kClassifier));
}

void ExperimentConfig::validate(bool require_ratings) const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (require_ratings && ratings_path.empty()) fail("data.ratings is required");
  if (!(binarize.positive_threshold > binarize.negative_threshold)) {
    fail("binarize.positive_threshold must exceed negative_threshold");
  }
  if (filter.min_item_records == 0 || filter.min_user_records == 0 ||
      filter.max_user_records == 0) {
    fail("filter thresholds must be positive");
  }
  if (filter.min_user_records > filter.max_user_records) {
    fail("filter.min_user_records exceeds max_user_records");
  }
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    fail("split.test_fraction must lie in (0, 1)");
  }
  try {
    CorpusOptions{walk_length, walks_per_node, 0, 1}.validate();
    skipgram.validate();
    classifier.validate();
    for (const auto& m : methods) m.strategy.validate();
    for (const auto& s : figure2.strategies) s.validate();
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
  if (methods.empty()) fail("at least one method is required");
  std::set<std::string> names;
  for (const auto& m : methods) {
    if (m.name.empty() ||
        !std::all_of(m.name.begin(), m.name.end(), [](char ch) {
          return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' ||
                 ch == '-';
        })) {
      fail("method name '" + m.name + "' must match [A-Za-z0-9_-]+");
    }
    if (!names.insert(m.name).second) fail("duplicate method '" + m.name + "'");
  }
  if (operators.empty()) fail("at least one operator is required");
  if (k_values.empty()) fail("at least one k is required");
  for (auto k : k_values) {
    if (k == 0) fail("k values must be >= 1");
  }
  if (!std::is_sorted(k_values.begin(), k_values.end()) ||
      std::adjacent_find(k_values.begin(), k_values.end()) != k_values.end()) {
    fail("k values must be strictly increasing");
  }
  if (eval_users != "test" && eval_users != "all") {
    fail("evaluation.users must be 'test' or 'all'");
  }
  if (figure2.graph != "positive" && figure2.graph != "negative" &&
      figure2.graph != "preferential_attachment") {
    fail("figure2.graph must be positive, negative or preferential_attachment");
  }
  if (figure2.strategies.empty()) fail("figure2.strategies is empty");
}

json ExperimentConfig::to_json() const {
  json methods_j = json::array();
  for (const auto& m : methods) {
    methods_j.push_back({{"name", m.name}, {"strategy", m.strategy.describe()}});
  }
  json ops = json::array();
  for (auto op : operators) ops.push_back(to_string(op));
  json f2_strategies = json::array();
  for (const auto& s : figure2.strategies) f2_strategies.push_back(s.describe());
  return {
      {"data", {{"ratings", ratings_path}, {"item_features", item_features_path}}},
      {"binarize",
       {{"positive_threshold", binarize.positive_threshold},
        {"negative_threshold", binarize.negative_threshold},
        {"strict", binarize.strict}}},
      {"filter",
       {{"min_item_records", filter.min_item_records},
        {"min_user_records", filter.min_user_records},
        {"max_user_records", filter.max_user_records},
        {"fixed_point", filter.fixed_point},
        {"after_binarize", filter_after_binarize}}},
      {"split", {{"test_fraction", test_fraction}, {"seed", seed_json(split_seed)}}},
      {"seed", seed},
      {"walk",
       {{"length", walk_length},
        {"walks_per_node", walks_per_node},
        {"seed", seed_json(walk_seed)}}},
      {"methods", methods_j},
      {"skipgram",
       {{"dimension", skipgram.dimension},
        {"window", skipgram.window},
        {"negatives", skipgram.negatives},
        {"epochs", skipgram.epochs},
        {"initial_learning_rate", skipgram.initial_learning_rate},
        {"min_learning_rate", skipgram.min_learning_rate},
        {"unigram_power", skipgram.unigram_power},
        {"seed", seed_json(embed_seed)}}},
      {"classifier",
       {{"epochs", classifier.epochs},
        {"batch_size", classifier.batch_size},
        {"learning_rate", classifier.learning_rate},
        {"activation", to_string(classifier.activation)},
        {"standardize", classifier.standardize},
        {"seed", seed_json(classifier_seed)}}},
      {"evaluation",
       {{"operators", ops},
        {"k", k_values},
        {"users", eval_users},
        {"dump_edge_features", dump_edge_features}}},
      {"deterministic", deterministic},
      {"figure2",
       {{"graph", figure2.graph},
        {"pa_users", figure2.pa_users},
        {"pa_items", figure2.pa_items},
        {"pa_mean_degree", figure2.pa_mean_degree},
        {"pa_attractiveness", figure2.pa_attractiveness},
        {"strategies", f2_strategies}}},
  };
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c = defaults();
  check_keys(j, "config",
             {"data", "binarize", "filter", "split", "seed", "walk", "methods",
              "skipgram", "classifier", "evaluation", "deterministic",
              "figure2"});
  read(j, "seed", c.seed, "config");
  read(j, "deterministic", c.deterministic, "config");

  const auto& data = section(j, "data");
  check_keys(data, "data", {"ratings", "item_features"});
  read(data, "ratings", c.ratings_path, "data");
  read(data, "item_features", c.item_features_path, "data");

  const auto& bin = section(j, "binarize");
  check_keys(bin, "binarize", {"positive_threshold", "negative_threshold", "strict"});
  read(bin, "positive_threshold", c.binarize.positive_threshold, "binarize");
  read(bin, "negative_threshold", c.binarize.negative_threshold, "binarize");
  read(bin, "strict", c.binarize.strict, "binarize");

  const auto& filt = section(j, "filter");
  check_keys(filt, "filter",
             {"min_item_records", "min_user_records", "max_user_records",
              "fixed_point", "after_binarize"});
  read(filt, "min_item_records", c.filter.min_item_records, "filter");
  read(filt, "min_user_records", c.filter.min_user_records, "filter");
  read(filt, "max_user_records", c.filter.max_user_records, "filter");
  read(filt, "fixed_point", c.filter.fixed_point, "filter");
  read(filt, "after_binarize", c.filter_after_binarize, "filter");

  const auto& split = section(j, "split");
  check_keys(split, "split", {"test_fraction", "seed"});
  read(split, "test_fraction", c.test_fraction, "split");
  read_seed(split, "seed", c.split_seed, "split");

  const auto& walk = section(j, "walk");
  check_keys(walk, "walk", {"length", "walks_per_node", "seed"});
  read(walk, "length", c.walk_length, "walk");
  read(walk, "walks_per_node", c.walks_per_node, "walk");
  read_seed(walk, "seed", c.walk_seed, "walk");

  if (j.contains("methods")) {
    if (!j.at("methods").is_array()) throw ConfigError("methods must be a list");
    c.methods.clear();
    for (const auto& m : j.at("methods")) {
      check_keys(m, "methods[]", {"name", "strategy"});
      MethodSpec spec;
      read(m, "name", spec.name, "methods[]");
      std::string strategy;
      read(m, "strategy", strategy, "methods[]");
      try {
        spec.strategy = WalkStrategy::parse(strategy);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("method '" + spec.name + "': " + e.what());
      }
      c.methods.push_back(std::move(spec));
    }
  }

  const auto& sg = section(j, "skipgram");
  check_keys(sg, "skipgram",
             {"dimension", "window", "negatives", "epochs",
              "initial_learning_rate", "min_learning_rate", "unigram_power",
              "seed"});
  read(sg, "dimension", c.skipgram.dimension, "skipgram");
  read(sg, "window", c.skipgram.window, "skipgram");
  read(sg, "negatives", c.skipgram.negatives, "skipgram");
  read(sg, "epochs", c.skipgram.epochs, "skipgram");
  read(sg, "initial_learning_rate", c.skipgram.initial_learning_rate, "skipgram");
  read(sg, "min_learning_rate", c.skipgram.min_learning_rate, "skipgram");
  read(sg, "unigram_power", c.skipgram.unigram_power, "skipgram");
  read_seed(sg, "seed", c.embed_seed, "skipgram");

  const auto& cl = section(j, "classifier");
  check_keys(cl, "classifier",
             {"epochs", "batch_size", "learning_rate", "activation",
              "standardize", "seed"});
  read(cl, "epochs", c.classifier.epochs, "classifier");
  read(cl, "batch_size", c.classifier.batch_size, "classifier");
  read(cl, "learning_rate", c.classifier.learning_rate, "classifier");
  read(cl, "standardize", c.classifier.standardize, "classifier");
  if (cl.contains("activation")) {
    std::string a;
    read(cl, "activation", a, "classifier");
    try {
      c.classifier.activation = parse_activation(a);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  read_seed(cl, "seed", c.classifier_seed, "classifier");

  const auto& ev = section(j, "evaluation");
  check_keys(ev, "evaluation", {"operators", "k", "users", "dump_edge_features"});
  if (ev.contains("operators")) {
    std::vector<std::string> names;
    read(ev, "operators", names, "evaluation");
    c.operators.clear();
    try {
      for (const auto& n : names) c.operators.push_back(parse_edge_operator(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  read(ev, "k", c.k_values, "evaluation");
  read(ev, "users", c.eval_users, "evaluation");
  read(ev, "dump_edge_features", c.dump_edge_features, "evaluation");

  const auto& f2 = section(j, "figure2");
  check_keys(f2, "figure2",
             {"graph", "pa_users", "pa_items", "pa_mean_degree",
              "pa_attractiveness", "strategies"});
  read(f2, "graph", c.figure2.graph, "figure2");
  read(f2, "pa_users", c.figure2.pa_users, "figure2");
  read(f2, "pa_items", c.figure2.pa_items, "figure2");
  read(f2, "pa_mean_degree", c.figure2.pa_mean_degree, "figure2");
  read(f2, "pa_attractiveness", c.figure2.pa_attractiveness, "figure2");
  if (f2.contains("strategies")) {
    std::vector<std::string> names;
    read(f2, "strategies", names, "figure2");
    c.figure2.strategies.clear();
    try {
      for (const auto& n : names) c.figure2.strategies.push_back(WalkStrategy::parse(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace div2vec
