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

// Command-line driver for the experiment pipeline.
//
//   div2vec --config exp.json --out-dir runs/a report
//   div2vec --config exp.json --out-dir runs/a figure2
//   div2vec synth data/
//
// Each pipeline subcommand runs every stage up to and including itself,
// reusing cached stages. Exit status: 0 success, 1 usage or configuration
// error, 2 stage failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "div2vec/config.hpp"
#include "div2vec/pipeline.hpp"
#include "div2vec/synthetic.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kStageError = 2;

struct GlobalFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
  bool force = false;
  bool quiet = false;
};

div2vec::ExperimentConfig load_config(const GlobalFlags& flags) {
  auto config = flags.config_path.empty()
                    ? div2vec::ExperimentConfig::defaults()
                    : div2vec::ExperimentConfig::load(flags.config_path);
  // --seed replaces the base seed; per-stage seeds set explicitly in the
  // config file still win.
  if (flags.seed) config.seed = *flags.seed;
  return config;
}

div2vec::RunOptions run_options(const GlobalFlags& flags) {
  if (flags.out_dir.empty()) {
    throw div2vec::ConfigError("--out-dir is required");
  }
  div2vec::RunOptions o;
  o.out_dir = flags.out_dir;
  o.force = flags.force;
  o.threads = flags.threads > 0
                  ? flags.threads
                  : std::max(1u, std::thread::hardware_concurrency());
  o.log = flags.quiet ? nullptr : &std::cerr;
  return o;
}

int write_synthetic(const std::string& dir, const div2vec::SyntheticRatingsConfig& sc) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto data = div2vec::synthetic_movielens(sc);
  std::ofstream ratings(fs::path(dir) / "ratings.csv");
  std::ofstream tags(fs::path(dir) / "genome_scores.csv");
  if (!ratings || !tags) {
    std::cerr << "error: cannot write into " << dir << "\n";
    return kConfigError;
  }
  data.write_ratings_csv(ratings);
  data.write_tags_csv(tags);
  std::cerr << "wrote " << data.ratings.size() << " ratings and "
            << data.tags.size() << " tag cells to " << dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"div2vec: diversity-emphasizing node embeddings for recommendation"};
  app.require_subcommand(1);

  GlobalFlags flags;
  app.add_option("--config", flags.config_path, "Experiment config (JSON)")
      ->check(CLI::ExistingFile);
  app.add_option("--out-dir", flags.out_dir, "Output directory");
  app.add_option("--seed", flags.seed, "Base seed for every stage");
  app.add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
  app.add_flag("--force", flags.force, "Recompute cached stages");
  app.add_flag("-q,--quiet", flags.quiet, "No progress log");

  const std::pair<const char*, const char*> stages[] = {
      {"ingest", "Binarize, filter and split the ratings"},
      {"walk", "Generate walk corpora"},
      {"embed", "Train skip-gram embeddings"},
      {"edges", "Dump edge features (when enabled)"},
      {"fit", "Train the link classifiers"},
      {"evaluate", "Score test edges and recommendation lists"},
      {"report", "Write the comparison report"},
  };
  for (const auto& [name, help] : stages) app.add_subcommand(name, help);
  app.add_subcommand("figure2", "Degree versus walk-frequency profiles");

  auto* defaults = app.add_subcommand("defaults", "Print the default config");

  div2vec::SyntheticRatingsConfig sc;
  std::string synth_dir;
  auto* synth = app.add_subcommand(
      "synth", "Write a synthetic ratings + tag-relevance dataset");
  synth->add_option("dir", synth_dir, "Destination directory")->required();
  synth->add_option("--users", sc.users, "Users")->capture_default_str();
  synth->add_option("--items", sc.items, "Items")->capture_default_str();
  synth->add_option("--tags", sc.tags, "Tag columns")->capture_default_str();
  synth->add_option("--data-seed", sc.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigError;
  }

  auto* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  try {
    if (sub == defaults) {
      std::cout << div2vec::ExperimentConfig::defaults().to_json().dump(2) << '\n';
      return kOk;
    }
    if (sub == synth) return write_synthetic(synth_dir, sc);

    auto config = load_config(flags);
    auto options = run_options(flags);
    if (cmd == "figure2") {
      auto profiles = div2vec::run_figure2(config, options);
      for (const auto& p : profiles) {
        std::printf("%s\t%.6f\n", p.strategy.describe().c_str(),
                    p.profile.spearman);
      }
      return kOk;
    }
    div2vec::run_pipeline(config, options, div2vec::parse_stage(cmd));
    if (cmd == "report") {
      std::ifstream in(std::filesystem::path(flags.out_dir) / "report" / "report.csv");
      std::cout << in.rdbuf();
    }
    return kOk;
  } catch (const div2vec::StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageError;
  } catch (const div2vec::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}
