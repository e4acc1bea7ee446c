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

// Experiment orchestration.
//
// A run is a chain of stages, each writing its artifacts into its own
// subdirectory of the output directory:
//
//   ingest      ingest/      id map, labeled train/test edges, training graphs
//   walk        walks/       one corpus per (method, polarity)
//   embed       embeddings/  one embedding per (method, polarity)
//   edges       features/    optional edge-feature dumps
//   fit         models/      one classifier per (method, operator)
//   evaluate    evaluation/  test scores, top-k tables, metrics
//   report      report/      report.csv in the comparison-table layout
//
// Every stage has a key hashed from its configuration slice, its input file
// contents and the keys of the stages it reads. manifest.json records keys,
// resolved seeds and a content hash for every artifact; a stage whose key and
// artifacts match the manifest is skipped unless forced. Later stages always
// read their inputs back from disk, so cached and fresh runs agree.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "div2vec/config.hpp"
#include "div2vec/diversity.hpp"
#include "div2vec/walker.hpp"

namespace div2vec {

enum class Stage { kIngest, kWalk, kEmbed, kEdges, kFit, kEvaluate, kReport };

std::string to_string(Stage stage);
Stage parse_stage(const std::string& name);

class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + " stage failed: " + message),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct RunOptions {
  std::filesystem::path out_dir;
  bool force = false;
  std::size_t threads = 1;
  std::ostream* log = nullptr;
};

struct PipelineResult {
  std::vector<MetricReport> reports;  // filled once evaluate has run
  std::vector<Stage> executed;
  std::vector<Stage> cached;
};

// Runs (or reuses) every stage up to and including `last`. Takes the output
// directory lock for the duration. Throws ConfigError for an invalid config
// or a held lock, StageError for a stage failure.
PipelineResult run_pipeline(const ExperimentConfig& config,
                            const RunOptions& options,
                            Stage last = Stage::kReport);

struct Figure2Profile {
  WalkStrategy strategy;
  FrequencyProfile profile;
};

// Degree-versus-frequency profiles, one CSV per strategy under figure2/,
// plus figure2/summary.csv with the rank correlations.
std::vector<Figure2Profile> run_figure2(const ExperimentConfig& config,
                                        const RunOptions& options);

// Exclusive lock on an output directory, held for the object's lifetime.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

// Content hash of a file (FNV-1a 64, hex).
std::string hash_file(const std::filesystem::path& path);

}  // namespace div2vec
