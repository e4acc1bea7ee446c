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

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "div2vec/pipeline.hpp"
#include "div2vec/synthetic.hpp"
#include "test_util.hpp"

using namespace div2vec;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Small synthetic dataset written once per process.
const fs::path& dataset() {
  static const fs::path dir = [] {
    auto d = testutil::scratch_dir("pipeline_data");
    SyntheticRatingsConfig sc;
    sc.users = 60;
    sc.items = 90;
    sc.genres = 4;
    sc.tags = 8;
    sc.median_user_ratings = 25;
    sc.min_user_ratings = 12;
    sc.max_user_ratings = 60;
    sc.seed = 3;
    auto data = synthetic_movielens(sc);
    std::ofstream r(d / "ratings.csv"), t(d / "tags.csv");
    data.write_ratings_csv(r);
    data.write_tags_csv(t);
    return d;
  }();
  return dir;
}

ExperimentConfig small_config() {
  auto c = ExperimentConfig::defaults();
  c.ratings_path = (dataset() / "ratings.csv").string();
  c.item_features_path = (dataset() / "tags.csv").string();
  c.filter = {3, 3, 1000, true};
  c.walk_length = 10;
  c.walks_per_node = 2;
  c.methods = {{"deepwalk", WalkStrategy::uniform()},
               {"div2vec", WalkStrategy::degree_biased(DegreeFunction::kInverse)}};
  c.skipgram.dimension = 8;
  c.skipgram.epochs = 1;
  c.classifier.epochs = 2;
  c.operators = {EdgeOperator::kWeightedL2, EdgeOperator::kHadamard};
  c.k_values = {1, 5};
  return c;
}

RunOptions options_for(const fs::path& dir) {
  RunOptions o;
  o.out_dir = dir;
  o.threads = 2;
  return o;
}

std::set<std::string> files_on_disk(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    auto rel = fs::relative(e.path(), dir).generic_string();
    if (rel == "manifest.json" || rel == ".lock") continue;
    out.insert(rel);
  }
  return out;
}

std::set<std::string> files_in_manifest(const fs::path& dir) {
  auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  std::set<std::string> out;
  for (const auto& [stage, entry] : j.at("stages").items()) {
    for (const auto& a : entry.at("artifacts")) out.insert(a.at("path").get<std::string>());
  }
  return out;
}

}  // namespace

TEST_CASE("stage names") {
  for (auto s : {Stage::kIngest, Stage::kWalk, Stage::kEmbed, Stage::kEdges, Stage::kFit,
                 Stage::kEvaluate, Stage::kReport}) {
    CHECK(parse_stage(to_string(s)) == s);
  }
  CHECK_THROWS(parse_stage("train"));
}

TEST_CASE("full run: report grid, manifest, caching") {
  auto dir = testutil::scratch_dir("pipeline_full");
  auto cfg = small_config();
  auto result = run_pipeline(cfg, options_for(dir));
  CHECK(result.executed.size() == 7);
  CHECK(result.reports.size() == 4);

  auto report = slurp(dir / "report" / "report.csv");
  std::istringstream lines(report);
  std::string header, line;
  std::getline(lines, header);
  CHECK(header == "method,operator,auc,co_1,ed_1,co_5,ed_5,ils_5");
  std::map<std::string, int> rows_per_op;
  while (std::getline(lines, line)) {
    auto a = line.find(','), b = line.find(',', a + 1);
    ++rows_per_op[line.substr(a + 1, b - a - 1)];
  }
  CHECK(rows_per_op["weighted_l2"] == 2);
  CHECK(rows_per_op["hadamard"] == 2);

  // Manifest completeness in both directions.
  CHECK(files_on_disk(dir) == files_in_manifest(dir));
  auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest.contains("config_hash"));
  CHECK(manifest.at("seeds").at("walk") == cfg.resolved_walk_seed());
  CHECK(ExperimentConfig::from_json(manifest.at("config")) == cfg);
  CHECK_FALSE(fs::exists(dir / ".lock"));

  // Everything cached on a second run.
  auto again = run_pipeline(cfg, options_for(dir));
  CHECK(again.executed.empty());
  CHECK(again.cached.size() == 7);
  CHECK(again.reports.size() == 4);
  CHECK(slurp(dir / "report" / "report.csv") == report);

  // A classifier change reruns only the stages downstream of it.
  cfg.classifier.epochs = 3;
  auto partial = run_pipeline(cfg, options_for(dir));
  CHECK(partial.executed == std::vector<Stage>{Stage::kFit, Stage::kEvaluate, Stage::kReport});
  CHECK(files_on_disk(dir) == files_in_manifest(dir));

  // A tampered artifact is detected and rebuilt.
  {
    std::ofstream out(dir / "walks" / "deepwalk.positive.txt", std::ios::app);
    out << "0 1\n";
  }
  auto repaired = run_pipeline(cfg, options_for(dir));
  CHECK(std::find(repaired.executed.begin(), repaired.executed.end(), Stage::kWalk) !=
        repaired.executed.end());

  // --force recomputes everything.
  auto forced_opts = options_for(dir);
  forced_opts.force = true;
  CHECK(run_pipeline(cfg, forced_opts).executed.size() == 7);
  fs::remove_all(dir);
}

TEST_CASE("stopping early runs only the requested prefix") {
  auto dir = testutil::scratch_dir("pipeline_prefix");
  auto r = run_pipeline(small_config(), options_for(dir), Stage::kWalk);
  CHECK(r.executed == std::vector<Stage>{Stage::kIngest, Stage::kWalk});
  CHECK(fs::exists(dir / "walks" / "div2vec.negative.txt"));
  CHECK_FALSE(fs::exists(dir / "embeddings"));
  fs::remove_all(dir);
}

TEST_CASE("deterministic mode reproduces reports byte for byte") {
  auto a = testutil::scratch_dir("pipeline_det_a");
  auto b = testutil::scratch_dir("pipeline_det_b");
  auto cfg = small_config();
  run_pipeline(cfg, options_for(a));
  auto ob = options_for(b);
  ob.threads = 1;
  run_pipeline(cfg, ob);
  CHECK(slurp(a / "report" / "report.csv") == slurp(b / "report" / "report.csv"));
  CHECK(slurp(a / "embeddings" / "div2vec.positive.bin") ==
        slurp(b / "embeddings" / "div2vec.positive.bin"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("edge-feature dumps when enabled") {
  auto dir = testutil::scratch_dir("pipeline_edges");
  auto cfg = small_config();
  cfg.dump_edge_features = true;
  run_pipeline(cfg, options_for(dir), Stage::kEdges);
  auto csv = slurp(dir / "features" / "div2vec.hadamard.csv");
  CHECK(csv.rfind("u,v,label,f1,", 0) == 0);
  CHECK(csv.find(",f16\n") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("missing ratings file fails in ingest and nothing else runs") {
  auto dir = testutil::scratch_dir("pipeline_missing");
  auto cfg = small_config();
  cfg.ratings_path = (dir / "nope.csv").string();
  try {
    run_pipeline(cfg, options_for(dir));
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage() == "ingest");
  }
  CHECK_FALSE(fs::exists(dir / "walks"));
  CHECK_FALSE(fs::exists(dir / ".lock"));
  fs::remove_all(dir);
}

TEST_CASE("invalid config is rejected before any work") {
  auto dir = testutil::scratch_dir("pipeline_invalid");
  auto cfg = small_config();
  cfg.k_values = {};
  CHECK_THROWS_AS(run_pipeline(cfg, options_for(dir)), ConfigError);
  CHECK_FALSE(fs::exists(dir / "ingest"));
  fs::remove_all(dir);
}

TEST_CASE("output directory lock") {
  auto dir = testutil::scratch_dir("pipeline_lock");
  {
    OutputLock held(dir);
    CHECK_THROWS_AS(OutputLock{dir}, ConfigError);
    CHECK_THROWS_AS(run_pipeline(small_config(), options_for(dir)), ConfigError);
  }
  CHECK_NOTHROW(OutputLock{dir});
  fs::remove_all(dir);
}

TEST_CASE("figure2 profiles") {
  auto dir = testutil::scratch_dir("pipeline_fig2");
  auto cfg = small_config();
  cfg.ratings_path.clear();
  cfg.figure2.graph = "preferential_attachment";
  cfg.figure2.pa_users = 100;
  cfg.figure2.pa_items = 100;
  auto profiles = run_figure2(cfg, options_for(dir));
  REQUIRE(profiles.size() == 3);
  std::size_t csvs = 0;
  for (const auto& e : fs::directory_iterator(dir / "figure2")) csvs += e.path().extension() == ".csv";
  CHECK(csvs == 4);  // three profiles plus the summary
  auto summary = slurp(dir / "figure2" / "summary.csv");
  CHECK(summary.rfind("strategy,spearman\n", 0) == 0);
  CHECK(profiles[0].profile.spearman > profiles[1].profile.spearman);
  CHECK(files_on_disk(dir) == files_in_manifest(dir));

  // From the ingested positive graph.
  auto dir2 = testutil::scratch_dir("pipeline_fig2_pos");
  auto cfg2 = small_config();
  auto p2 = run_figure2(cfg2, options_for(dir2));
  CHECK(p2.size() == 3);
  CHECK(fs::exists(dir2 / "ingest" / "positive_train.tsv"));
  CHECK(files_on_disk(dir2) == files_in_manifest(dir2));
  fs::remove_all(dir);
  fs::remove_all(dir2);
}
