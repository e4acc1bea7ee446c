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

#include "div2vec/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include "div2vec/synthetic.hpp"

namespace div2vec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kLockFile = ".lock";
constexpr const char* kPolarities[] = {"positive", "negative"};

const char* stage_dir(Stage s) {
  switch (s) {
    case Stage::kIngest:
      return "ingest";
    case Stage::kWalk:
      return "walks";
    case Stage::kEmbed:
      return "embeddings";
    case Stage::kEdges:
      return "features";
    case Stage::kFit:
      return "models";
    case Stage::kEvaluate:
      return "evaluation";
    case Stage::kReport:
      return "report";
  }
  return "";
}

std::ofstream open_output(const fs::path& path,
                          std::ios::openmode mode = std::ios::out) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path,
                      std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

void close_checked(std::ofstream& out, const fs::path& path) {
  out.close();
  if (!out) throw std::runtime_error("error writing " + path.string());
}

std::string hash_string(const std::string& s) {
  Fnv1a h;
  h.update(s);
  return h.hex();
}

// Records what a stage wrote and persists the manifest after every stage.
class Manifest {
 public:
  explicit Manifest(fs::path dir) : dir_(std::move(dir)) {
    auto path = dir_ / kManifest;
    if (fs::exists(path)) {
      try {
        auto in = open_in(path);
        doc_ = json::parse(in);
      } catch (const std::exception&) {
        doc_ = json::object();
      }
    }
    if (!doc_.is_object()) doc_ = json::object();
    if (!doc_.contains("stages")) doc_["stages"] = json::object();
  }

  bool up_to_date(const std::string& stage, const std::string& key) const {
    const auto& stages = doc_.at("stages");
    if (!stages.contains(stage)) return false;
    const auto& entry = stages.at(stage);
    if (entry.value("key", "") != key) return false;
    for (const auto& a : entry.at("artifacts")) {
      fs::path p = dir_ / a.at("path").get<std::string>();
      if (!fs::exists(p) || hash_file(p) != a.at("hash").get<std::string>()) {
        return false;
      }
    }
    return true;
  }

  std::string key_of(const std::string& stage) const {
    const auto& stages = doc_.at("stages");
    return stages.contains(stage) ? stages.at(stage).value("key", "") : "";
  }

  void forget(const std::string& stage) {
    doc_["stages"].erase(stage);
    save();
  }

  void record(const std::string& stage, const std::string& key,
              const std::vector<fs::path>& artifacts) {
    json list = json::array();
    std::vector<fs::path> sorted = artifacts;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& p : sorted) {
      list.push_back({{"path", fs::relative(p, dir_).generic_string()},
                      {"hash", hash_file(p)},
                      {"bytes", fs::file_size(p)}});
    }
    doc_["stages"][stage] = {{"key", key}, {"artifacts", list}};
    save();
  }

  void set_header(const ExperimentConfig& config) {
    doc_["config"] = config.to_json();
    doc_["config_hash"] = hash_string(doc_["config"].dump());
    doc_["seeds"] = {{"base", config.seed},
                     {"split", config.resolved_split_seed()},
                     {"walk", config.resolved_walk_seed()},
                     {"embed", config.resolved_embed_seed()},
                     {"classifier", config.resolved_classifier_seed()}};
    doc_["format"] = "div2vec-manifest 1";
  }

  void save() const {
    auto tmp = dir_ / (std::string(kManifest) + ".tmp");
    {
      auto out = open_output(tmp);
      out << doc_.dump(2) << '\n';
      close_checked(out, tmp);
    }
    fs::rename(tmp, dir_ / kManifest);
  }

 private:
  fs::path dir_;
  json doc_;
};

struct Context {
  const ExperimentConfig& config;
  const RunOptions& options;
  fs::path dir;
  Manifest manifest;
  PipelineResult result;

  void log(const std::string& msg) const {
    if (options.log) *options.log << msg << '\n' << std::flush;
  }
};

// Runs one stage unless the manifest shows identical inputs and intact
// artifacts. `body` returns the list of files it wrote.
void run_stage(Context& ctx, Stage stage, const std::string& key,
               const std::function<std::vector<fs::path>()>& body) {
  const std::string name = to_string(stage);
  if (!ctx.options.force && ctx.manifest.up_to_date(name, key)) {
    ctx.log("[" + name + "] cached");
    ctx.result.cached.push_back(stage);
    return;
  }
  ctx.log("[" + name + "] running");
  ctx.manifest.forget(name);
  fs::remove_all(ctx.dir / stage_dir(stage));
  std::vector<fs::path> artifacts;
  try {
    artifacts = body();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  ctx.manifest.record(name, key, artifacts);
  ctx.result.executed.push_back(stage);
}

std::string stage_key(const std::string& stage, const json& slice,
                      std::initializer_list<std::string> upstream) {
  Fnv1a h;
  h.update(stage);
  h.update("\n");
  h.update(slice.dump());
  for (const auto& u : upstream) {
    h.update("\n");
    h.update(u);
  }
  return h.hex();
}

// ---------------------------------------------------------------------------
// Artifact paths.

fs::path idmap_path(const fs::path& d) { return d / "ingest" / "idmap.tsv"; }
fs::path labeled_path(const fs::path& d) {
  return d / "ingest" / "labeled_edges.csv";
}
fs::path graph_path(const fs::path& d, const std::string& pol) {
  return d / "ingest" / (pol + "_train.tsv");
}
fs::path walk_path(const fs::path& d, const std::string& m, const std::string& pol) {
  return d / "walks" / (m + "." + pol + ".txt");
}
fs::path emb_path(const fs::path& d, const std::string& m, const std::string& pol) {
  return d / "embeddings" / (m + "." + pol + ".emb");
}
fs::path emb_bin_path(const fs::path& d, const std::string& m,
                      const std::string& pol) {
  return d / "embeddings" / (m + "." + pol + ".bin");
}
fs::path model_path(const fs::path& d, const std::string& m, EdgeOperator op) {
  return d / "models" / (m + "." + to_string(op) + ".mlp");
}
fs::path eval_path(const fs::path& d, const std::string& kind,
                   const std::string& m, EdgeOperator op, const char* ext) {
  return d / "evaluation" / kind / (m + "." + to_string(op) + ext);
}

IdMap load_idmap(const fs::path& d) {
  auto in = open_in(idmap_path(d));
  return IdMap::read(in);
}

LabeledEdgeSet load_labeled(const fs::path& d) {
  auto in = open_in(labeled_path(d));
  return LabeledEdgeSet::read_csv(in);
}

Graph load_graph(const fs::path& d, const std::string& pol, const IdMap& ids) {
  auto in = open_in(graph_path(d, pol));
  auto edges = read_edge_list(in);
  return build_graph(edges, ids.size(), ids.partition());
}

EmbeddingMatrix load_embedding(const fs::path& d, const std::string& m,
                               const std::string& pol) {
  auto in = open_in(emb_path(d, m, pol));
  return EmbeddingMatrix::read_text(in);
}

MlpModel load_model(const fs::path& d, const std::string& m, EdgeOperator op) {
  auto in = open_in(model_path(d, m, op), std::ios::in | std::ios::binary);
  return MlpModel::read(in);
}

// ---------------------------------------------------------------------------
// Stages.

std::vector<fs::path> do_ingest(Context& ctx) {
  const auto& c = ctx.config;
  auto records = read_ratings_csv(c.ratings_path);
  std::vector<LabeledRating> labeled;
  if (c.filter_after_binarize) {
    labeled = filter_records(binarize_ratings(records, c.binarize), c.filter);
  } else {
    labeled = binarize_ratings(filter_records(std::move(records), c.filter),
                               c.binarize);
  }
  if (labeled.empty()) {
    throw std::runtime_error("no labeled records survive binarization and "
                             "filtering");
  }
  auto ids = IdMap::from_ratings(labeled);
  auto pairs = to_internal(labeled, ids);
  auto set = split_edges(pairs, c.test_fraction, c.resolved_split_seed());

  std::vector<fs::path> out;
  {
    auto p = idmap_path(ctx.dir);
    auto f = open_output(p);
    ids.write(f);
    close_checked(f, p);
    out.push_back(p);
  }
  {
    auto p = labeled_path(ctx.dir);
    auto f = open_output(p);
    set.write_csv(f);
    close_checked(f, p);
    out.push_back(p);
  }
  std::size_t positives = 0;
  for (const auto& e : set.edges) positives += e.label == Label::kPositive;
  for (const char* pol : kPolarities) {
    Label label = std::string(pol) == "positive" ? Label::kPositive : Label::kNegative;
    auto edges = set.select(Split::kTrain, label);
    auto g = build_graph(edges, ids.size(), ids.partition());
    auto p = graph_path(ctx.dir, pol);
    auto f = open_output(p);
    write_edge_list(g, f);
    close_checked(f, p);
    out.push_back(p);
  }
  {
    auto p = ctx.dir / "ingest" / "summary.json";
    auto f = open_output(p);
    f << json{{"raw_records", records.size()},
              {"labeled_records", labeled.size()},
              {"positive", positives},
              {"negative", labeled.size() - positives},
              {"users", ids.user_count()},
              {"items", ids.item_count()},
              {"test_edges", set.test_count()}}
             .dump(2)
      << '\n';
    close_checked(f, p);
    out.push_back(p);
  }
  ctx.log("[ingest] " + std::to_string(labeled.size()) + " labeled records, " +
          std::to_string(ids.user_count()) + " users, " +
          std::to_string(ids.item_count()) + " items");
  return out;
}

std::vector<fs::path> do_walk(Context& ctx) {
  const auto& c = ctx.config;
  auto ids = load_idmap(ctx.dir);
  std::vector<fs::path> out;
  for (std::size_t pi = 0; pi < 2; ++pi) {
    const std::string pol = kPolarities[pi];
    auto graph = load_graph(ctx.dir, pol, ids);
    for (const auto& m : c.methods) {
      CorpusOptions opts{c.walk_length, c.walks_per_node,
                         derive_seed(c.resolved_walk_seed(), pi),
                         std::max<std::size_t>(1, ctx.options.threads)};
      auto corpus = generate_corpus(graph, m.strategy, opts);
      auto p = walk_path(ctx.dir, m.name, pol);
      auto f = open_output(p);
      write_corpus(corpus, f);
      close_checked(f, p);
      out.push_back(p);
      ctx.log("[walk] " + m.name + "/" + pol + ": " +
              std::to_string(corpus.walks.size()) + " walks");
    }
  }
  return out;
}

std::vector<fs::path> do_embed(Context& ctx) {
  const auto& c = ctx.config;
  std::vector<fs::path> out;
  for (std::size_t pi = 0; pi < 2; ++pi) {
    const std::string pol = kPolarities[pi];
    for (const auto& m : c.methods) {
      WalkCorpus corpus;
      {
        auto in = open_in(walk_path(ctx.dir, m.name, pol));
        corpus = read_corpus(in);
      }
      SkipGramConfig sg = c.skipgram;
      sg.seed = derive_seed(c.resolved_embed_seed(), pi);
      sg.threads = c.deterministic ? 1 : std::max<std::size_t>(1, ctx.options.threads);
      auto trained = train_embeddings(corpus, sg);
      if (trained.loss_increased) {
        ctx.log("[embed] warning: " + m.name + "/" + pol +
                " mean epoch loss increased during training");
      }
      auto p = emb_path(ctx.dir, m.name, pol);
      {
        auto f = open_output(p);
        trained.matrix.write_text(f);
        close_checked(f, p);
      }
      auto pb = emb_bin_path(ctx.dir, m.name, pol);
      {
        auto f = open_output(pb, std::ios::out | std::ios::binary);
        trained.matrix.write_binary(f);
        close_checked(f, pb);
      }
      out.push_back(p);
      out.push_back(pb);
      ctx.log("[embed] " + m.name + "/" + pol + ": final epoch loss " +
              std::to_string(trained.epoch_losses.back()));
    }
  }
  return out;
}

std::vector<fs::path> do_edges(Context& ctx) {
  const auto& c = ctx.config;
  std::vector<fs::path> out;
  if (!c.dump_edge_features) return out;
  auto set = load_labeled(ctx.dir);
  for (const auto& m : c.methods) {
    auto pos = load_embedding(ctx.dir, m.name, "positive");
    auto neg = load_embedding(ctx.dir, m.name, "negative");
    for (auto op : c.operators) {
      auto p = ctx.dir / "features" / (m.name + "." + to_string(op) + ".csv");
      auto f = open_output(p);
      write_edge_features(op, set, pos, neg, f);
      close_checked(f, p);
      out.push_back(p);
    }
  }
  return out;
}

FeatureSet build_features(const LabeledEdgeSet& set, Split split,
                          EdgeOperator op, const EmbeddingMatrix& pos,
                          const EmbeddingMatrix& neg) {
  FeatureSet fs_;
  fs_.width = 2 * pos.dimension();
  std::vector<double> f(fs_.width);
  for (const auto& e : set.edges) {
    if (e.split != split) continue;
    edge_feature(op, e.u, e.v, pos, neg, f);
    fs_.add(f, e.label == Label::kPositive);
  }
  return fs_;
}

std::vector<fs::path> do_fit(Context& ctx) {
  const auto& c = ctx.config;
  auto set = load_labeled(ctx.dir);
  std::vector<fs::path> out;
  for (const auto& m : c.methods) {
    auto pos = load_embedding(ctx.dir, m.name, "positive");
    auto neg = load_embedding(ctx.dir, m.name, "negative");
    for (auto op : c.operators) {
      auto train = build_features(set, Split::kTrain, op, pos, neg);
      TrainConfig tc = c.classifier;
      tc.seed = c.resolved_classifier_seed();
      auto trained = train_classifier(train, tc);
      auto p = model_path(ctx.dir, m.name, op);
      auto f = open_output(p, std::ios::out | std::ios::binary);
      trained.model.write(f);
      close_checked(f, p);
      out.push_back(p);
      ctx.log("[fit] " + m.name + "/" + to_string(op) + ": final loss " +
              std::to_string(trained.epoch_losses.back()));
    }
  }
  return out;
}

// Top-k for many users, split across threads; each user's list depends only
// on that user, so the result is independent of the thread count.
RecommendationTable parallel_topk(
    const MlpModel& model, EdgeOperator op, const EmbeddingMatrix& pos,
    const EmbeddingMatrix& neg, const std::vector<NodeId>& users,
    const std::vector<NodeId>& items,
    const std::unordered_map<NodeId, std::unordered_set<NodeId>>& exclude,
    std::size_t k, std::size_t threads) {
  threads = std::max<std::size_t>(1, std::min(threads, users.size()));
  std::vector<RecommendationTable> parts(threads);
  auto work = [&](std::size_t t) {
    std::size_t b = users.size() * t / threads;
    std::size_t e = users.size() * (t + 1) / threads;
    std::span<const NodeId> chunk(users.data() + b, e - b);
    parts[t] = recommend_topk(model, op, pos, neg, chunk, items, exclude, k);
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  RecommendationTable table;
  table.k = k;
  for (auto& p : parts) {
    for (auto& u : p.users) table.users.push_back(std::move(u));
  }
  return table;
}

json metrics_json(const MetricReport& r) {
  json at = json::array();
  for (const auto& m : r.at_k) {
    at.push_back({{"k", m.k},
                  {"coverage", m.coverage},
                  {"entropy_diversity", m.entropy_diversity},
                  {"avg_ils", m.avg_ils ? json(*m.avg_ils) : json(nullptr)},
                  {"ils_users_excluded", m.ils_users_excluded}});
  }
  return {{"method", r.method}, {"operator", r.op}, {"auc", r.auc}, {"at_k", at}};
}

MetricReport metrics_from_json(const json& j) {
  MetricReport r;
  r.method = j.at("method").get<std::string>();
  r.op = j.at("operator").get<std::string>();
  r.auc = j.at("auc").get<double>();
  for (const auto& m : j.at("at_k")) {
    MetricReport::AtK a;
    a.k = m.at("k").get<std::size_t>();
    a.coverage = m.at("coverage").get<std::size_t>();
    a.entropy_diversity = m.at("entropy_diversity").get<double>();
    if (!m.at("avg_ils").is_null()) a.avg_ils = m.at("avg_ils").get<double>();
    a.ils_users_excluded = m.at("ils_users_excluded").get<std::size_t>();
    r.at_k.push_back(a);
  }
  return r;
}

std::vector<fs::path> do_evaluate(Context& ctx) {
  const auto& c = ctx.config;
  auto ids = load_idmap(ctx.dir);
  auto set = load_labeled(ctx.dir);

  ItemFeatures features;
  if (!c.item_features_path.empty()) {
    features = ItemFeatureMatrix::read_csv(c.item_features_path).by_node(ids);
  }

  std::vector<NodeId> users, items;
  {
    std::set<NodeId> chosen;
    for (const auto& e : set.edges) {
      if (c.eval_users == "all" || e.split == Split::kTest) {
        chosen.insert(ids.side(e.u) == Side::kUser ? e.u : e.v);
      }
    }
    users.assign(chosen.begin(), chosen.end());
    for (NodeId v = static_cast<NodeId>(ids.user_count()); v < ids.size(); ++v) {
      items.push_back(v);
    }
  }
  std::unordered_map<NodeId, std::unordered_set<NodeId>> exclude;
  for (const auto& e : set.edges) {
    if (e.split == Split::kTrain && e.label == Label::kPositive) {
      NodeId u = ids.side(e.u) == Side::kUser ? e.u : e.v;
      NodeId i = u == e.u ? e.v : e.u;
      exclude[u].insert(i);
    }
  }
  const std::size_t k_max = c.k_values.back();

  std::vector<fs::path> out;
  for (const auto& m : c.methods) {
    auto pos = load_embedding(ctx.dir, m.name, "positive");
    auto neg = load_embedding(ctx.dir, m.name, "negative");
    for (auto op : c.operators) {
      auto model = load_model(ctx.dir, m.name, op);
      MetricReport report{m.name, to_string(op), 0.0, {}};

      // Test-edge scores and AUC.
      std::vector<ScoredLabel> scored;
      {
        auto p = eval_path(ctx.dir, "scores", m.name, op, ".csv");
        auto f = open_output(p);
        f << "u,v,label,score\n";
        f << std::setprecision(std::numeric_limits<double>::max_digits10);
        std::vector<double> feat(2 * pos.dimension());
        for (const auto& e : set.edges) {
          if (e.split != Split::kTest) continue;
          edge_feature(op, e.u, e.v, pos, neg, feat);
          double s = mlp_forward(model, feat);
          scored.push_back({s, e.label == Label::kPositive});
          f << e.u << ',' << e.v << ','
            << (e.label == Label::kPositive ? "pos" : "neg") << ',' << s << '\n';
        }
        close_checked(f, p);
        out.push_back(p);
      }
      report.auc = auc(scored);

      auto table = parallel_topk(model, op, pos, neg, users, items, exclude,
                                 k_max, ctx.options.threads);
      {
        auto p = eval_path(ctx.dir, "recommendations", m.name, op, ".csv");
        auto f = open_output(p);
        table.write_csv(f);
        close_checked(f, p);
        out.push_back(p);
      }
      for (std::size_t k : c.k_values) {
        auto t = table.truncated(k);
        MetricReport::AtK a;
        a.k = k;
        a.coverage = coverage(t);
        // Entropy diversity needs uniform list lengths; users with fewer
        // than k candidates are left out of it.
        RecommendationTable full;
        full.k = k;
        for (const auto& u : t.users) {
          if (u.items.size() == k) full.users.push_back(u);
        }
        if (!full.users.empty()) {
          a.entropy_diversity = entropy_diversity(full, full.users.size(), k);
        }
        if (k >= 2 && !features.empty()) {
          try {
            auto ils = average_ils(t, features);
            a.avg_ils = ils.value;
            a.ils_users_excluded = ils.users_excluded;
          } catch (const std::invalid_argument&) {
            a.ils_users_excluded = t.users.size();
          }
        }
        report.at_k.push_back(a);
      }
      {
        auto p = eval_path(ctx.dir, "metrics", m.name, op, ".json");
        auto f = open_output(p);
        f << metrics_json(report).dump(2) << '\n';
        close_checked(f, p);
        out.push_back(p);
      }
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", report.auc);
      ctx.log("[evaluate] " + m.name + "/" + to_string(op) + ": auc " + buf);
      ctx.result.reports.push_back(std::move(report));
    }
  }
  return out;
}

std::vector<MetricReport> load_reports(const Context& ctx) {
  std::vector<MetricReport> reports;
  for (const auto& m : ctx.config.methods) {
    for (auto op : ctx.config.operators) {
      auto in = open_in(eval_path(ctx.dir, "metrics", m.name, op, ".json"));
      reports.push_back(metrics_from_json(json::parse(in)));
    }
  }
  return reports;
}

std::vector<fs::path> do_report(Context& ctx) {
  auto reports = load_reports(ctx);
  std::vector<fs::path> out;
  auto p = ctx.dir / "report" / "report.csv";
  {
    auto f = open_output(p);
    write_metric_report(reports, f);
    close_checked(f, p);
  }
  out.push_back(p);
  auto notes = ctx.dir / "report" / "notes.txt";
  {
    auto f = open_output(notes);
    f << "ILS is the mean pairwise (1 - cosine) of item feature vectors; "
         "larger means more dissimilar items.\n";
    for (const auto& r : reports) {
      for (const auto& a : r.at_k) {
        if (a.ils_users_excluded > 0) {
          f << r.method << ',' << r.op << ",ils_" << a.k << ": "
            << a.ils_users_excluded
            << " users excluded (fewer than 2 items with features)\n";
        }
      }
    }
    close_checked(f, notes);
  }
  out.push_back(notes);
  return out;
}

json ingest_slice(const ExperimentConfig& c) {
  auto j = c.to_json();
  return {{"ratings_hash", hash_file(c.ratings_path)},
          {"binarize", j["binarize"]},
          {"filter", j["filter"]},
          {"test_fraction", c.test_fraction},
          {"split_seed", c.resolved_split_seed()}};
}

}  // namespace

std::string to_string(Stage stage) {
  switch (stage) {
    case Stage::kIngest:
      return "ingest";
    case Stage::kWalk:
      return "walk";
    case Stage::kEmbed:
      return "embed";
    case Stage::kEdges:
      return "edges";
    case Stage::kFit:
      return "fit";
    case Stage::kEvaluate:
      return "evaluate";
    case Stage::kReport:
      return "report";
  }
  return "";
}

Stage parse_stage(const std::string& name) {
  for (auto s : {Stage::kIngest, Stage::kWalk, Stage::kEmbed, Stage::kEdges,
                 Stage::kFit, Stage::kEvaluate, Stage::kReport}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown stage '" + name + "'");
}

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  Fnv1a h;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    h.update(std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return h.hex();
}

OutputLock::OutputLock(const fs::path& dir) : path_(dir / kLockFile) {
  fs::create_directories(dir);
  int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw ConfigError("output directory " + dir.string() +
                        " is locked by another run (remove " + path_.string() +
                        " if that run is gone)");
    }
    throw ConfigError("cannot create lock " + path_.string() + ": " +
                      std::strerror(errno));
  }
  std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

PipelineResult run_pipeline(const ExperimentConfig& config,
                            const RunOptions& options, Stage last) {
  config.validate();
  if (options.out_dir.empty()) throw ConfigError("no output directory given");
  OutputLock lock(options.out_dir);
  Context ctx{config, options, options.out_dir, Manifest(options.out_dir), {}};
  ctx.manifest.set_header(config);
  ctx.manifest.save();
  auto cfg = config.to_json();

  std::string ingest_key;
  try {
    ingest_key = stage_key("ingest", ingest_slice(config), {});
  } catch (const std::exception& e) {
    throw StageError("ingest", e.what());
  }
  run_stage(ctx, Stage::kIngest, ingest_key, [&] { return do_ingest(ctx); });
  if (last == Stage::kIngest) return ctx.result;

  auto walk_key = stage_key(
      "walk",
      {{"walk", cfg["walk"]}, {"seed", config.resolved_walk_seed()},
       {"methods", cfg["methods"]}},
      {ingest_key});
  run_stage(ctx, Stage::kWalk, walk_key, [&] { return do_walk(ctx); });
  if (last == Stage::kWalk) return ctx.result;

  json embed_slice = {{"skipgram", cfg["skipgram"]},
                      {"seed", config.resolved_embed_seed()},
                      {"deterministic", config.deterministic}};
  if (!config.deterministic) embed_slice["threads"] = options.threads;
  auto embed_key = stage_key("embed", embed_slice, {walk_key});
  run_stage(ctx, Stage::kEmbed, embed_key, [&] { return do_embed(ctx); });
  if (last == Stage::kEmbed) return ctx.result;

  auto edges_key = stage_key(
      "edges",
      {{"operators", cfg["evaluation"]["operators"]},
       {"dump", config.dump_edge_features}},
      {embed_key, ingest_key});
  run_stage(ctx, Stage::kEdges, edges_key, [&] { return do_edges(ctx); });
  if (last == Stage::kEdges) return ctx.result;

  auto fit_key = stage_key(
      "fit",
      {{"classifier", cfg["classifier"]},
       {"seed", config.resolved_classifier_seed()},
       {"operators", cfg["evaluation"]["operators"]}},
      {embed_key, ingest_key});
  run_stage(ctx, Stage::kFit, fit_key, [&] { return do_fit(ctx); });
  if (last == Stage::kFit) return ctx.result;

  std::string features_hash;
  if (!config.item_features_path.empty()) {
    try {
      features_hash = hash_file(config.item_features_path);
    } catch (const std::exception& e) {
      throw StageError("evaluate", e.what());
    }
  }
  auto eval_key = stage_key(
      "evaluate",
      {{"k", cfg["evaluation"]["k"]},
       {"users", config.eval_users},
       {"operators", cfg["evaluation"]["operators"]},
       {"features_hash", features_hash}},
      {fit_key, embed_key, ingest_key});
  run_stage(ctx, Stage::kEvaluate, eval_key, [&] { return do_evaluate(ctx); });
  if (ctx.result.reports.empty()) {
    try {
      ctx.result.reports = load_reports(ctx);
    } catch (const std::exception& e) {
      throw StageError("evaluate", e.what());
    }
  }
  if (last == Stage::kEvaluate) return ctx.result;

  auto report_key = stage_key("report", json::object(), {eval_key});
  run_stage(ctx, Stage::kReport, report_key, [&] { return do_report(ctx); });
  return ctx.result;
}

std::vector<Figure2Profile> run_figure2(const ExperimentConfig& config,
                                        const RunOptions& options) {
  config.validate(config.figure2.graph != "preferential_attachment");
  const auto& f2 = config.figure2;
  std::optional<Graph> graph;
  std::string graph_key;
  if (f2.graph == "preferential_attachment") {
    graph = preferential_attachment_bipartite(
        f2.pa_users, f2.pa_items, f2.pa_mean_degree, f2.pa_attractiveness,
        config.resolved_walk_seed());
    graph_key = "pa";
  } else {
    run_pipeline(config, options, Stage::kIngest);
  }

  OutputLock lock(options.out_dir);
  Context ctx{config, options, options.out_dir, Manifest(options.out_dir), {}};
  if (!graph) {
    graph_key = ctx.manifest.key_of("ingest");
    try {
      graph = load_graph(ctx.dir, f2.graph, load_idmap(ctx.dir));
    } catch (const std::exception& e) {
      throw StageError("figure2", e.what());
    }
  }
  auto cfg = config.to_json();
  auto key = stage_key("figure2",
                       {{"figure2", cfg["figure2"]},
                        {"walk", cfg["walk"]},
                        {"seed", config.resolved_walk_seed()}},
                       {graph_key});

  std::vector<Figure2Profile> profiles;
  auto body = [&] {
    std::vector<fs::path> out;
    auto summary_path = ctx.dir / "figure2" / "summary.csv";
    std::ostringstream summary;
    summary << "strategy,spearman\n";
    for (const auto& s : f2.strategies) {
      CorpusOptions opts{config.walk_length, config.walks_per_node,
                         config.resolved_walk_seed(),
                         std::max<std::size_t>(1, options.threads)};
      auto corpus = generate_corpus(*graph, s, opts);
      auto profile = frequency_profile(corpus, *graph);
      std::string name = s.describe();
      std::replace_if(name.begin(), name.end(),
                      [](char ch) { return ch == '(' || ch == ')' || ch == ',' || ch == '='; },
                      '_');
      while (!name.empty() && name.back() == '_') name.pop_back();
      auto p = ctx.dir / "figure2" / (name + ".csv");
      auto f = open_output(p);
      profile.write_csv(f);
      close_checked(f, p);
      out.push_back(p);
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f", profile.spearman);
      summary << '"' << s.describe() << "\"," << buf << '\n';
      ctx.log("[figure2] " + s.describe() + ": spearman " + buf);
      profiles.push_back({s, std::move(profile)});
    }
    auto f = open_output(summary_path);
    f << summary.str();
    close_checked(f, summary_path);
    out.push_back(summary_path);
    return out;
  };

  const std::string name = "figure2";
  if (!options.force && ctx.manifest.up_to_date(name, key)) {
    ctx.log("[figure2] cached; recomputing profiles in memory");
  }
  ctx.manifest.forget(name);
  fs::remove_all(ctx.dir / "figure2");
  std::vector<fs::path> artifacts;
  try {
    artifacts = body();
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
  ctx.manifest.record(name, key, artifacts);
  return profiles;
}

}  // namespace div2vec
