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
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "div2vec/graph.hpp"
#include "test_util.hpp"

using namespace div2vec;

namespace {

std::vector<std::uint32_t> degrees_of(const Graph& g) { return g.degrees(); }

void check_invariants(const Graph& g) {
  auto off = g.offsets();
  REQUIRE(off.size() == g.node_count() + 1);
  CHECK(off.back() == g.neighbor_array().size());
  std::uint64_t sum = 0;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    CHECK(off[v] <= off[v + 1]);
    CHECK(g.degree(v) == off[v + 1] - off[v]);
    sum += g.degree(v);
    auto n = g.neighbors(v);
    for (std::size_t i = 0; i < n.size(); ++i) {
      CHECK(n[i] != v);
      if (i > 0) CHECK(n[i - 1] < n[i]);
      CHECK(g.has_edge(n[i], v));
      if (g.has_partition()) {
        CHECK(g.partition()[v] != g.partition()[n[i]]);
      }
    }
  }
  CHECK(sum == 2 * g.edge_count());
}

}  // namespace

TEST_CASE("build_graph: path, duplicate and star examples") {
  std::vector<Edge> path{{0, 1}, {1, 2}};
  auto g = build_graph(path);
  CHECK(degrees_of(g) == std::vector<std::uint32_t>{1, 2, 1});
  check_invariants(g);

  std::vector<Edge> dup{{0, 1}, {1, 0}};
  auto d = build_graph(dup);
  CHECK(d.edge_count() == 1);
  CHECK(degrees_of(d) == std::vector<std::uint32_t>{1, 1});

  std::vector<Edge> star{{0, 1}, {0, 2}, {3, 0}};
  auto s = build_graph(star);
  CHECK(degrees_of(s) == std::vector<std::uint32_t>{3, 1, 1, 1});
  CHECK(s.has_edge(0, 3));
  CHECK_FALSE(s.has_edge(1, 2));
}

TEST_CASE("build_graph: rejects self-loops and same-side edges") {
  std::vector<Edge> loop{{0, 1}, {2, 2}};
  CHECK_THROWS_AS(build_graph(loop), std::invalid_argument);

  std::vector<Side> part{Side::kUser, Side::kUser, Side::kItem};
  std::vector<Edge> bad{{0, 1}};
  CHECK_THROWS_AS(build_graph(bad, 3, part), std::invalid_argument);
  std::vector<Edge> ok{{0, 2}, {1, 2}};
  auto g = build_graph(ok, 3, part);
  CHECK(g.has_partition());
  check_invariants(g);
}

TEST_CASE("build_graph: trailing isolated nodes are kept") {
  std::vector<Edge> e{{0, 1}};
  auto g = build_graph(e, 5);
  CHECK(g.node_count() == 5);
  CHECK(g.degree(4) == 0);
  check_invariants(g);
}

TEST_CASE("graph invariants and edge-list round trip on random graphs") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = testutil::random_graph(rng, 2 + rng() % 30, 0.3);
    check_invariants(g);
    std::stringstream ss;
    write_edge_list(g, ss);
    auto edges = read_edge_list(ss);
    auto back = build_graph(edges, g.node_count());
    CHECK(back == g);
  }
}

TEST_CASE("bipartite graphs never join two nodes of one side") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = testutil::random_bipartite(rng, 3 + rng() % 10, 3 + rng() % 10, 0.4);
    check_invariants(g);
  }
}

TEST_CASE("read_edge_list: comments and blank separators") {
  std::istringstream in("# header\n0\t1\n1  2\n\n# tail\n");
  auto e = read_edge_list(in);
  CHECK(e == std::vector<Edge>{{0, 1}, {1, 2}});
  std::istringstream bad("0\n");
  CHECK_THROWS_AS(read_edge_list(bad), std::invalid_argument);
}

TEST_CASE("read_ratings_csv: header optional, half stars enforced") {
  std::istringstream with("userId,movieId,rating,timestamp\n1,10,4.5,99\n2,10,1.0,5\n");
  auto r = read_ratings_csv(with);
  REQUIRE(r.size() == 2);
  CHECK(r[0].user == "1");
  CHECK(r[0].item == "10");
  CHECK(r[0].rating == 4.5);
  std::istringstream without("1,10,4.5\n");
  CHECK(read_ratings_csv(without).size() == 1);
  std::istringstream off("1,10,4.25\n");
  CHECK_THROWS_AS(read_ratings_csv(off), std::invalid_argument);
  std::istringstream high("1,10,5.5\n");
  CHECK_THROWS_AS(read_ratings_csv(high), std::invalid_argument);
  std::istringstream zero("1,10,0\n");
  CHECK_THROWS_AS(read_ratings_csv(zero), std::invalid_argument);
}

TEST_CASE("binarize_ratings: threshold examples") {
  std::vector<RatingRecord> recs{{"u", "a", 4.5}, {"u", "b", 2.0}, {"u", "c", 3.5},
                                 {"u", "d", 4.0}, {"u", "e", 3.0}};
  auto out = binarize_ratings(recs, {});
  REQUIRE(out.size() == 4);
  CHECK(out[0] == LabeledRating{"u", "a", Label::kPositive});
  CHECK(out[1] == LabeledRating{"u", "b", Label::kNegative});
  CHECK(out[2] == LabeledRating{"u", "d", Label::kPositive});
  CHECK(out[3] == LabeledRating{"u", "e", Label::kNegative});

  BinarizeOptions strict;
  strict.strict = true;
  auto s = binarize_ratings(recs, strict);
  REQUIRE(s.size() == 2);
  CHECK(s[0].item == "a");
  CHECK(s[1].item == "b");

  BinarizeOptions inverted{3.0, 4.0, false};
  CHECK_THROWS_AS(binarize_ratings(recs, inverted), std::invalid_argument);
}

TEST_CASE("binarize_ratings: duplicates") {
  std::vector<RatingRecord> agree{{"u", "a", 4.5}, {"u", "a", 5.0}};
  CHECK(binarize_ratings(agree, {}).size() == 1);
  std::vector<RatingRecord> conflict{{"u", "a", 4.5}, {"u", "a", 1.0}};
  CHECK(binarize_ratings(conflict, {}).empty());
}

TEST_CASE("filter_records: examples") {
  auto make = [](const std::string& user, std::size_t n, std::size_t first_item) {
    std::vector<LabeledRating> out;
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({user, std::to_string(first_item + i), Label::kPositive});
    }
    return out;
  };
  FilterOptions opts{1, 10, 1000, true};

  auto few = make("a", 5, 0);
  auto keep = make("b", 12, 0);
  few.insert(few.end(), keep.begin(), keep.end());
  auto out = filter_records(few, opts);
  CHECK(out.size() == 12);
  CHECK(std::all_of(out.begin(), out.end(), [](auto& r) { return r.user == "b"; }));

  auto many = make("c", 1500, 0);
  CHECK(filter_records(many, opts).empty());

  std::vector<LabeledRating> boundary;
  for (int u = 0; u < 10; ++u) {
    auto r = make("u" + std::to_string(u), 10, 0);
    boundary.insert(boundary.end(), r.begin(), r.end());
  }
  CHECK(filter_records(boundary, FilterOptions{}) == boundary);
}

TEST_CASE("filter_records: fixed point versus single pass") {
  // A rates {1, 2}, B rates {1, 3}, C rates {3}. One item pass drops 2, one
  // user pass drops A and C, leaving B with items that now have one record.
  std::vector<LabeledRating> recs{{"A", "1", Label::kPositive},
                                  {"A", "2", Label::kPositive},
                                  {"B", "1", Label::kPositive},
                                  {"B", "3", Label::kPositive},
                                  {"C", "3", Label::kPositive}};
  FilterOptions single{2, 2, 1000, false};
  auto s = filter_records(recs, single);
  CHECK(s.size() == 2);
  FilterOptions fixed = single;
  fixed.fixed_point = true;
  CHECK(filter_records(recs, fixed).empty());
}

TEST_CASE("binarize then filter is independent of record order") {
  std::mt19937_64 rng(3);
  std::vector<RatingRecord> recs;
  for (int u = 0; u < 30; ++u) {
    for (int i = 0; i < 40; ++i) {
      if (rng() % 3 == 0) continue;
      recs.push_back({std::to_string(u), std::to_string(i),
                      0.5 * static_cast<double>(1 + rng() % 10)});
    }
  }
  FilterOptions opts{5, 5, 1000, true};
  auto base = filter_records(binarize_ratings(recs, {}), opts);
  std::set<std::tuple<std::string, std::string, Label>> expected;
  for (auto& r : base) expected.insert({r.user, r.item, r.label});
  for (int t = 0; t < 5; ++t) {
    std::shuffle(recs.begin(), recs.end(), rng);
    auto out = filter_records(binarize_ratings(recs, {}), opts);
    std::set<std::tuple<std::string, std::string, Label>> got;
    for (auto& r : out) got.insert({r.user, r.item, r.label});
    CHECK(got == expected);
  }
}

TEST_CASE("split_edges: counts, determinism and errors") {
  std::vector<LabeledPair> pairs;
  for (NodeId i = 0; i < 10; ++i) pairs.push_back({i, 100 + i, Label::kPositive});
  auto s = split_edges(pairs, 0.2, 5);
  CHECK(s.test_count() == 2);
  CHECK(s.edges.size() == 10);
  CHECK(s == split_edges(pairs, 0.2, 5));
  for (std::size_t i = 0; i < pairs.size(); ++i) CHECK(s.edges[i].u == pairs[i].u);

  std::vector<LabeledPair> two{{0, 1, Label::kPositive}, {0, 2, Label::kNegative}};
  auto h = split_edges(two, 0.5, 1);
  CHECK(h.test_count() == 1);

  std::vector<LabeledPair> one{{0, 1, Label::kPositive}};
  CHECK_THROWS_AS(split_edges(one, 0.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_edges(two, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_edges(two, 1.0, 1), std::invalid_argument);
  std::vector<LabeledPair> rep{{0, 1, Label::kPositive}, {1, 0, Label::kNegative}};
  CHECK_THROWS_AS(split_edges(rep, 0.5, 1), std::invalid_argument);
}

TEST_CASE("split_edges: test fraction tracks the configured ratio") {
  std::vector<LabeledPair> pairs;
  for (NodeId i = 0; i < 1234; ++i) pairs.push_back({i, 5000 + i, Label::kPositive});
  for (double f : {0.1, 0.2, 0.33, 0.5}) {
    auto s = split_edges(pairs, f, 9);
    CHECK(s.test_count() == static_cast<std::size_t>(std::llround(f * 1234)));
  }
}

TEST_CASE("LabeledEdgeSet CSV round trip and select") {
  LabeledEdgeSet s;
  s.edges = {{0, 3, Label::kPositive, Split::kTrain},
             {1, 3, Label::kNegative, Split::kTest},
             {2, 4, Label::kNegative, Split::kTrain}};
  std::stringstream ss;
  s.write_csv(ss);
  CHECK(LabeledEdgeSet::read_csv(ss) == s);
  CHECK(s.select(Split::kTrain) == std::vector<Edge>{{0, 3}, {2, 4}});
  CHECK(s.select(Split::kTrain, Label::kNegative) == std::vector<Edge>{{2, 4}});
  CHECK(s.test_count() == 1);
}

TEST_CASE("IdMap: users first, round trip, partition") {
  std::vector<LabeledRating> r{{"7", "x", Label::kPositive},
                               {"3", "y", Label::kNegative},
                               {"7", "y", Label::kPositive}};
  auto ids = IdMap::from_ratings(r);
  CHECK(ids.user_count() == 2);
  CHECK(ids.item_count() == 2);
  CHECK(*ids.user("3") == 0);
  CHECK(*ids.user("7") == 1);
  CHECK(*ids.item("x") == 2);
  CHECK_FALSE(ids.item("7").has_value());
  CHECK(ids.side(2) == Side::kItem);
  CHECK(ids.key(3) == "y");
  std::stringstream ss;
  ids.write(ss);
  CHECK(IdMap::read(ss) == ids);

  auto pairs = to_internal(r, ids);
  std::vector<Edge> edges;
  for (auto& p : pairs) edges.push_back({p.u, p.v});
  auto g = build_graph(edges, ids.size(), ids.partition());
  check_invariants(g);
}

TEST_CASE("ItemFeatureMatrix: dense vectors, validation") {
  std::istringstream in("movieId,tagId,relevance\n1,2,0.5\n1,10,0.25\n2,2,1.0\n");
  auto m = ItemFeatureMatrix::read_csv(in);
  CHECK(m.dimension() == 2);
  CHECK(m.item_count() == 2);
  CHECK(m.tags()[0] == "2");
  CHECK(m.tags()[1] == "10");
  REQUIRE(m.find("2") != nullptr);
  CHECK(*m.find("2") == std::vector<double>{1.0, 0.0});
  CHECK(m.find("3") == nullptr);

  std::istringstream range("1,1,1.5\n");
  CHECK_THROWS_AS(ItemFeatureMatrix::read_csv(range), std::invalid_argument);
  std::istringstream zero("1,1,0.0\n2,1,0.5\n");
  CHECK_THROWS_AS(ItemFeatureMatrix::read_csv(zero), std::invalid_argument);
}
