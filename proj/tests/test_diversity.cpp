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

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "div2vec/diversity.hpp"
#include "oracles.hpp"

using namespace div2vec;

namespace {

RecommendationTable table_of(const std::vector<std::vector<NodeId>>& lists) {
  RecommendationTable t;
  t.k = lists.empty() ? 0 : lists.front().size();
  for (std::size_t u = 0; u < lists.size(); ++u) {
    UserRecommendations r;
    r.user = static_cast<NodeId>(u);
    double s = 1.0;
    for (NodeId i : lists[u]) r.items.push_back({i, s -= 0.01});
    t.users.push_back(r);
  }
  return t;
}

// Same-user item lists from one fixed score table.
RecommendationTable scored_table(std::mt19937_64& rng, std::size_t users,
                                 std::size_t items, std::size_t k,
                                 std::map<std::pair<NodeId, NodeId>, double>& scores) {
  std::vector<NodeId> us, is;
  for (NodeId u = 0; u < users; ++u) us.push_back(u);
  for (NodeId i = 0; i < items; ++i) is.push_back(100 + i);
  if (scores.empty()) {
    std::uniform_int_distribution<int> d(0, 9);
    for (NodeId u : us) {
      for (NodeId i : is) scores[{u, i}] = d(rng);
    }
  }
  ItemScorer f = [&](NodeId u, NodeId i) { return scores.at({u, i}); };
  return recommend_topk(f, us, is, {}, k);
}

}  // namespace

TEST_CASE("coverage and entropy on the two-model example") {
  auto m1 = table_of({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  auto m2 = table_of({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  CHECK(coverage(m1) == 3);
  CHECK(coverage(m2) == 9);
  CHECK(coverage(RecommendationTable{}) == 0);
  CHECK(std::abs(entropy_diversity(m1, 3, 3) - std::log(3.0)) < 1e-12);
  CHECK(std::abs(entropy_diversity(m2, 3, 3) - std::log(9.0)) < 1e-12);
  CHECK(entropy_diversity(table_of({{4}}), 1, 1) == 0.0);
}

TEST_CASE("entropy rejects ragged lists") {
  auto t = table_of({{1, 2}, {3}});
  CHECK_THROWS_AS(entropy_diversity(t, 2, 2), std::invalid_argument);
}

TEST_CASE("entropy matches a counting oracle and its bounds") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t users = 1 + rng() % 8, k = 1 + rng() % 5, items = k + rng() % 6;
    std::vector<std::vector<NodeId>> lists;
    std::map<std::uint32_t, std::size_t> counts;
    for (std::size_t u = 0; u < users; ++u) {
      std::vector<NodeId> pool(items);
      std::iota(pool.begin(), pool.end(), NodeId{0});
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(k);
      for (NodeId i : pool) ++counts[i];
      lists.push_back(pool);
    }
    auto t = table_of(lists);
    double ed = entropy_diversity(t, users, k);
    CHECK(ed == doctest::Approx(oracle::entropy_from_counts(counts, users * k)).epsilon(1e-12));
    double bound = std::log(static_cast<double>(counts.size()));
    CHECK(ed >= 0.0);
    CHECK(ed <= bound + 1e-12);
    bool uniform = std::all_of(counts.begin(), counts.end(), [&](auto& c) {
      return c.second == counts.begin()->second;
    });
    CHECK((std::abs(ed - bound) < 1e-12) == uniform);

    // Permuting users and within-list order leaves it unchanged.
    auto shuffled = lists;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (auto& l : shuffled) std::shuffle(l.begin(), l.end(), rng);
    CHECK(entropy_diversity(table_of(shuffled), users, k) == doctest::Approx(ed).epsilon(1e-14));
  }
}

TEST_CASE("top-k: sorting, ties, truncation, exclusion") {
  std::vector<NodeId> users{0}, items{10, 11, 12};
  std::map<NodeId, double> s{{10, 0.5}, {11, 0.9}, {12, 0.1}};
  ItemScorer f = [&](NodeId, NodeId i) { return s.at(i); };
  auto t = recommend_topk(f, users, items, {}, 2);
  REQUIRE(t.users[0].items.size() == 2);
  CHECK(t.users[0].items[0].item == 11);
  CHECK(t.users[0].items[1].item == 10);

  auto all = recommend_topk(f, users, items, {}, 10);
  CHECK(all.users[0].items.size() == 3);

  s[12] = 0.9;
  auto tie = recommend_topk(f, users, items, {}, 2);
  CHECK(tie.users[0].items[0].item == 11);
  CHECK(tie.users[0].items[1].item == 12);

  std::unordered_map<NodeId, std::unordered_set<NodeId>> ex{{0, {11}}};
  auto e = recommend_topk(f, users, items, ex, 3);
  CHECK(e.users[0].items.size() == 2);
  CHECK(e.users[0].items[0].item == 12);

  std::unordered_map<NodeId, std::unordered_set<NodeId>> everything{{0, {10, 11, 12}}};
  auto none = recommend_topk(f, users, items, everything, 3);
  CHECK(none.users[0].items.empty());
  CHECK(none.users[0].no_candidates);
}

TEST_CASE("top-k lists are prefixes and coverage grows with k") {
  std::mt19937_64 rng(6);
  std::map<std::pair<NodeId, NodeId>, double> scores;
  auto big = scored_table(rng, 12, 30, 20, scores);
  std::size_t last = 0;
  for (std::size_t k = 1; k <= 20; ++k) {
    auto small = scored_table(rng, 12, 30, k, scores);
    auto cut = big.truncated(k);
    for (std::size_t u = 0; u < 12; ++u) CHECK(small.users[u].items == cut.users[u].items);
    std::size_t c = coverage(small);
    CHECK(c >= last);
    last = c;
  }
}

TEST_CASE("recommendation table CSV round trip") {
  auto t = table_of({{3, 1}, {2, 5}});
  std::stringstream ss;
  t.write_csv(ss);
  auto back = RecommendationTable::read_csv(ss);
  REQUIRE(back.users.size() == 2);
  CHECK(back.users[1].items.size() == 2);
  CHECK(back.users[1].items[1].item == 5);
  CHECK(back.users[0].items[0].score == t.users[0].items[0].score);
}

TEST_CASE("ILS examples") {
  ItemFeatures f{{1, {1, 0, 0}}, {2, {1, 0, 0}}, {3, {0, 1, 0}}, {4, {0, 0, 2}}};
  std::vector<NodeId> same{1, 2}, orth{1, 3}, three{1, 3, 4};
  CHECK(intra_list_similarity(same, f) == doctest::Approx(0.0));
  CHECK(intra_list_similarity(orth, f) == 1.0);
  CHECK(intra_list_similarity(three, f) == 1.0);
  std::vector<NodeId> missing{1, 9}, single{1};
  CHECK_THROWS_AS(intra_list_similarity(missing, f), std::invalid_argument);
  CHECK_THROWS_AS(intra_list_similarity(single, f), std::invalid_argument);
}

TEST_CASE("ILS: mean of pairwise dissimilarities") {
  // Unit vectors at angles whose cosines are 0.8, 0.6 and 0.4 pairwise would
  // need 3-d construction; use explicit vectors and a direct oracle.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 50; ++t) {
    ItemFeatures f;
    std::vector<NodeId> list;
    std::size_t n = 2 + rng() % 6;
    for (NodeId i = 0; i < n; ++i) {
      f[i] = {u(rng), u(rng), u(rng), u(rng)};
      list.push_back(i);
    }
    double sum = 0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        double d = 0, na = 0, nb = 0;
        for (int k = 0; k < 4; ++k) {
          d += f[a][k] * f[b][k];
          na += f[a][k] * f[a][k];
          nb += f[b][k] * f[b][k];
        }
        sum += 1.0 - d / std::sqrt(na * nb);
        ++pairs;
      }
    }
    double ils = intra_list_similarity(list, f);
    CHECK(ils == doctest::Approx(sum / pairs).epsilon(1e-12));
    CHECK(ils >= -1e-12);
    CHECK(ils <= 1.0 + 1e-12);
  }
}

TEST_CASE("ILS: three-item list with pairwise dissimilarity 0.2, 0.4, 0.6") {
  // Build vectors with prescribed cosines 0.8 (1,2), 0.6 (1,3), 0.4 (2,3).
  double c12 = 0.8, c13 = 0.6, c23 = 0.4;
  std::vector<double> v1{1, 0, 0};
  std::vector<double> v2{c12, std::sqrt(1 - c12 * c12), 0};
  double y = (c23 - c13 * c12) / v2[1];
  std::vector<double> v3{c13, y, std::sqrt(1 - c13 * c13 - y * y)};
  // Shift to nonnegative is not needed for the formula itself.
  ItemFeatures f{{1, v1}, {2, v2}, {3, v3}};
  std::vector<NodeId> list{1, 2, 3};
  CHECK(intra_list_similarity(list, f) == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("average ILS") {
  ItemFeatures f{{1, {1, 0}}, {2, {0, 1}}, {3, {1, 1}}, {4, {1, 0}}};
  auto shared = table_of({{1, 2}, {1, 2}});
  CHECK(average_ils(shared, f).value == 1.0);

  auto two = table_of({{1, 4}, {1, 2}});
  auto r = average_ils(two, f);
  CHECK(r.value == doctest::Approx(0.5));
  CHECK(r.users_used == 2);

  auto partly = table_of({{1, 9}, {1, 2}});
  auto p = average_ils(partly, f);
  CHECK(p.users_excluded == 1);
  CHECK(p.users_used == 1);
  CHECK(p.value == 1.0);

  auto hopeless = table_of({{8, 9}});
  CHECK_THROWS_AS(average_ils(hopeless, f), std::invalid_argument);

  // The two-model example with orthonormal features gives 1 for everyone.
  ItemFeatures ortho;
  for (NodeId i = 1; i <= 3; ++i) {
    std::vector<double> e(3, 0.0);
    e[i - 1] = 1.0;
    ortho[i] = e;
  }
  auto m1 = table_of({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}});
  CHECK(average_ils(m1, ortho).value == 1.0);
}

TEST_CASE("dissimilarity rejects zero vectors") {
  std::vector<double> z{0, 0}, a{1, 0};
  CHECK_THROWS_AS(dissimilarity(z, a), std::invalid_argument);
}

TEST_CASE("metric report layout") {
  MetricReport r{"div2vec", "weighted_l2", 0.75, {}};
  r.at_k.push_back({1, 10, 2.0, std::nullopt, 0});
  r.at_k.push_back({10, 40, 3.5, 0.25, 0});
  r.at_k.push_back({50, 90, 4.0, 0.5, 0});
  std::vector<MetricReport> v{r};
  std::ostringstream out;
  write_metric_report(v, out);
  CHECK(out.str() ==
        "method,operator,auc,co_1,ed_1,co_10,ed_10,ils_10,co_50,ed_50,ils_50\n"
        "div2vec,weighted_l2,0.750000,10,2.000000,40,3.500000,0.250000,90,"
        "4.000000,0.500000\n");
}
