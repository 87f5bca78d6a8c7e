// Copyright 2026 The deltald Authors.
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

#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "deltald/scheduler.h"
#include "deltald/serialization.h"
#include "testing.h"

namespace deltald {
namespace {

using testing::Ex;

std::vector<Iri> Resources(const std::string &prefix, std::size_t n) {
  std::vector<Iri> out;
  for (std::size_t i = 0; i < n; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04zu", i);
    out.push_back(Ex(prefix + buf));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Region MakeRegion(ChangeType t, Bin bin, const std::string &concept_name,
                  std::vector<Iri> members) {
  Region r{t, bin, {Ex(concept_name)}, {}, members};
  std::sort(r.resources.begin(), r.resources.end());
  r.members.emplace(Ex(concept_name), std::move(members));
  return r;
}

ConceptChangeProfile Profile(const std::string &c, PerChangeType<double> rates) {
  ConceptChangeProfile p{Ex(c)};
  for (ChangeType t : kAllChangeTypes) p.total_n[Index(t)] = 100;
  p.p_hat = rates;
  return p;
}

std::size_t Sum(const std::map<std::string, std::size_t> &q) {
  std::size_t s = 0;
  for (const auto &[k, v] : q) s += v;
  return s;
}

TEST_CASE("Use-case weights") {
  UseCaseWeights all;
  for (ChangeType t : kAllChangeTypes) CHECK(all.normalized(t) == doctest::Approx(0.2));
  auto w = UseCaseWeights::Parse("move=1,update=0.5");
  CHECK(w.raw(ChangeType::kMove) == 1.0);
  CHECK(w.raw(ChangeType::kUpdate) == 0.5);
  CHECK(w.raw(ChangeType::kCreate) == 0.0);
  CHECK_FALSE(w.active(ChangeType::kCreate));
  CHECK(w.normalized(ChangeType::kMove) == doctest::Approx(2.0 / 3.0));
  CHECK(UseCaseWeights::Parse(w.ToString()).values() == w.values());
  CHECK_THROWS_AS(UseCaseWeights::Parse("move=-1"), std::invalid_argument);
  CHECK_THROWS_AS(UseCaseWeights::Parse("move=0"), std::invalid_argument);
  CHECK_THROWS_AS(UseCaseWeights::Parse("jump=1"), std::invalid_argument);
  CHECK_THROWS_AS(UseCaseWeights::Parse("move"), std::invalid_argument);
  CHECK_THROWS_AS(Budget(0), std::invalid_argument);
}

TEST_CASE("Strategy names") {
  for (Strategy s : {Strategy::kRegion, Strategy::kAge, Strategy::kSize,
                     Strategy::kChangeRatio, Strategy::kRandom}) {
    CHECK(ParseStrategy(ToString(s)) == s);
  }
  CHECK(ParseStrategy("change_ratio") == Strategy::kChangeRatio);
  CHECK(!ParseStrategy("importance"));
}

TEST_CASE("Region scores") {
  SUBCASE("weight times mean rate times size") {
    RegionSet rs;
    rs.regions.push_back(MakeRegion(ChangeType::kMove, Bin::kHigh, "C", Resources("r", 50)));
    ProfileSet profiles = {Profile("C", {0.1, 0.1, 0.1, 0.2, 0.1})};
    auto scores = ScoreRegions(rs, profiles, UseCaseWeights::Parse("move=1"));
    CHECK(scores.at("move/high") == doctest::Approx(10.0));
  }
  SUBCASE("zero weight annihilates") {
    RegionSet rs;
    rs.regions.push_back(MakeRegion(ChangeType::kUpdate, Bin::kHigh, "C", Resources("r", 50)));
    ProfileSet profiles = {Profile("C", {0.5, 0.5, 0.5, 0.5, 0.5})};
    auto scores = ScoreRegions(rs, profiles, UseCaseWeights::Parse("move=1"));
    CHECK(scores.at("update/high") == 0.0);
  }
  SUBCASE("proportional to rate") {
    RegionSet rs;
    rs.regions.push_back(MakeRegion(ChangeType::kUpdate, Bin::kHigh, "A", Resources("a", 100)));
    rs.regions.push_back(MakeRegion(ChangeType::kUpdate, Bin::kLow, "B", Resources("b", 100)));
    ProfileSet profiles = {Profile("A", {0, 0, 0.3, 0, 0}), Profile("B", {0, 0, 0.1, 0, 0})};
    auto scores = ScoreRegions(rs, profiles, UseCaseWeights());
    CHECK(scores.at("update/high") / scores.at("update/low") == doctest::Approx(3.0));
  }
  SUBCASE("multi-typed resources count once at their best rate") {
    RegionSet rs;
    Region r{ChangeType::kUpdate, Bin::kHigh, {Ex("A"), Ex("B")}, {}, {}};
    r.members[Ex("A")] = {Ex("x"), Ex("y")};
    r.members[Ex("B")] = {Ex("y"), Ex("z")};
    r.resources = {Ex("x"), Ex("y"), Ex("z")};
    rs.regions.push_back(r);
    ProfileSet profiles = {Profile("A", {0, 0, 0.2, 0, 0}), Profile("B", {0, 0, 0.4, 0, 0})};
    auto scores = ScoreRegions(rs, profiles, UseCaseWeights::Parse("update=1"));
    CHECK(scores.at("update/high") == doctest::Approx(0.2 + 0.4 + 0.4));
  }
}

TEST_CASE("Largest remainder with exploration: 73 and 27") {
  // Hand-executed: exploration floor(0.1 * 100) = 10 -> 5 + 5; the other
  // 90 split 3:1 is 67.5 / 22.5 -> 67 / 22 with remainders tied at 0.5;
  // the tie goes to the higher score -> 68 / 22.
  auto q = AllocateBudget({{"a", 3.0}, {"b", 1.0}}, Budget(100), 0.1,
                          {{"a", 500}, {"b", 500}});
  CHECK(q.at("a") == 73);
  CHECK(q.at("b") == 27);
}

TEST_CASE("Single region is capped at its size") {
  auto q = AllocateBudget({{"a", 1.0}}, Budget(10), 0.0, {{"a", 1000}});
  CHECK(q.at("a") == 10);
  auto small = AllocateBudget({{"a", 1.0}}, Budget(10), 0.0, {{"a", 4}});
  CHECK(small.at("a") == 4);
}

TEST_CASE("Cap and redistribute: 3 and 97") {
  // Equal scores give 50 / 50; the size-3 region keeps 3 and passes the
  // remaining 47 to the other.
  auto q = AllocateBudget({{"a", 1.0}, {"b", 1.0}}, Budget(100), 0.0,
                          {{"a", 3}, {"b", 1000}});
  CHECK(q.at("a") == 3);
  CHECK(q.at("b") == 97);
}

TEST_CASE("Zero scores split evenly; bad epsilon rejected") {
  auto q = AllocateBudget({}, Budget(9), 0.0, {{"a", 100}, {"b", 100}, {"c", 100}});
  CHECK(q.at("a") == 3);
  CHECK(q.at("b") == 3);
  CHECK(q.at("c") == 3);
  CHECK_THROWS_AS(AllocateBudget({}, Budget(9), 1.0, {{"a", 1}}), std::invalid_argument);
  CHECK_THROWS_AS(AllocateBudget({}, Budget(9), -0.1, {{"a", 1}}), std::invalid_argument);
}

TEST_CASE("Least recently fetched first") {
  const auto rs = Resources("r", 5);
  FetchHistory h;
  SUBCASE("never fetched: smallest IRIs") {
    auto s = SelectResources(rs, 2, h);
    CHECK(s == std::vector<Iri>{rs[0], rs[1]});
  }
  SUBCASE("recently fetched one is left out") {
    h.RecordFetch(rs[0], 7, false, 3);
    auto s = SelectResources(rs, 4, h);
    CHECK(s == std::vector<Iri>{rs[1], rs[2], rs[3], rs[4]});
  }
  SUBCASE("older fetches come before newer ones") {
    h.RecordFetch(rs[0], 9, false, 3);
    h.RecordFetch(rs[1], 2, false, 3);
    h.RecordFetch(rs[2], 5, false, 3);
    h.RecordFetch(rs[3], 5, false, 3);
    auto s = SelectResources(rs, 5, h);
    CHECK(s == std::vector<Iri>{rs[4], rs[1], rs[2], rs[3], rs[0]});
  }
}

TEST_CASE("Fetch history bookkeeping") {
  FetchHistory h;
  h.RecordFetch(Ex("a"), 1, true, 4);
  h.RecordFetch(Ex("a"), 3, false, 6);
  const FetchRecord *r = h.Find(Ex("a"));
  REQUIRE(r != nullptr);
  CHECK(r->last_fetched_cycle == 3);
  CHECK(r->observed_change_count == 1);
  CHECK(r->observation_count == 2);
  CHECK(r->triple_count == 6);
  CHECK(h.Find(Ex("b")) == nullptr);
}

TEST_CASE("Baselines") {
  const auto all = Resources("r", 6);
  FetchHistory h;
  SUBCASE("age with no history is lexicographic") {
    auto p = BaselinePlan(Strategy::kAge, all, h, Budget(3), 0);
    REQUIRE(p.allocations.size() == 1);
    CHECK(p.allocations[0].key == "age");
    CHECK(p.Fetched() == std::vector<Iri>{all[0], all[1], all[2]});
  }
  SUBCASE("change ratio prefers the volatile resource") {
    const std::vector<Iri> two = {Ex("a"), Ex("b")};
    FetchRecord a{0, 3, 3, 1}, b{0, 0, 3, 1};
    h.Set(Ex("a"), a);
    h.Set(Ex("b"), b);
    auto p = BaselinePlan(Strategy::kChangeRatio, two, h, Budget(1), 1);
    CHECK(p.Fetched() == std::vector<Iri>{Ex("a")});
    h.Set(Ex("a"), FetchRecord{0, 0, 3, 1});
    h.Set(Ex("b"), FetchRecord{0, 2, 3, 1});
    CHECK(BaselinePlan(Strategy::kChangeRatio, two, h, Budget(1), 1).Fetched() ==
          std::vector<Iri>{Ex("b")});
  }
  SUBCASE("change ratio explores unobserved resources") {
    h.Set(all[0], FetchRecord{0, 1, 2, 1});
    auto p = BaselinePlan(Strategy::kChangeRatio, all, h, Budget(2), 1);
    CHECK(p.Fetched() == std::vector<Iri>{all[1], all[2]});
  }
  SUBCASE("size prefers large descriptions after unseen ones") {
    for (std::size_t i = 0; i < all.size(); ++i) {
      h.Set(all[i], FetchRecord{0, 0, 1, i + 1});
    }
    auto p = BaselinePlan(Strategy::kSize, all, h, Budget(2), 1);
    CHECK(p.Fetched() == std::vector<Iri>{all[5], all[4]});
  }
  SUBCASE("random is reproducible and seed dependent") {
    const auto many = Resources("r", 50);
    auto p1 = BaselinePlan(Strategy::kRandom, many, h, Budget(10), 4, 99);
    auto p2 = BaselinePlan(Strategy::kRandom, many, h, Budget(10), 4, 99);
    auto p3 = BaselinePlan(Strategy::kRandom, many, h, Budget(10), 4, 100);
    auto p4 = BaselinePlan(Strategy::kRandom, many, h, Budget(10), 5, 99);
    CHECK(p1.Fetched() == p2.Fetched());
    CHECK(p1.Fetched() != p3.Fetched());
    CHECK(p1.Fetched() != p4.Fetched());
  }
  SUBCASE("budget larger than the listing") {
    auto p = BaselinePlan(Strategy::kAge, all, h, Budget(100), 0);
    CHECK(p.total() == all.size());
  }
  CHECK_THROWS_AS(BaselinePlan(Strategy::kRegion, all, h, Budget(1), 0),
                  std::invalid_argument);
}

// Random region set over one change type with possibly overlapping
// members, plus matching profiles.
struct Scenario {
  RegionSet regions;
  ProfileSet profiles;
  std::size_t distinct = 0;
};

Scenario RandomScenario(Rng &rng) {
  Scenario s;
  const std::size_t concepts = 1 + rng.Below(6);
  const auto pool = Resources("r", 5 + rng.Below(80));
  std::map<Iri, std::set<Iri>> members;
  for (std::size_t c = 0; c < concepts; ++c) {
    Iri name = Ex("C" + std::to_string(c));
    auto &m = members[name];
    const auto n = 1 + rng.Below(pool.size());
    for (std::uint64_t i = 0; i < n; ++i) m.insert(pool[rng.Below(pool.size())]);
    PerChangeType<double> rates;
    for (auto &r : rates) r = 0.001 + 0.5 * rng.Uniform01();
    s.profiles.push_back(Profile("C" + std::to_string(c), rates));
  }
  std::sort(s.profiles.begin(), s.profiles.end(),
            [](const auto &a, const auto &b) { return a.concept_iri < b.concept_iri; });
  const double low = 0.05 + 0.1 * rng.Uniform01();
  s.regions = BinConceptsIntoRegions(s.profiles, Boundaries{low, low + 0.15}, members, "ref");
  std::set<Iri> all;
  for (const auto &[c, m] : members) all.insert(m.begin(), m.end());
  s.distinct = all.size();
  return s;
}

UseCaseWeights RandomWeights(Rng &rng) {
  PerChangeType<double> w{};
  for (auto &x : w) x = rng.Bernoulli(0.4) ? 0.0 : rng.Uniform01() * 5;
  if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) w[2] = 1.0;
  return UseCaseWeights(w);
}

TEST_CASE("Budget is spent exactly (property)") {
  Rng rng(41);
  for (int i = 0; i < 300; ++i) {
    Scenario s = RandomScenario(rng);
    const Budget b(1 + rng.Below(120));
    const double eps = rng.Bernoulli(0.3) ? 0.0 : 0.9 * rng.Uniform01();
    FetchHistory h;
    for (const auto &r : s.regions.regions) {
      for (const auto &iri : r.resources) {
        if (rng.Bernoulli(0.3)) h.RecordFetch(iri, rng.Below(5), rng.Bernoulli(0.5), 1 + rng.Below(9));
      }
    }
    auto plan = PlanRegions(s.regions, s.profiles, RandomWeights(rng), b, eps, h, 5);
    const std::size_t want = std::min(b.value(), s.distinct);
    CHECK(plan.total() == want);
    auto fetched = plan.Fetched();
    CHECK(fetched.size() == want);
    std::sort(fetched.begin(), fetched.end());
    CHECK(std::adjacent_find(fetched.begin(), fetched.end()) == fetched.end());
    for (const auto &a : plan.allocations) CHECK(a.resources.size() == a.quota);

    std::vector<Iri> listing;
    for (const auto &r : s.regions.regions) {
      listing.insert(listing.end(), r.resources.begin(), r.resources.end());
    }
    for (Strategy st : {Strategy::kAge, Strategy::kSize, Strategy::kChangeRatio,
                        Strategy::kRandom}) {
      auto bp = BaselinePlan(st, listing, h, b, 5, 17);
      CHECK(bp.total() == want);
      auto f = bp.Fetched();
      std::sort(f.begin(), f.end());
      CHECK(std::adjacent_find(f.begin(), f.end()) == f.end());
    }
  }
}

TEST_CASE("Allocation sums to min(b, total size) (property)") {
  Rng rng(42);
  for (int i = 0; i < 500; ++i) {
    const std::size_t m = 1 + rng.Below(8);
    RegionScores scores;
    std::map<std::string, std::size_t> sizes;
    std::size_t total = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const std::string key = "k" + std::to_string(j);
      sizes[key] = 1 + rng.Below(40);
      total += sizes[key];
      scores[key] = rng.Bernoulli(0.2) ? 0.0 : rng.Uniform01() * 10;
    }
    const Budget b(1 + rng.Below(200));
    const double eps = rng.Bernoulli(0.3) ? 0.0 : 0.95 * rng.Uniform01();
    auto q = AllocateBudget(scores, b, eps, sizes);
    CHECK(Sum(q) == std::min(b.value(), total));
    for (const auto &[k, v] : q) CHECK(v <= sizes.at(k));
  }
}

TEST_CASE("Scaling scores or weights changes nothing (property)") {
  Rng rng(43);
  for (int i = 0; i < 300; ++i) {
    const std::size_t m = 1 + rng.Below(7);
    RegionScores scores, scaled;
    std::map<std::string, std::size_t> sizes;
    const double c = std::vector<double>{1e-3, 0.37, 3.7, 1e6}[rng.Below(4)];
    for (std::size_t j = 0; j < m; ++j) {
      const std::string key = "k" + std::to_string(j);
      sizes[key] = 1 + rng.Below(60);
      scores[key] = static_cast<double>(rng.Below(20));
      scaled[key] = scores[key] * c;
    }
    const Budget b(1 + rng.Below(150));
    const double eps = rng.Bernoulli(0.5) ? 0.0 : 0.1;
    CHECK(AllocateBudget(scores, b, eps, sizes) == AllocateBudget(scaled, b, eps, sizes));

    Scenario s = RandomScenario(rng);
    PerChangeType<double> w{}, w_scaled{};
    for (std::size_t t = 0; t < w.size(); ++t) {
      w[t] = static_cast<double>(rng.Below(4));
      w_scaled[t] = w[t] * c;
    }
    if (std::all_of(w.begin(), w.end(), [](double x) { return x == 0.0; })) {
      w[0] = 1;
      w_scaled[0] = c;
    }
    FetchHistory h;
    auto p1 = PlanRegions(s.regions, s.profiles, UseCaseWeights(w), b, eps, h, 0);
    auto p2 = PlanRegions(s.regions, s.profiles, UseCaseWeights(w_scaled), b, eps, h, 0);
    CHECK(DumpJson(ToJson(p1)) == DumpJson(ToJson(p2)));
  }
}

TEST_CASE("A higher score never lowers a quota (property)") {
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    std::map<std::string, std::size_t> sizes = {{"a", 1 + rng.Below(80)},
                                                {"b", 1 + rng.Below(80)}};
    const Budget b(1 + rng.Below(150));
    const double other = rng.Uniform01() * 10;
    double s = 0.0;
    std::size_t prev = 0;
    for (int step = 0; step < 12; ++step) {
      auto q = AllocateBudget({{"a", s}, {"b", other}}, b, 0.0, sizes);
      CHECK(q.at("a") >= prev);
      prev = q.at("a");
      s += rng.Uniform01() * 3;
    }
  }
}

TEST_CASE("Exploration reaches every region (property)") {
  Rng rng(45);
  for (int i = 0; i < 300; ++i) {
    const std::size_t m = 1 + rng.Below(10);
    RegionScores scores;
    std::map<std::string, std::size_t> sizes;
    for (std::size_t j = 0; j < m; ++j) {
      const std::string key = "k" + std::to_string(j);
      sizes[key] = 1 + rng.Below(30);
      scores[key] = rng.Bernoulli(0.5) ? 0.0 : rng.Uniform01();
    }
    const Budget b(m + rng.Below(100));
    const double eps = 0.01 + 0.9 * rng.Uniform01();
    auto q = AllocateBudget(scores, b, eps, sizes);
    for (const auto &[k, v] : q) CHECK(v >= 1);
  }
}

TEST_CASE("Plans are deterministic (property)") {
  Rng rng(46);
  for (int i = 0; i < 150; ++i) {
    Scenario s = RandomScenario(rng);
    const auto w = RandomWeights(rng);
    const Budget b(1 + rng.Below(60));
    FetchHistory h;
    for (const auto &r : s.regions.regions) {
      for (const auto &iri : r.resources) {
        if (rng.Bernoulli(0.5)) h.RecordFetch(iri, rng.Below(4), rng.Bernoulli(0.3), rng.Below(9));
      }
    }
    const auto a = DumpJson(ToJson(PlanRegions(s.regions, s.profiles, w, b, 0.1, h, 3)));
    const auto c = DumpJson(ToJson(PlanRegions(s.regions, s.profiles, w, b, 0.1, h, 3)));
    CHECK(a == c);
    std::vector<Iri> listing;
    for (const auto &r : s.regions.regions) {
      listing.insert(listing.end(), r.resources.begin(), r.resources.end());
    }
    for (Strategy st : {Strategy::kAge, Strategy::kSize, Strategy::kChangeRatio,
                        Strategy::kRandom}) {
      CHECK(DumpJson(ToJson(BaselinePlan(st, listing, h, b, 3, 8))) ==
            DumpJson(ToJson(BaselinePlan(st, listing, h, b, 3, 8))));
    }
  }
}

}  // namespace
}  // namespace deltald
