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

#include "deltald/scheduler.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "deltald/random.h"

namespace deltald {

namespace {

constexpr std::array<std::string_view, 5> kStrategyNames = {
    "region", "age", "size", "change-ratio", "random"};

// Fractional parts are compared on a 1e-9 grid so that rescaling all
// scores by a constant cannot reorder remainders through rounding noise.
std::int64_t Quantize(double x) { return std::llround(x * 1e9); }

// Position of a resource in least-recently-fetched order.
struct AgeKey {
  bool fetched;
  std::int64_t cycle;

  friend auto operator<=>(const AgeKey &, const AgeKey &) = default;
};

AgeKey AgeOf(const FetchHistory &history, const Iri &iri) {
  const FetchRecord *rec = history.Find(iri);
  if (rec == nullptr || !rec->last_fetched_cycle) return {false, 0};
  return {true, *rec->last_fetched_cycle};
}

std::string Trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

// ---------------------------------------------------------------------------
// Value types

UseCaseWeights::UseCaseWeights() : UseCaseWeights(PerChangeType<double>{1, 1, 1, 1, 1}) {}

UseCaseWeights::UseCaseWeights(const PerChangeType<double> &weights)
    : raw_(weights), total_(0.0) {
  for (double w : raw_) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and non-negative");
    }
    total_ += w;
  }
  if (total_ <= 0.0) {
    throw std::invalid_argument("at least one weight must be positive");
  }
}

UseCaseWeights UseCaseWeights::Parse(std::string_view spec) {
  PerChangeType<double> w{};
  std::string item;
  std::istringstream in{std::string(spec)};
  while (std::getline(in, item, ',')) {
    item = Trim(item);
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("weight '" + item + "' is not name=value");
    }
    auto type = ParseChangeType(Trim(item.substr(0, eq)));
    if (!type) {
      throw std::invalid_argument("unknown change type in '" + item + "'");
    }
    std::size_t used = 0;
    std::string value = Trim(item.substr(eq + 1));
    double v = 0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception &) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw std::invalid_argument("bad weight value in '" + item + "'");
    }
    w[Index(*type)] = v;
  }
  return UseCaseWeights(w);
}

std::string UseCaseWeights::ToString() const {
  std::ostringstream out;
  for (ChangeType t : kAllChangeTypes) {
    if (t != ChangeType::kCreate) out << ',';
    out << deltald::ToString(t) << '=' << raw_[Index(t)];
  }
  return out.str();
}

Budget::Budget(std::size_t b) : b_(b) {
  if (b == 0) throw std::invalid_argument("budget must be at least 1");
}

const FetchRecord *FetchHistory::Find(const Iri &iri) const {
  auto it = records_.find(iri);
  return it == records_.end() ? nullptr : &it->second;
}

void FetchHistory::RecordFetch(const Iri &iri, std::int64_t cycle, bool changed,
                               std::uint64_t triple_count) {
  FetchRecord &rec = records_[iri];
  rec.last_fetched_cycle = cycle;
  ++rec.observation_count;
  if (changed) ++rec.observed_change_count;
  rec.triple_count = triple_count;
}

void FetchHistory::Set(const Iri &iri, FetchRecord record) {
  if (record.observed_change_count > record.observation_count) {
    throw std::invalid_argument("observed changes exceed observations for <" +
                                iri.str() + ">");
  }
  records_.insert_or_assign(iri, std::move(record));
}

std::size_t SchedulePlan::total() const {
  std::size_t n = 0;
  for (const auto &a : allocations) n += a.quota;
  return n;
}

std::vector<Iri> SchedulePlan::Fetched() const {
  std::vector<Iri> out;
  for (const auto &a : allocations) {
    out.insert(out.end(), a.resources.begin(), a.resources.end());
  }
  return out;
}

std::string_view ToString(Strategy s) {
  return kStrategyNames[static_cast<std::size_t>(s)];
}

std::optional<Strategy> ParseStrategy(std::string_view name) {
  if (name == "change_ratio") return Strategy::kChangeRatio;
  for (std::size_t i = 0; i < kStrategyNames.size(); ++i) {
    if (kStrategyNames[i] == name) return static_cast<Strategy>(i);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Region strategy

RegionScores ScoreRegions(const RegionSet &regions, const ProfileSet &profiles,
                          const UseCaseWeights &weights) {
  RegionScores scores;
  for (const auto &region : regions.regions) {
    const std::size_t t = Index(region.change_type);
    // A multi-typed resource counts once, under its highest-rate concept.
    std::map<Iri, double> best;
    for (const auto &[concept_iri, members] : region.members) {
      const ConceptChangeProfile *p = FindProfile(profiles, concept_iri);
      double rate = p != nullptr ? p->p_hat[t] : SmoothedRate(0, 0);
      for (const auto &r : members) {
        auto [it, fresh] = best.emplace(r, rate);
        if (!fresh) it->second = std::max(it->second, rate);
      }
    }
    double mass = 0.0;
    for (const auto &[r, rate] : best) mass += rate;
    scores[region.Key()] = weights.normalized(region.change_type) * mass;
  }
  return scores;
}

std::map<std::string, std::size_t> AllocateBudget(
    const RegionScores &scores, Budget budget, double epsilon,
    const std::map<std::string, std::size_t> &region_sizes) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1)");
  }
  std::map<std::string, std::size_t> quotas;
  if (region_sizes.empty()) return quotas;

  std::vector<std::string> keys;
  std::vector<double> score;
  for (const auto &[key, size] : region_sizes) {
    keys.push_back(key);
    auto it = scores.find(key);
    score.push_back(it == scores.end() ? 0.0 : std::max(0.0, it->second));
  }
  const std::size_t m = keys.size();
  const std::size_t b = budget.value();
  std::vector<std::size_t> q(m, 0);

  // Rank: higher score first, then key.
  std::vector<std::size_t> rank(m);
  std::iota(rank.begin(), rank.end(), 0);
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t x, std::size_t y) {
    return score[x] > score[y];
  });

  // Exploration share, spread evenly; leftover units go in key order. Any
  // positive epsilon buys every region at least one probe when b allows.
  auto explore = static_cast<std::size_t>(
      std::floor(epsilon * static_cast<double>(b) + 1e-9));
  if (epsilon > 0.0) explore = std::max(explore, std::min(m, b));
  for (std::size_t i = 0; i < m; ++i) {
    q[i] = explore / m + (i < explore % m ? 1 : 0);
  }

  // Proportional share by largest remainder.
  const std::size_t prop = b - explore;
  double total = 0.0;
  for (double s : score) total += s;
  std::vector<double> share(m);
  for (std::size_t i = 0; i < m; ++i) {
    double w = total > 0.0 ? score[i] / total : 1.0 / static_cast<double>(m);
    share[i] = static_cast<double>(prop) * w;
  }
  std::size_t assigned = 0;
  std::vector<std::int64_t> remainder(m);
  for (std::size_t i = 0; i < m; ++i) {
    auto whole = static_cast<std::size_t>(std::floor(share[i] + 1e-9));
    whole = std::min(whole, prop - assigned);
    q[i] += whole;
    assigned += whole;
    remainder[i] = std::max<std::int64_t>(0, Quantize(share[i] - static_cast<double>(whole)));
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (remainder[x] != remainder[y]) return remainder[x] > remainder[y];
    return score[x] > score[y];
  });
  for (std::size_t i = 0; assigned < prop; i = (i + 1) % m) {
    ++q[order[i]];
    ++assigned;
  }

  // Cap at region size and hand the surplus down the ranking.
  std::size_t surplus = 0;
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t size = region_sizes.at(keys[i]);
    if (q[i] > size) {
      surplus += q[i] - size;
      q[i] = size;
    }
  }
  for (std::size_t i : rank) {
    if (surplus == 0) break;
    std::size_t room = region_sizes.at(keys[i]) - q[i];
    std::size_t give = std::min(room, surplus);
    q[i] += give;
    surplus -= give;
  }

  for (std::size_t i = 0; i < m; ++i) quotas[keys[i]] = q[i];
  return quotas;
}

std::vector<Iri> SelectResources(std::span<const Iri> resources,
                                 std::size_t quota,
                                 const FetchHistory &history) {
  std::vector<std::pair<AgeKey, const Iri *>> keyed;
  keyed.reserve(resources.size());
  for (const auto &r : resources) keyed.emplace_back(AgeOf(history, r), &r);
  std::sort(keyed.begin(), keyed.end(), [](const auto &x, const auto &y) {
    if (x.first != y.first) return x.first < y.first;
    return *x.second < *y.second;
  });
  std::vector<Iri> out;
  const std::size_t n = std::min(quota, keyed.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(*keyed[i].second);
  return out;
}

std::map<std::string, std::vector<Iri>> AssignResources(
    const RegionSet &regions, const RegionScores &scores) {
  std::map<Iri, std::pair<double, std::string>> best;
  for (const auto &region : regions.regions) {
    const std::string key = region.Key();
    auto it = scores.find(key);
    const double s = it == scores.end() ? 0.0 : it->second;
    for (const auto &r : region.resources) {
      auto [pos, fresh] = best.try_emplace(r, s, key);
      if (fresh) continue;
      auto &[cur_score, cur_key] = pos->second;
      if (s > cur_score || (s == cur_score && key < cur_key)) {
        cur_score = s;
        cur_key = key;
      }
    }
  }
  std::map<std::string, std::vector<Iri>> out;
  for (const auto &[r, choice] : best) out[choice.second].push_back(r);
  return out;
}

SchedulePlan PlanRegions(const RegionSet &regions, const ProfileSet &profiles,
                         const UseCaseWeights &weights, Budget budget,
                         double epsilon, const FetchHistory &history,
                         std::int64_t cycle) {
  const RegionScores scores = ScoreRegions(regions, profiles, weights);
  const auto assigned = AssignResources(regions, scores);
  std::map<std::string, std::size_t> sizes;
  for (const auto &[key, members] : assigned) sizes[key] = members.size();
  const auto quotas = AllocateBudget(scores, budget, epsilon, sizes);

  SchedulePlan plan;
  plan.cycle_index = cycle;
  plan.strategy = std::string(ToString(Strategy::kRegion));
  for (const auto &[key, quota] : quotas) {
    const auto &members = assigned.at(key);
    plan.allocations.push_back({key, quota, SelectResources(members, quota, history)});
  }
  return plan;
}

// ---------------------------------------------------------------------------
// Baselines

SchedulePlan BaselinePlan(Strategy strategy, std::span<const Iri> all_resources,
                          const FetchHistory &history, Budget budget,
                          std::int64_t cycle, std::uint64_t seed) {
  if (strategy == Strategy::kRegion) {
    throw std::invalid_argument("the region strategy is planned by PlanRegions");
  }
  std::vector<Iri> order(all_resources.begin(), all_resources.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());

  switch (strategy) {
    case Strategy::kAge:
      order = SelectResources(order, order.size(), history);
      break;
    case Strategy::kSize:
    case Strategy::kChangeRatio: {
      // Never-fetched resources rank first for size and as ratio 1 for
      // change-ratio; ties fall back to age, then IRI.
      struct Keyed {
        bool known;
        double metric;
        AgeKey age;
        const Iri *iri;
      };
      std::vector<Keyed> keyed;
      keyed.reserve(order.size());
      for (const auto &r : order) {
        const FetchRecord *rec = history.Find(r);
        Keyed k{false, 0.0, AgeOf(history, r), &r};
        if (strategy == Strategy::kSize) {
          if (rec != nullptr && rec->last_fetched_cycle) {
            k.known = true;
            k.metric = static_cast<double>(rec->triple_count);
          }
        } else {
          // An unobserved resource behaves like ratio 1.
          k.known = true;
          k.metric = 1.0;
          if (rec != nullptr && rec->observation_count > 0) {
            k.metric = static_cast<double>(rec->observed_change_count) /
                       static_cast<double>(rec->observation_count);
          }
        }
        keyed.push_back(k);
      }
      std::sort(keyed.begin(), keyed.end(), [](const Keyed &x, const Keyed &y) {
        if (x.known != y.known) return !x.known;
        if (x.metric != y.metric) return x.metric > y.metric;
        if (x.age != y.age) return x.age < y.age;
        return *x.iri < *y.iri;
      });
      std::vector<Iri> sorted;
      sorted.reserve(keyed.size());
      for (const auto &k : keyed) sorted.push_back(*k.iri);
      order = std::move(sorted);
      break;
    }
    case Strategy::kRandom: {
      Rng rng(Rng::Mix(seed) ^ static_cast<std::uint64_t>(cycle));
      rng.Shuffle(order);
      break;
    }
    case Strategy::kRegion:
      break;
  }

  const std::size_t n = std::min(budget.value(), order.size());
  order.erase(order.begin() + static_cast<std::ptrdiff_t>(n), order.end());
  SchedulePlan plan;
  plan.cycle_index = cycle;
  plan.strategy = std::string(ToString(strategy));
  plan.allocations.push_back({plan.strategy, n, std::move(order)});
  return plan;
}

}  // namespace deltald
