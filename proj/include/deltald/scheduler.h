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

// Budget-constrained monitoring plans.
//
// The region strategy scores every region by its expected number of
// detected changes per cycle,
//
//     score = w(type) * mean p_hat(type) * |resources|,
//
// assigns each resource to its best-scoring region, and apportions the
// budget: an exploration share floor(epsilon * b), at least one unit per
// region when epsilon > 0, spread evenly over all regions; the rest
// proportionally to score by largest remainder; quotas capped at region
// size with the surplus passed down the ranking.
// Within a region the least recently fetched resources go first.

#ifndef DELTALD_SCHEDULER_H_
#define DELTALD_SCHEDULER_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deltald/change_aggregate.h"
#include "deltald/change_detect.h"
#include "deltald/rdf.h"

namespace deltald {

class UseCaseWeights {
 public:
  // All five change types weighted 1.
  UseCaseWeights();
  // Throws std::invalid_argument on negative weights or an all-zero vector.
  explicit UseCaseWeights(const PerChangeType<double> &weights);

  // Parses "move=1,update=0.5"; unspecified types get weight 0.
  static UseCaseWeights Parse(std::string_view spec);

  double raw(ChangeType t) const { return raw_[Index(t)]; }
  // Weight normalized so the five weights sum to 1.
  double normalized(ChangeType t) const { return raw_[Index(t)] / total_; }
  bool active(ChangeType t) const { return raw_[Index(t)] > 0.0; }
  const PerChangeType<double> &values() const { return raw_; }

  std::string ToString() const;

 private:
  PerChangeType<double> raw_;
  double total_;
};

class Budget {
 public:
  // Throws std::invalid_argument when b == 0.
  explicit Budget(std::size_t b);
  std::size_t value() const { return b_; }

 private:
  std::size_t b_;
};

struct FetchRecord {
  std::optional<std::int64_t> last_fetched_cycle;
  std::uint64_t observed_change_count = 0;
  std::uint64_t observation_count = 0;
  // Description size when last fetched.
  std::uint64_t triple_count = 0;

  friend bool operator==(const FetchRecord &, const FetchRecord &) = default;
};

class FetchHistory {
 public:
  const FetchRecord *Find(const Iri &iri) const;
  void RecordFetch(const Iri &iri, std::int64_t cycle, bool changed,
                   std::uint64_t triple_count);
  const std::map<Iri, FetchRecord> &records() const { return records_; }
  void Set(const Iri &iri, FetchRecord record);

 private:
  std::map<Iri, FetchRecord> records_;
};

struct Allocation {
  std::string key;
  std::size_t quota = 0;
  std::vector<Iri> resources;
};

struct SchedulePlan {
  std::int64_t cycle_index = 0;
  std::string strategy;
  std::vector<Allocation> allocations;

  std::size_t total() const;
  std::vector<Iri> Fetched() const;
};

enum class Strategy { kRegion, kAge, kSize, kChangeRatio, kRandom };

// "region", "age", "size", "change-ratio", "random".
std::string_view ToString(Strategy s);
std::optional<Strategy> ParseStrategy(std::string_view name);

inline constexpr double kDefaultEpsilon = 0.1;

using RegionScores = std::map<std::string, double>;

RegionScores ScoreRegions(const RegionSet &regions, const ProfileSet &profiles,
                          const UseCaseWeights &weights);

// Every key of `region_sizes` is a region; missing scores count as 0.
// Throws std::invalid_argument unless 0 <= epsilon < 1.
std::map<std::string, std::size_t> AllocateBudget(
    const RegionScores &scores, Budget budget, double epsilon,
    const std::map<std::string, std::size_t> &region_sizes);

// Never-fetched first, then oldest fetch, then IRI order. Returns the first
// min(quota, |resources|).
std::vector<Iri> SelectResources(std::span<const Iri> resources,
                                 std::size_t quota,
                                 const FetchHistory &history);

// Maps each resource to the key of its best-scoring region (ties go to the
// smaller key).
std::map<std::string, std::vector<Iri>> AssignResources(
    const RegionSet &regions, const RegionScores &scores);

SchedulePlan PlanRegions(const RegionSet &regions, const ProfileSet &profiles,
                         const UseCaseWeights &weights, Budget budget,
                         double epsilon, const FetchHistory &history,
                         std::int64_t cycle);

// Single-allocation plan for the age / size / change-ratio / random
// baselines. `seed` only matters for random.
SchedulePlan BaselinePlan(Strategy strategy,
                          std::span<const Iri> all_resources,
                          const FetchHistory &history, Budget budget,
                          std::int64_t cycle, std::uint64_t seed = 0);

}  // namespace deltald

#endif  // DELTALD_SCHEDULER_H_
