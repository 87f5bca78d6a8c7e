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

// Synthetic evolving corpora, replay of monitoring strategies, and
// precision / recall scoring against ground truth.

#ifndef DELTALD_EVOLUTION_SIM_H_
#define DELTALD_EVOLUTION_SIM_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "deltald/change_aggregate.h"
#include "deltald/change_detect.h"
#include "deltald/rdf.h"
#include "deltald/scheduler.h"

namespace deltald {

struct ConceptSpec {
  std::string name;
  std::size_t resource_count = 1;
  // Per-resource, per-transition probability of each change type. For
  // create it is the expected number of new resources per existing one.
  PerChangeType<double> rates{};
};

struct SyntheticConfig {
  std::uint64_t seed = 7;
  std::vector<ConceptSpec> concepts;
  std::size_t transitions = 1;
  std::size_t predicates_min = 4;
  std::size_t predicates_max = 8;
  std::string base_iri = "http://example.org/";

  // Throws BadConfig.
  void Validate() const;
};

struct Corpus {
  std::vector<DatasetVersion> versions;
  std::vector<ChangeSet> truth;  // truth[i] connects versions[i] -> [i + 1]
};

// Each transition, every resource draws its events independently; when
// several fire, remove > move > renew > update wins. Each existing
// resource also spawns a new member of its concept with the create rate.
Corpus GenerateSyntheticCorpus(const SyntheticConfig &cfg);

struct Counts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  // Empty-set conventions: no detections -> P = 1, no true changes -> R = 1,
  // both empty -> F = 1; otherwise F = 0 when P + R = 0.
  double precision() const;
  double recall() const;
  double f_measure() const;

  Counts &operator+=(const Counts &o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const Counts &, const Counts &) = default;
};

struct EvaluationReport {
  // Keyed by change type name ("move", ...).
  std::map<std::string, Counts> by_type;
  Counts overall;

  EvaluationReport &operator+=(const EvaluationReport &o);
};

struct GoldStandard {
  std::vector<std::pair<Iri, Iri>> move_pairs;  // sorted, one-to-one
};

// Tab-separated `old<TAB>new` lines; `#` comments and blank lines skipped.
// Throws GoldStandardError.
GoldStandard ParseGoldStandard(std::istream &in);
GoldStandard LoadGoldStandard(const std::filesystem::path &path);

// Move and renew detections merged and compared as (old, new) pairs.
EvaluationReport EvaluateMoves(const ChangeSet &detected,
                               const GoldStandard &gold);

// Exact per-type comparison of two change sets restricted to `types`.
EvaluationReport CompareChanges(const ChangeSet &detected,
                                const ChangeSet &truth,
                                const std::vector<ChangeType> &types);

enum class DetectionModel { kOracle, kDiff };

std::string_view ToString(DetectionModel m);
std::optional<DetectionModel> ParseDetectionModel(std::string_view name);

struct SimulationOptions {
  Strategy strategy = Strategy::kRegion;
  std::size_t budget = 1;
  double epsilon = kDefaultEpsilon;
  UseCaseWeights weights;
  Boundaries boundaries;
  std::size_t warmup = 1;
  DetectionModel detection = DetectionModel::kDiff;
  double theta = kDefaultTheta;
  // New subjects of each version are listed to the detector.
  bool listing = true;
  std::uint64_t seed = 0;
  // Baselines also observe the warmup transitions in full.
  bool baseline_warmup_history = false;
  bool record_fetches = false;
};

struct CycleRow {
  std::size_t transition_index = 0;
  std::size_t fetched = 0;
  EvaluationReport report;
  std::vector<Iri> fetched_resources;  // only with record_fetches
};

struct SimulationResult {
  std::string strategy;
  std::vector<CycleRow> cycles;
  EvaluationReport cumulative;
  std::size_t total_fetches = 0;
  double optimal_f_measure = 1.0;
};

// What the scheduler is allowed to see at the start of a cycle: the
// listing of the current version, the changes it detected so far, and its
// own fetch history.
struct SchedulerView {
  std::int64_t cycle = 0;
  const std::map<Iri, std::set<Iri>> *listing = nullptr;
  const std::vector<TransitionRecord> *observations = nullptr;
  const FetchHistory *history = nullptr;
};

using ViewObserver = std::function<void(const SchedulerView &)>;

// Throws BadWarmup, VersionChainBroken.
SimulationResult RunSimulation(const Corpus &corpus,
                               const SimulationOptions &options,
                               const ViewObserver &observer = nullptr);

// Detection restricted to the resources of every low / high region of an
// actively weighted change type, with no budget cap. Transitions before
// `first_transition` are skipped.
EvaluationReport OptimalAccuracyReference(const Corpus &corpus,
                                          const RegionSet &regions,
                                          const UseCaseWeights &weights,
                                          double theta = kDefaultTheta,
                                          bool listing = true,
                                          std::size_t first_transition = 0);

// Regions mined from the full truth of a corpus, referenced to its first
// version.
RegionSet TruthRegions(const Corpus &corpus, const Boundaries &boundaries);

}  // namespace deltald

#endif  // DELTALD_EVOLUTION_SIM_H_
