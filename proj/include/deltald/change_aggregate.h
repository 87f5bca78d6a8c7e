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

// Change history aggregation and region mining.
//
// Consecutive change sets are folded into per-concept counts, each
// (concept, change type) gets a Laplace-smoothed Bernoulli rate
//
//     p_hat = (sum k + 1) / (sum n + 2)
//
// and concepts are binned per change type into static / low / high
// regions by two fixed thresholds. With the default lower threshold of
// 0.01 the smoothing floor 1 / (n + 2) only drops below it once a concept
// has been exposed more than 98 times, so small concepts with no observed
// changes land in `low` rather than `static`.

#ifndef DELTALD_CHANGE_AGGREGATE_H_
#define DELTALD_CHANGE_AGGREGATE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "deltald/change_detect.h"
#include "deltald/rdf.h"

namespace deltald {

struct ConceptTally {
  PerChangeType<std::uint64_t> k{};
  std::uint64_t source_size = 0;
  std::uint64_t target_size = 0;

  // Creates are exposed against the target version, everything else
  // against the source.
  std::uint64_t exposure(ChangeType type) const {
    return type == ChangeType::kCreate ? target_size : source_size;
  }

  friend bool operator==(const ConceptTally &, const ConceptTally &) = default;
};

struct TransitionRecord {
  std::size_t transition_index = 0;
  std::string from_version;
  std::string to_version;
  std::map<Iri, ConceptTally> concepts;

  friend bool operator==(const TransitionRecord &,
                         const TransitionRecord &) = default;
};

struct ConceptChangeProfile {
  Iri concept_iri;
  PerChangeType<std::uint64_t> total_k{};
  PerChangeType<std::uint64_t> total_n{};
  PerChangeType<double> p_hat{};

  // True when the concept was never exposed for `type`; p_hat is then the
  // bare prior 0.5.
  bool no_evidence(ChangeType type) const { return total_n[Index(type)] == 0; }
};

using ProfileSet = std::vector<ConceptChangeProfile>;  // sorted by concept

const ConceptChangeProfile *FindProfile(const ProfileSet &profiles,
                                        const Iri &concept_iri);

double SmoothedRate(std::uint64_t k, std::uint64_t n);

enum class Bin { kStatic = 0, kLow, kHigh };

std::string_view ToString(Bin bin);
std::optional<Bin> ParseBin(std::string_view name);

struct Boundaries {
  double low = 0.01;
  double high = 0.1;

  // Throws BadBoundaries unless 0 < low < high < 1.
  void Validate() const;
  Bin Classify(double p_hat) const;
};

struct Region {
  ChangeType change_type;
  Bin bin;
  std::vector<Iri> concepts;                     // sorted
  std::map<Iri, std::vector<Iri>> members;       // concept -> resources
  std::vector<Iri> resources;                    // sorted union of members

  // "update/high" and so on.
  std::string Key() const;
};

struct RegionSet {
  std::string reference_version;
  Boundaries boundaries;
  Bin no_evidence_bin = Bin::kHigh;
  // Ordered by (change type, bin).
  std::vector<Region> regions;

  const Region *Find(ChangeType type, Bin bin) const;
  const Region *FindKey(std::string_view key) const;
};

// Throws VersionChainBroken unless changesets[i] connects versions[i] to
// versions[i + 1].
std::vector<TransitionRecord> AggregateTransitions(
    const std::vector<ChangeSet> &changesets,
    const std::vector<DatasetVersion> &versions);

// Counts one transition. Exposures default to concept sizes in the two
// versions.
TransitionRecord RecordTransition(std::size_t index, const ChangeSet &cs,
                                  const DatasetVersion &source,
                                  const DatasetVersion &target);

ProfileSet EstimateProbabilities(const std::vector<TransitionRecord> &records);

// Throws BadBoundaries. Concepts of `reference` without a profile are
// treated as unobserved.
RegionSet BinConceptsIntoRegions(const ProfileSet &profiles,
                                 const Boundaries &boundaries,
                                 const DatasetVersion &reference,
                                 Bin no_evidence_bin = Bin::kHigh);

// Same, over an explicit concept -> members listing.
RegionSet BinConceptsIntoRegions(
    const ProfileSet &profiles, const Boundaries &boundaries,
    const std::map<Iri, std::set<Iri>> &concept_members,
    const std::string &reference_version, Bin no_evidence_bin = Bin::kHigh);

}  // namespace deltald

#endif  // DELTALD_CHANGE_AGGREGATE_H_
