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

// Resource-level change detection between two dataset versions.
//
// Every subject of either version ends up in exactly one bucket:
//
//   unchanged  same IRI, same description (emits nothing)
//   update     same IRI, different description
//   move       IRI vanished, a new IRI carries the same canonical description
//   renew      IRI vanished, a new IRI carries a description whose Jaccard
//              similarity lies in [theta, 1)
//   remove     IRI vanished with no match
//   create     IRI appeared with no match
//
// Triple-level deltas are plain set differences and do not depend on the
// classification, so applying a change set always reproduces the target.

#ifndef DELTALD_CHANGE_DETECT_H_
#define DELTALD_CHANGE_DETECT_H_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "deltald/rdf.h"

namespace deltald {

enum class ChangeType { kCreate = 0, kRemove, kUpdate, kMove, kRenew };

inline constexpr std::size_t kNumChangeTypes = 5;
inline constexpr std::array<ChangeType, kNumChangeTypes> kAllChangeTypes = {
    ChangeType::kCreate, ChangeType::kRemove, ChangeType::kUpdate,
    ChangeType::kMove, ChangeType::kRenew};

template <typename T>
using PerChangeType = std::array<T, kNumChangeTypes>;

inline constexpr std::size_t Index(ChangeType t) {
  return static_cast<std::size_t>(t);
}

// Lowercase wire name: "create", "remove", "update", "move", "renew".
std::string_view ToString(ChangeType type);
std::optional<ChangeType> ParseChangeType(std::string_view name);

struct ResourceChange {
  ChangeType change_type;
  std::optional<Iri> old_iri;
  std::optional<Iri> new_iri;
  std::optional<double> similarity;
  Description added_pairs;
  Description deleted_pairs;

  // The IRI that identifies the resource in the source version, or the new
  // IRI for creates.
  const Iri &key() const { return old_iri ? *old_iri : *new_iri; }
};

struct ChangeSet {
  std::string from_version;
  std::string to_version;
  double theta = 0.8;
  std::vector<ResourceChange> resource_changes;
  std::vector<Triple> triples_added;    // sorted
  std::vector<Triple> triples_deleted;  // sorted

  PerChangeType<std::size_t> Counts() const;
};

struct MatchCandidate {
  Iri old_iri;
  Iri new_iri;
  double similarity;
};

inline constexpr double kDefaultTheta = 0.8;

// Jaccard similarity of two sorted, unique descriptions.
double Jaccard(const Description &x, const Description &y);

// Jaccard similarity of canonical representations. Throws NotPresent.
double Similarity(const DatasetVersion &v1, const DatasetVersion &v2,
                  const Iri &a, const Iri &b);

// One-to-one greedy matching of vanished to appeared resources: every pair
// with similarity >= theta, sorted by (similarity desc, old asc, new asc),
// accepted when both endpoints are still free.
std::vector<MatchCandidate> MatchMoved(const std::vector<Iri> &removed,
                                       const std::vector<Iri> &created,
                                       const DatasetVersion &v1,
                                       const DatasetVersion &v2, double theta);

// Throws std::invalid_argument unless 0 < theta <= 1.
ChangeSet DiffVersions(const DatasetVersion &v1, const DatasetVersion &v2,
                       double theta = kDefaultTheta);

// (v1 \ deleted) U added. Throws MissingDeletedTriple.
DatasetVersion ApplyChangeSet(const DatasetVersion &v1, const ChangeSet &cs);

}  // namespace deltald

#endif  // DELTALD_CHANGE_DETECT_H_
