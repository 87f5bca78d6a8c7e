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

#include "deltald/change_aggregate.h"

#include <algorithm>
#include <array>
#include <set>

#include "deltald/errors.h"

namespace deltald {

namespace {

constexpr std::array<std::string_view, 3> kBinNames = {"static", "low", "high"};

}  // namespace

std::string_view ToString(Bin bin) {
  return kBinNames[static_cast<std::size_t>(bin)];
}

std::optional<Bin> ParseBin(std::string_view name) {
  for (std::size_t i = 0; i < kBinNames.size(); ++i) {
    if (kBinNames[i] == name) return static_cast<Bin>(i);
  }
  return std::nullopt;
}

void Boundaries::Validate() const {
  if (!(low > 0.0 && low < high && high < 1.0)) {
    throw BadBoundaries("bin boundaries must satisfy 0 < t1 < t2 < 1, got (" +
                        std::to_string(low) + ", " + std::to_string(high) + ")");
  }
}

Bin Boundaries::Classify(double p_hat) const {
  if (p_hat < low) return Bin::kStatic;
  if (p_hat < high) return Bin::kLow;
  return Bin::kHigh;
}

std::string Region::Key() const {
  return std::string(ToString(change_type)) + "/" + std::string(ToString(bin));
}

const Region *RegionSet::Find(ChangeType type, Bin bin) const {
  for (const auto &r : regions) {
    if (r.change_type == type && r.bin == bin) return &r;
  }
  return nullptr;
}

const Region *RegionSet::FindKey(std::string_view key) const {
  for (const auto &r : regions) {
    if (r.Key() == key) return &r;
  }
  return nullptr;
}

const ConceptChangeProfile *FindProfile(const ProfileSet &profiles,
                                        const Iri &concept_iri) {
  auto it = std::lower_bound(
      profiles.begin(), profiles.end(), concept_iri,
      [](const ConceptChangeProfile &p, const Iri &c) { return p.concept_iri < c; });
  if (it == profiles.end() || it->concept_iri != concept_iri) return nullptr;
  return &*it;
}

double SmoothedRate(std::uint64_t k, std::uint64_t n) {
  return (static_cast<double>(k) + 1.0) / (static_cast<double>(n) + 2.0);
}

TransitionRecord RecordTransition(std::size_t index, const ChangeSet &cs,
                                  const DatasetVersion &source,
                                  const DatasetVersion &target) {
  TransitionRecord rec;
  rec.transition_index = index;
  rec.from_version = source.id();
  rec.to_version = target.id();
  for (const auto &[concept_iri, members] : source.concepts()) {
    rec.concepts[concept_iri].source_size = members.size();
  }
  for (const auto &[concept_iri, members] : target.concepts()) {
    rec.concepts[concept_iri].target_size = members.size();
  }
  for (const auto &rc : cs.resource_changes) {
    std::set<Iri> concepts = rc.change_type == ChangeType::kCreate
                                 ? target.ConceptsOf(*rc.new_iri)
                                 : source.ConceptsOf(*rc.old_iri);
    for (const auto &c : concepts) ++rec.concepts[c].k[Index(rc.change_type)];
  }
  return rec;
}

std::vector<TransitionRecord> AggregateTransitions(
    const std::vector<ChangeSet> &changesets,
    const std::vector<DatasetVersion> &versions) {
  if (changesets.empty() || versions.size() != changesets.size() + 1) {
    throw VersionChainBroken("expected n versions and n - 1 change sets, got " +
                             std::to_string(versions.size()) + " and " +
                             std::to_string(changesets.size()));
  }
  std::vector<TransitionRecord> records;
  records.reserve(changesets.size());
  for (std::size_t i = 0; i < changesets.size(); ++i) {
    const ChangeSet &cs = changesets[i];
    if (cs.from_version != versions[i].id() ||
        cs.to_version != versions[i + 1].id()) {
      throw VersionChainBroken("change set " + std::to_string(i) + " links '" +
                               cs.from_version + "' -> '" + cs.to_version +
                               "' but versions are '" + versions[i].id() +
                               "' -> '" + versions[i + 1].id() + "'");
    }
    records.push_back(RecordTransition(i, cs, versions[i], versions[i + 1]));
  }
  return records;
}

ProfileSet EstimateProbabilities(const std::vector<TransitionRecord> &records) {
  std::map<Iri, ConceptChangeProfile> by_concept;
  for (const auto &rec : records) {
    for (const auto &[concept_iri, tally] : rec.concepts) {
      auto it = by_concept.try_emplace(concept_iri, ConceptChangeProfile{concept_iri})
                    .first;
      for (ChangeType t : kAllChangeTypes) {
        it->second.total_k[Index(t)] += tally.k[Index(t)];
        it->second.total_n[Index(t)] += tally.exposure(t);
      }
    }
  }
  ProfileSet profiles;
  profiles.reserve(by_concept.size());
  for (auto &[concept_iri, profile] : by_concept) {
    for (ChangeType t : kAllChangeTypes) {
      profile.p_hat[Index(t)] =
          SmoothedRate(profile.total_k[Index(t)], profile.total_n[Index(t)]);
    }
    profiles.push_back(std::move(profile));
  }
  return profiles;
}

RegionSet BinConceptsIntoRegions(const ProfileSet &profiles,
                                 const Boundaries &boundaries,
                                 const DatasetVersion &reference,
                                 Bin no_evidence_bin) {
  return BinConceptsIntoRegions(profiles, boundaries, reference.concepts(),
                                reference.id(), no_evidence_bin);
}

RegionSet BinConceptsIntoRegions(
    const ProfileSet &profiles, const Boundaries &boundaries,
    const std::map<Iri, std::set<Iri>> &concept_members,
    const std::string &reference_version, Bin no_evidence_bin) {
  boundaries.Validate();
  RegionSet out;
  out.reference_version = reference_version;
  out.boundaries = boundaries;
  out.no_evidence_bin = no_evidence_bin;

  for (ChangeType t : kAllChangeTypes) {
    std::array<Region, 3> bins = {Region{t, Bin::kStatic, {}, {}, {}},
                                  Region{t, Bin::kLow, {}, {}, {}},
                                  Region{t, Bin::kHigh, {}, {}, {}}};
    for (const auto &[concept_iri, members] : concept_members) {
      const ConceptChangeProfile *p = FindProfile(profiles, concept_iri);
      Bin bin = (p == nullptr || p->no_evidence(t))
                    ? no_evidence_bin
                    : boundaries.Classify(p->p_hat[Index(t)]);
      Region &r = bins[static_cast<std::size_t>(bin)];
      r.concepts.push_back(concept_iri);
      r.members.emplace(concept_iri,
                        std::vector<Iri>(members.begin(), members.end()));
    }
    for (auto &r : bins) {
      if (r.concepts.empty()) continue;
      std::set<Iri> all;
      for (const auto &[c, m] : r.members) all.insert(m.begin(), m.end());
      r.resources.assign(all.begin(), all.end());
      out.regions.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace deltald
