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

#include "deltald/change_detect.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "deltald/errors.h"

namespace deltald {

namespace {

constexpr std::array<std::string_view, kNumChangeTypes> kChangeTypeNames = {
    "create", "remove", "update", "move", "renew"};

// Slack for comparing integer overlap ratios against a user threshold.
constexpr double kThresholdSlack = 1e-9;

bool MeetsThreshold(std::size_t inter, std::size_t uni, double theta) {
  return static_cast<double>(inter) >=
         theta * static_cast<double>(uni) - kThresholdSlack;
}

std::size_t IntersectionSize(const std::vector<int> &a,
                             const std::vector<int> &b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

void ValidateTheta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw std::invalid_argument("theta must lie in (0, 1]");
  }
}

// Pairs of `raw` whose canonical form (relative to `self`) is missing
// from `other_canonical`.
Description RawPairsOutside(const Description &raw, const Iri &self,
                            const Description &other_canonical) {
  const Term self_term(self);
  const Term token{Iri(std::string(kSelfReference))};
  Description out;
  for (const auto &po : raw) {
    PredicateObject canon =
        po.object == self_term ? PredicateObject{po.predicate, token} : po;
    if (!std::binary_search(other_canonical.begin(), other_canonical.end(),
                            canon)) {
      out.push_back(po);
    }
  }
  return out;
}

}  // namespace

std::string_view ToString(ChangeType type) {
  return kChangeTypeNames[Index(type)];
}

std::optional<ChangeType> ParseChangeType(std::string_view name) {
  for (ChangeType t : kAllChangeTypes) {
    if (ToString(t) == name) return t;
  }
  return std::nullopt;
}

PerChangeType<std::size_t> ChangeSet::Counts() const {
  PerChangeType<std::size_t> counts{};
  for (const auto &rc : resource_changes) ++counts[Index(rc.change_type)];
  return counts;
}

double Jaccard(const Description &x, const Description &y) {
  std::size_t inter = 0;
  auto i = x.begin();
  auto j = y.begin();
  while (i != x.end() && j != y.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++inter;
      ++i;
      ++j;
    }
  }
  std::size_t uni = x.size() + y.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double Similarity(const DatasetVersion &v1, const DatasetVersion &v2,
                  const Iri &a, const Iri &b) {
  return Jaccard(v1.CanonicalRepresentation(a), v2.CanonicalRepresentation(b));
}

std::vector<MatchCandidate> MatchMoved(const std::vector<Iri> &removed,
                                       const std::vector<Iri> &created,
                                       const DatasetVersion &v1,
                                       const DatasetVersion &v2,
                                       double theta) {
  ValidateTheta(theta);
  if (removed.empty() || created.empty()) return {};

  // Dictionary-encode canonical pairs so set operations run on ints.
  std::map<PredicateObject, int> dictionary;
  auto encode = [&](const Description &canon) {
    std::vector<int> ids;
    ids.reserve(canon.size());
    for (const auto &po : canon) {
      auto [it, fresh] =
          dictionary.emplace(po, static_cast<int>(dictionary.size()));
      ids.push_back(it->second);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  std::vector<std::vector<int>> old_sets;
  std::vector<std::vector<int>> new_sets;
  for (const auto &iri : removed) {
    old_sets.push_back(encode(v1.CanonicalRepresentation(iri)));
  }
  for (const auto &iri : created) {
    new_sets.push_back(encode(v2.CanonicalRepresentation(iri)));
  }

  // Prefix filtering: order tokens by ascending frequency; two sets with
  // Jaccard >= theta must share a token within their first
  // |x| - ceil(theta * |x|) + 1 tokens.
  std::vector<std::size_t> frequency(dictionary.size(), 0);
  for (const auto &s : old_sets) for (int id : s) ++frequency[id];
  for (const auto &s : new_sets) for (int id : s) ++frequency[id];
  auto rare_first = [&](int a, int b) {
    return std::tie(frequency[a], a) < std::tie(frequency[b], b);
  };
  auto prefix = [&](const std::vector<int> &s) {
    std::vector<int> ordered = s;
    std::sort(ordered.begin(), ordered.end(), rare_first);
    double required = std::ceil(theta * static_cast<double>(s.size()) - 1e-9);
    std::size_t keep = s.size() - static_cast<std::size_t>(required) + 1;
    ordered.resize(std::clamp<std::size_t>(keep, 1, ordered.size()));
    return ordered;
  };

  std::vector<std::vector<std::size_t>> index(dictionary.size());
  for (std::size_t j = 0; j < new_sets.size(); ++j) {
    for (int id : prefix(new_sets[j])) index[id].push_back(j);
  }

  std::vector<MatchCandidate> candidates;
  std::vector<std::size_t> seen_stamp(new_sets.size(), SIZE_MAX);
  for (std::size_t i = 0; i < old_sets.size(); ++i) {
    for (int id : prefix(old_sets[i])) {
      for (std::size_t j : index[id]) {
        if (seen_stamp[j] == i) continue;
        seen_stamp[j] = i;
        std::size_t inter = IntersectionSize(old_sets[i], new_sets[j]);
        std::size_t uni = old_sets[i].size() + new_sets[j].size() - inter;
        if (MeetsThreshold(inter, uni, theta)) {
          candidates.push_back({removed[i], created[j],
                                static_cast<double>(inter) /
                                    static_cast<double>(uni)});
        }
      }
    }
  }

  std::sort(candidates.begin(), candidates.end(),
            [](const MatchCandidate &a, const MatchCandidate &b) {
              if (a.similarity != b.similarity) {
                return a.similarity > b.similarity;
              }
              if (a.old_iri != b.old_iri) return a.old_iri < b.old_iri;
              return a.new_iri < b.new_iri;
            });

  std::set<Iri> used_old;
  std::set<Iri> used_new;
  std::vector<MatchCandidate> accepted;
  for (auto &c : candidates) {
    if (used_old.count(c.old_iri) || used_new.count(c.new_iri)) continue;
    used_old.insert(c.old_iri);
    used_new.insert(c.new_iri);
    accepted.push_back(std::move(c));
  }
  return accepted;
}

ChangeSet DiffVersions(const DatasetVersion &v1, const DatasetVersion &v2,
                       double theta) {
  ValidateTheta(theta);
  ChangeSet cs;
  cs.from_version = v1.id();
  cs.to_version = v2.id();
  cs.theta = theta;

  std::vector<Iri> removed;
  std::vector<Iri> created;
  auto a = v1.subjects().begin();
  auto b = v2.subjects().begin();
  const auto a_end = v1.subjects().end();
  const auto b_end = v2.subjects().end();
  while (a != a_end || b != b_end) {
    if (b == b_end || (a != a_end && a->first < b->first)) {
      removed.push_back(a->first);
      ++a;
    } else if (a == a_end || b->first < a->first) {
      created.push_back(b->first);
      ++b;
    } else {
      if (a->second != b->second) {
        ResourceChange rc{ChangeType::kUpdate, a->first, a->first,
                          std::nullopt, {}, {}};
        std::set_difference(b->second.begin(), b->second.end(),
                            a->second.begin(), a->second.end(),
                            std::back_inserter(rc.added_pairs));
        std::set_difference(a->second.begin(), a->second.end(),
                            b->second.begin(), b->second.end(),
                            std::back_inserter(rc.deleted_pairs));
        cs.resource_changes.push_back(std::move(rc));
      }
      ++a;
      ++b;
    }
  }

  std::set<Iri> matched_old;
  std::set<Iri> matched_new;
  for (auto &m : MatchMoved(removed, created, v1, v2, theta)) {
    matched_old.insert(m.old_iri);
    matched_new.insert(m.new_iri);
    ResourceChange rc{m.similarity == 1.0 ? ChangeType::kMove
                                          : ChangeType::kRenew,
                      m.old_iri, m.new_iri, m.similarity, {}, {}};
    if (rc.change_type == ChangeType::kRenew) {
      Description canon_old = v1.CanonicalRepresentation(m.old_iri);
      Description canon_new = v2.CanonicalRepresentation(m.new_iri);
      rc.deleted_pairs =
          RawPairsOutside(*v1.Find(m.old_iri), m.old_iri, canon_new);
      rc.added_pairs = RawPairsOutside(*v2.Find(m.new_iri), m.new_iri, canon_old);
    }
    cs.resource_changes.push_back(std::move(rc));
  }
  for (const auto &iri : removed) {
    if (matched_old.count(iri)) continue;
    cs.resource_changes.push_back(
        {ChangeType::kRemove, iri, std::nullopt, std::nullopt, {}, *v1.Find(iri)});
  }
  for (const auto &iri : created) {
    if (matched_new.count(iri)) continue;
    cs.resource_changes.push_back(
        {ChangeType::kCreate, std::nullopt, iri, std::nullopt, *v2.Find(iri), {}});
  }
  std::stable_sort(cs.resource_changes.begin(), cs.resource_changes.end(),
                   [](const ResourceChange &x, const ResourceChange &y) {
                     if (x.change_type != y.change_type) {
                       return x.change_type < y.change_type;
                     }
                     return x.key() < y.key();
                   });

  const std::vector<Triple> t1 = v1.Triples();
  const std::vector<Triple> t2 = v2.Triples();
  std::set_difference(t2.begin(), t2.end(), t1.begin(), t1.end(),
                      std::back_inserter(cs.triples_added));
  std::set_difference(t1.begin(), t1.end(), t2.begin(), t2.end(),
                      std::back_inserter(cs.triples_deleted));
  return cs;
}

DatasetVersion ApplyChangeSet(const DatasetVersion &v1, const ChangeSet &cs) {
  std::map<Iri, Description> subjects = v1.subjects();
  for (const auto &t : cs.triples_deleted) {
    auto it = subjects.find(t.subject);
    PredicateObject po{t.predicate, t.object};
    if (it == subjects.end()) throw MissingDeletedTriple(t.ToNTriples());
    auto pos = std::lower_bound(it->second.begin(), it->second.end(), po);
    if (pos == it->second.end() || *pos != po) {
      throw MissingDeletedTriple(t.ToNTriples());
    }
    it->second.erase(pos);
  }
  for (const auto &t : cs.triples_added) {
    subjects[t.subject].push_back({t.predicate, t.object});
  }
  return DatasetVersion::FromDescriptions(
      cs.to_version.empty() ? v1.id() : cs.to_version, std::move(subjects));
}

}  // namespace deltald
