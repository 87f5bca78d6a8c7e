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

#include "deltald/evolution_sim.h"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "deltald/errors.h"
#include "deltald/ntriples.h"
#include "deltald/random.h"

namespace deltald {

namespace {

std::string Hex(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

std::string Padded(std::uint64_t n) {
  char buf[21];
  std::snprintf(buf, sizeof(buf), "%08llu", static_cast<unsigned long long>(n));
  return buf;
}

bool ValidConceptName(const std::string &name) {
  if (name.empty()) return false;
  for (unsigned char c : name) {
    if (!(std::isalnum(c) || c == '_' || c == '-' || c == '.')) return false;
  }
  return true;
}

void SortChanges(std::vector<ResourceChange> &changes) {
  std::stable_sort(changes.begin(), changes.end(),
                   [](const ResourceChange &x, const ResourceChange &y) {
                     if (x.change_type != y.change_type) {
                       return x.change_type < y.change_type;
                     }
                     return x.key() < y.key();
                   });
}

class CorpusBuilder {
 public:
  explicit CorpusBuilder(const SyntheticConfig &cfg)
      : cfg_(cfg),
        rng_(cfg.seed),
        type_(std::string(kRdfType)),
        see_also_(cfg.base_iri + "property/seeAlso"),
        extra_(cfg.base_iri + "property/extra") {
    const std::size_t pool = std::max<std::size_t>(16, 2 * cfg.predicates_max);
    for (std::size_t i = 0; i < pool; ++i) {
      predicates_.emplace_back(cfg.base_iri + "property/p" + std::to_string(i));
    }
    for (const auto &c : cfg.concepts) {
      concept_iris_.emplace_back(cfg.base_iri + "ontology/" + c.name);
    }
  }

  Corpus Build() {
    Corpus corpus;
    for (std::size_t c = 0; c < cfg_.concepts.size(); ++c) {
      for (std::size_t i = 0; i < cfg_.concepts[c].resource_count; ++i) {
        Spawn(c);
      }
    }
    corpus.versions.push_back(Snapshot(0));
    for (std::size_t t = 0; t < cfg_.transitions; ++t) {
      ChangeSet cs = Step();
      corpus.versions.push_back(Snapshot(t + 1));
      const DatasetVersion &v1 = corpus.versions[t];
      const DatasetVersion &v2 = corpus.versions[t + 1];
      cs.from_version = v1.id();
      cs.to_version = v2.id();
      const auto t1 = v1.Triples();
      const auto t2 = v2.Triples();
      std::set_difference(t2.begin(), t2.end(), t1.begin(), t1.end(),
                          std::back_inserter(cs.triples_added));
      std::set_difference(t1.begin(), t1.end(), t2.begin(), t2.end(),
                          std::back_inserter(cs.triples_deleted));
      corpus.truth.push_back(std::move(cs));
    }
    return corpus;
  }

 private:
  struct Resource {
    Iri iri;
    std::size_t concept_index;
    Description desc;
  };

  Iri FreshIri(std::size_t c) {
    return Iri(cfg_.base_iri + "resource/" + cfg_.concepts[c].name + "/" +
               Padded(next_id_++));
  }

  Term FreshLiteral() { return Term::Literal("v" + Hex(rng_.Next())); }

  void Spawn(std::size_t c) {
    Iri iri = FreshIri(c);
    Description desc;
    desc.push_back({type_, Term(concept_iris_[c])});
    const std::size_t span = cfg_.predicates_max - cfg_.predicates_min + 1;
    const std::size_t k = cfg_.predicates_min + rng_.Below(span);
    std::vector<std::size_t> picks(predicates_.size());
    for (std::size_t i = 0; i < picks.size(); ++i) picks[i] = i;
    rng_.Shuffle(picks);
    for (std::size_t i = 0; i < k; ++i) {
      desc.push_back({predicates_[picks[i]], FreshLiteral()});
    }
    if (rng_.Bernoulli(0.5)) desc.push_back({see_also_, Term(iri)});
    std::sort(desc.begin(), desc.end());
    living_.push_back({std::move(iri), c, std::move(desc)});
  }

  // Copy of `desc` with self references pointing at `to`.
  static Description Rename(const Description &desc, const Iri &from,
                            const Iri &to) {
    const Term old_term(from);
    Description out;
    for (const auto &po : desc) {
      out.push_back(po.object == old_term ? PredicateObject{po.predicate, Term(to)}
                                          : po);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  ChangeSet Step() {
    ChangeSet cs;
    cs.theta = kDefaultTheta;
    std::vector<Resource> next;
    std::vector<std::size_t> spawn;
    for (auto &r : living_) {
      const auto &rates = cfg_.concepts[r.concept_index].rates;
      const bool remove = rng_.Bernoulli(rates[Index(ChangeType::kRemove)]);
      const bool move = rng_.Bernoulli(rates[Index(ChangeType::kMove)]);
      const bool renew = rng_.Bernoulli(rates[Index(ChangeType::kRenew)]);
      const bool update = rng_.Bernoulli(rates[Index(ChangeType::kUpdate)]);
      if (rng_.Bernoulli(rates[Index(ChangeType::kCreate)])) {
        spawn.push_back(r.concept_index);
      }

      if (remove) {
        cs.resource_changes.push_back(
            {ChangeType::kRemove, r.iri, std::nullopt, std::nullopt, {}, r.desc});
        continue;
      }
      if (move || renew) {
        Iri fresh = FreshIri(r.concept_index);
        Description desc = Rename(r.desc, r.iri, fresh);
        ResourceChange rc{move ? ChangeType::kMove : ChangeType::kRenew,
                          r.iri, fresh, 1.0, {}, {}};
        if (!move) {
          PredicateObject extra{extra_, FreshLiteral()};
          desc.insert(std::lower_bound(desc.begin(), desc.end(), extra), extra);
          rc.added_pairs.push_back(extra);
          rc.similarity = Jaccard(Canonicalize(r.desc, r.iri),
                                  Canonicalize(desc, fresh));
        }
        cs.resource_changes.push_back(std::move(rc));
        next.push_back({std::move(fresh), r.concept_index, std::move(desc)});
        continue;
      }
      if (update) {
        std::vector<std::size_t> literals;
        for (std::size_t i = 0; i < r.desc.size(); ++i) {
          if (r.desc[i].object.is_literal()) literals.push_back(i);
        }
        const std::size_t victim = literals[rng_.Below(literals.size())];
        PredicateObject before = r.desc[victim];
        PredicateObject after{before.predicate, FreshLiteral()};
        r.desc[victim] = after;
        std::sort(r.desc.begin(), r.desc.end());
        cs.resource_changes.push_back(
            {ChangeType::kUpdate, r.iri, r.iri, std::nullopt, {after}, {before}});
      }
      next.push_back(std::move(r));
    }
    living_ = std::move(next);
    for (std::size_t c : spawn) {
      Spawn(c);
      const Resource &r = living_.back();
      cs.resource_changes.push_back(
          {ChangeType::kCreate, std::nullopt, r.iri, std::nullopt, r.desc, {}});
    }
    SortChanges(cs.resource_changes);
    return cs;
  }

  DatasetVersion Snapshot(std::size_t index) const {
    std::map<Iri, Description> subjects;
    for (const auto &r : living_) subjects.emplace(r.iri, r.desc);
    return DatasetVersion::FromDescriptions("v" + std::to_string(index),
                                            std::move(subjects));
  }

  const SyntheticConfig &cfg_;
  Rng rng_;
  Iri type_;
  Iri see_also_;
  Iri extra_;
  std::vector<Iri> predicates_;
  std::vector<Iri> concept_iris_;
  std::vector<Resource> living_;
  std::uint64_t next_id_ = 0;
};

std::vector<ChangeType> ActiveTypes(const UseCaseWeights &weights) {
  std::vector<ChangeType> out;
  for (ChangeType t : kAllChangeTypes) {
    if (weights.active(t)) out.push_back(t);
  }
  return out;
}

// Key identifying a change for exact comparison within its type.
std::string ChangeKey(const ResourceChange &rc) {
  switch (rc.change_type) {
    case ChangeType::kCreate:
      return rc.new_iri->str();
    case ChangeType::kRemove:
    case ChangeType::kUpdate:
      return rc.old_iri->str();
    case ChangeType::kMove:
    case ChangeType::kRenew:
      return rc.old_iri->str() + "\t" + rc.new_iri->str();
  }
  return {};
}

Counts CompareKeys(const std::set<std::string> &detected,
                   const std::set<std::string> &truth) {
  Counts c;
  for (const auto &k : detected) {
    if (truth.count(k)) {
      ++c.tp;
    } else {
      ++c.fp;
    }
  }
  for (const auto &k : truth) {
    if (!detected.count(k)) ++c.fn;
  }
  return c;
}

// The two sides a detector compares for one transition: the fetched
// resources in the old version, and the same resources plus any listed
// newcomers in the new one.
std::pair<DatasetVersion, DatasetVersion> ObservedPair(
    const DatasetVersion &from, const DatasetVersion &to,
    const std::vector<Iri> &fetched, bool listing) {
  std::vector<Iri> later = fetched;
  if (listing) {
    for (const auto &[iri, desc] : to.subjects()) {
      if (!from.HasSubject(iri)) later.push_back(iri);
    }
  }
  return {from.Restrict(fetched, from.id()), to.Restrict(later, to.id())};
}

void CheckChain(const Corpus &corpus) {
  if (corpus.versions.size() != corpus.truth.size() + 1 ||
      corpus.truth.empty()) {
    throw VersionChainBroken("corpus needs n >= 2 versions and n - 1 change sets");
  }
  for (std::size_t i = 0; i < corpus.truth.size(); ++i) {
    if (corpus.truth[i].from_version != corpus.versions[i].id() ||
        corpus.truth[i].to_version != corpus.versions[i + 1].id()) {
      throw VersionChainBroken("truth change set " + std::to_string(i) +
                               " does not link '" + corpus.versions[i].id() +
                               "' -> '" + corpus.versions[i + 1].id() + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Corpus generation

void SyntheticConfig::Validate() const {
  if (concepts.empty()) throw BadConfig("at least one concept is required");
  if (transitions < 1) throw BadConfig("transitions must be >= 1");
  if (predicates_min < 1 || predicates_min > predicates_max) {
    throw BadConfig("predicates range must satisfy 1 <= min <= max");
  }
  if (!Iri::IsValid(base_iri + "x")) throw BadConfig("bad base IRI: " + base_iri);
  std::set<std::string> names;
  for (const auto &c : concepts) {
    if (!ValidConceptName(c.name)) {
      throw BadConfig("bad concept name '" + c.name + "'");
    }
    if (!names.insert(c.name).second) {
      throw BadConfig("duplicate concept name '" + c.name + "'");
    }
    if (c.resource_count < 1) {
      throw BadConfig("concept '" + c.name + "' needs at least one resource");
    }
    for (double r : c.rates) {
      if (!(r >= 0.0 && r <= 1.0)) {
        throw BadConfig("rates of concept '" + c.name + "' must lie in [0, 1]");
      }
    }
  }
}

Corpus GenerateSyntheticCorpus(const SyntheticConfig &cfg) {
  cfg.Validate();
  return CorpusBuilder(cfg).Build();
}

// ---------------------------------------------------------------------------
// Scoring

double Counts::precision() const {
  if (tp + fp == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double Counts::recall() const {
  if (tp + fn == 0) return 1.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double Counts::f_measure() const {
  const double p = precision();
  const double r = recall();
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

EvaluationReport &EvaluationReport::operator+=(const EvaluationReport &o) {
  for (const auto &[type, counts] : o.by_type) by_type[type] += counts;
  overall += o.overall;
  return *this;
}

EvaluationReport EvaluateMoves(const ChangeSet &detected,
                               const GoldStandard &gold) {
  std::set<std::string> found;
  for (const auto &rc : detected.resource_changes) {
    if (rc.change_type == ChangeType::kMove ||
        rc.change_type == ChangeType::kRenew) {
      found.insert(rc.old_iri->str() + "\t" + rc.new_iri->str());
    }
  }
  std::set<std::string> expected;
  for (const auto &[from, to] : gold.move_pairs) {
    expected.insert(from.str() + "\t" + to.str());
  }
  EvaluationReport report;
  report.overall = CompareKeys(found, expected);
  report.by_type["move"] = report.overall;
  return report;
}

EvaluationReport CompareChanges(const ChangeSet &detected,
                                const ChangeSet &truth,
                                const std::vector<ChangeType> &types) {
  PerChangeType<std::set<std::string>> found;
  PerChangeType<std::set<std::string>> expected;
  for (const auto &rc : detected.resource_changes) {
    found[Index(rc.change_type)].insert(ChangeKey(rc));
  }
  for (const auto &rc : truth.resource_changes) {
    expected[Index(rc.change_type)].insert(ChangeKey(rc));
  }
  EvaluationReport report;
  for (ChangeType t : types) {
    Counts c = CompareKeys(found[Index(t)], expected[Index(t)]);
    report.by_type[std::string(ToString(t))] = c;
    report.overall += c;
  }
  return report;
}

GoldStandard ParseGoldStandard(std::istream &in) {
  auto parse_iri = [](std::string field) -> std::optional<Iri> {
    auto b = field.find_first_not_of(" ");
    auto e = field.find_last_not_of(" ");
    if (b == std::string::npos) return std::nullopt;
    field = field.substr(b, e - b + 1);
    if (field.front() == '<') return ParseIriToken(field);
    if (!Iri::IsValid(field)) return std::nullopt;
    return Iri(field);
  };

  GoldStandard gold;
  std::set<Iri> olds;
  std::set<Iri> news;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto tab = line.find('\t', first);
    std::optional<Iri> from;
    std::optional<Iri> to;
    if (tab != std::string::npos && line.find('\t', tab + 1) == std::string::npos) {
      from = parse_iri(line.substr(first, tab - first));
      to = parse_iri(line.substr(tab + 1));
    }
    if (!from || !to) {
      throw GoldStandardError(GoldStandardError::Kind::kMalformed,
                              "Malformed(" + std::to_string(line_no) +
                                  "): expected two tab-separated IRIs",
                              line_no);
    }
    if (!olds.insert(*from).second) {
      throw GoldStandardError(GoldStandardError::Kind::kDuplicateMapping,
                              "DuplicateMapping(" + from->ToNTriples() + ")",
                              line_no);
    }
    if (!news.insert(*to).second) {
      throw GoldStandardError(GoldStandardError::Kind::kDuplicateMapping,
                              "DuplicateMapping(" + to->ToNTriples() + ")",
                              line_no);
    }
    gold.move_pairs.emplace_back(std::move(*from), std::move(*to));
  }
  std::sort(gold.move_pairs.begin(), gold.move_pairs.end());
  return gold;
}

GoldStandard LoadGoldStandard(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return ParseGoldStandard(in);
}

// ---------------------------------------------------------------------------
// Replay

std::string_view ToString(DetectionModel m) {
  return m == DetectionModel::kOracle ? "oracle" : "diff";
}

std::optional<DetectionModel> ParseDetectionModel(std::string_view name) {
  if (name == "oracle") return DetectionModel::kOracle;
  if (name == "diff") return DetectionModel::kDiff;
  return std::nullopt;
}

RegionSet TruthRegions(const Corpus &corpus, const Boundaries &boundaries) {
  CheckChain(corpus);
  const auto records = AggregateTransitions(corpus.truth, corpus.versions);
  return BinConceptsIntoRegions(EstimateProbabilities(records), boundaries,
                                corpus.versions.front());
}

EvaluationReport OptimalAccuracyReference(const Corpus &corpus,
                                          const RegionSet &regions,
                                          const UseCaseWeights &weights,
                                          double theta, bool listing,
                                          std::size_t first_transition) {
  CheckChain(corpus);
  const auto types = ActiveTypes(weights);
  std::set<Iri> dynamic;
  for (const auto &r : regions.regions) {
    if (r.bin != Bin::kStatic && weights.active(r.change_type)) {
      dynamic.insert(r.concepts.begin(), r.concepts.end());
    }
  }
  EvaluationReport total;
  for (std::size_t t = first_transition; t < corpus.truth.size(); ++t) {
    const DatasetVersion &from = corpus.versions[t];
    std::set<Iri> watched;
    for (const auto &c : dynamic) {
      auto it = from.concepts().find(c);
      if (it != from.concepts().end()) {
        watched.insert(it->second.begin(), it->second.end());
      }
    }
    auto [seen_before, seen_after] = ObservedPair(
        from, corpus.versions[t + 1],
        std::vector<Iri>(watched.begin(), watched.end()), listing);
    total += CompareChanges(DiffVersions(seen_before, seen_after, theta),
                            corpus.truth[t], types);
  }
  return total;
}

SimulationResult RunSimulation(const Corpus &corpus,
                               const SimulationOptions &options,
                               const ViewObserver &observer) {
  CheckChain(corpus);
  const std::size_t transitions = corpus.truth.size();
  if (options.warmup >= transitions) {
    throw BadWarmup("warmup (" + std::to_string(options.warmup) +
                    ") must be smaller than the number of transitions (" +
                    std::to_string(transitions) + ")");
  }
  if (options.strategy == Strategy::kRegion && options.warmup < 1) {
    throw BadWarmup("the region strategy needs warmup >= 1");
  }
  options.boundaries.Validate();
  const Budget budget(options.budget);
  const auto types = ActiveTypes(options.weights);
  const bool is_region = options.strategy == Strategy::kRegion;

  std::vector<TransitionRecord> observations;
  FetchHistory history;

  auto observe = [&](std::size_t t, const std::vector<Iri> &fetched,
                     const ChangeSet &detected, const DatasetVersion &before,
                     const DatasetVersion &after) {
    const DatasetVersion &next = corpus.versions[t + 1];
    std::set<Iri> changed;
    for (const auto &rc : detected.resource_changes) {
      if (rc.old_iri) changed.insert(*rc.old_iri);
    }
    for (const auto &r : fetched) {
      const Description *desc = next.Find(r);
      history.RecordFetch(r, static_cast<std::int64_t>(t), changed.count(r) > 0,
                          desc == nullptr ? 0 : desc->size());
    }
    TransitionRecord rec = RecordTransition(t, detected, before, after);
    for (auto &[c, tally] : rec.concepts) tally.target_size = 0;
    if (options.listing) {
      for (const auto &[c, members] : next.concepts()) {
        rec.concepts[c].target_size = members.size();
      }
    }
    observations.push_back(std::move(rec));
  };

  // Warmup: full observation of the first transitions.
  if (is_region || options.baseline_warmup_history) {
    for (std::size_t t = 0; t < options.warmup; ++t) {
      const DatasetVersion &from = corpus.versions[t];
      std::vector<Iri> everything;
      for (const auto &[iri, desc] : from.subjects()) everything.push_back(iri);
      auto [before, after] =
          ObservedPair(from, corpus.versions[t + 1], everything, options.listing);
      observe(t, everything, DiffVersions(before, after, options.theta), before,
              after);
    }
  }

  SimulationResult result;
  result.strategy = std::string(ToString(options.strategy));
  for (std::size_t t = options.warmup; t < transitions; ++t) {
    const DatasetVersion &from = corpus.versions[t];
    const DatasetVersion &to = corpus.versions[t + 1];
    const auto cycle = static_cast<std::int64_t>(t);
    if (observer) {
      observer(SchedulerView{cycle, &from.concepts(), &observations, &history});
    }

    SchedulePlan plan;
    if (is_region) {
      const ProfileSet profiles = EstimateProbabilities(observations);
      const RegionSet regions = BinConceptsIntoRegions(
          profiles, options.boundaries, from.concepts(), from.id());
      plan = PlanRegions(regions, profiles, options.weights, budget,
                         options.epsilon, history, cycle);
    } else {
      std::vector<Iri> listing;
      for (const auto &[iri, desc] : from.subjects()) listing.push_back(iri);
      plan = BaselinePlan(options.strategy, listing, history, budget, cycle,
                          options.seed);
    }
    std::vector<Iri> fetched = plan.Fetched();
    std::sort(fetched.begin(), fetched.end());

    auto [before, after] = ObservedPair(from, to, fetched, options.listing);
    ChangeSet detected;
    if (options.detection == DetectionModel::kDiff) {
      detected = DiffVersions(before, after, options.theta);
    } else {
      detected.from_version = from.id();
      detected.to_version = to.id();
      detected.theta = options.theta;
      for (const auto &rc : corpus.truth[t].resource_changes) {
        const bool seen = rc.change_type == ChangeType::kCreate
                              ? options.listing
                              : std::binary_search(fetched.begin(),
                                                   fetched.end(), *rc.old_iri);
        if (seen) detected.resource_changes.push_back(rc);
      }
    }

    CycleRow row;
    row.transition_index = t;
    row.fetched = fetched.size();
    row.report = CompareChanges(detected, corpus.truth[t], types);
    if (options.record_fetches) row.fetched_resources = fetched;
    result.cumulative += row.report;
    result.total_fetches += row.fetched;
    result.cycles.push_back(std::move(row));

    observe(t, fetched, detected, before, after);
  }

  // Per-type rows exist even when nothing was scored.
  for (ChangeType t : types) result.cumulative.by_type[std::string(ToString(t))];

  const RegionSet truth_regions = TruthRegions(corpus, options.boundaries);
  result.optimal_f_measure =
      OptimalAccuracyReference(corpus, truth_regions, options.weights,
                               options.theta, options.listing, options.warmup)
          .overall.f_measure();
  return result;
}

}  // namespace deltald
