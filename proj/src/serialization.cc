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

#include "deltald/serialization.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "deltald/ntriples.h"

namespace deltald {

namespace {

[[noreturn]] void Fail(const std::string &what) { throw FormatError(what); }

const Json &Field(const Json &j, const char *name) {
  if (!j.is_object() || !j.contains(name)) {
    Fail(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

std::string GetString(const Json &j, const char *name) {
  const Json &v = Field(j, name);
  if (!v.is_string()) Fail(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double GetNumber(const Json &j, const char *name) {
  const Json &v = Field(j, name);
  if (!v.is_number()) Fail(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

std::uint64_t GetCount(const Json &j, const char *name) {
  const Json &v = Field(j, name);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
    Fail(std::string("field '") + name + "' must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

Iri IriFromJson(const Json &j) {
  if (!j.is_string()) Fail("IRI must be a string");
  const auto s = j.get<std::string>();
  if (!s.empty() && s.front() == '<') {
    if (auto iri = ParseIriToken(s)) return *iri;
  } else if (Iri::IsValid(s)) {
    return Iri(s);
  }
  Fail("bad IRI '" + s + "'");
}

Term TermFromJson(const Json &j, std::string_view scope) {
  if (!j.is_string()) Fail("term must be a string");
  auto term = ParseTermToken(j.get<std::string>(), scope);
  if (!term) Fail("bad term '" + j.get<std::string>() + "'");
  return *term;
}

ChangeType ChangeTypeFromJson(const Json &j) {
  if (j.is_string()) {
    if (auto t = ParseChangeType(j.get<std::string>())) return *t;
  }
  Fail("bad change type " + j.dump());
}

Bin BinFromJson(const Json &j) {
  if (j.is_string()) {
    if (auto b = ParseBin(j.get<std::string>())) return *b;
  }
  Fail("bad bin " + j.dump());
}

Json PairsToJson(const Description &pairs) {
  Json out = Json::array();
  for (const auto &po : pairs) {
    out.push_back({po.predicate.ToNTriples(), po.object.token()});
  }
  return out;
}

Description PairsFromJson(const Json &j, std::string_view scope) {
  if (!j.is_array()) Fail("pair list must be an array");
  Description out;
  for (const auto &row : j) {
    if (!row.is_array() || row.size() != 2) Fail("pair must be [p, o]");
    out.push_back({IriFromJson(row[0]), TermFromJson(row[1], scope)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Json TriplesToJson(const std::vector<Triple> &triples) {
  Json out = Json::array();
  for (const auto &t : triples) {
    out.push_back(
        {t.subject.ToNTriples(), t.predicate.ToNTriples(), t.object.token()});
  }
  return out;
}

std::vector<Triple> TriplesFromJson(const Json &j, std::string_view scope) {
  if (!j.is_array()) Fail("triple list must be an array");
  std::vector<Triple> out;
  for (const auto &row : j) {
    if (!row.is_array() || row.size() != 3) Fail("triple must be [s, p, o]");
    out.push_back(
        {IriFromJson(row[0]), IriFromJson(row[1]), TermFromJson(row[2], scope)});
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Json IriList(const std::vector<Iri> &iris) {
  Json out = Json::array();
  for (const auto &i : iris) out.push_back(i.str());
  return out;
}

std::vector<Iri> IriListFromJson(const Json &j) {
  if (!j.is_array()) Fail("IRI list must be an array");
  std::vector<Iri> out;
  for (const auto &v : j) out.push_back(IriFromJson(v));
  return out;
}

Json BinRange(const Boundaries &b, Bin bin) {
  switch (bin) {
    case Bin::kStatic:
      return {0.0, b.low};
    case Bin::kLow:
      return {b.low, b.high};
    case Bin::kHigh:
      return {b.high, 1.0};
  }
  return nullptr;
}

Boundaries BoundariesFromJson(const Json &j) {
  Boundaries b;
  b.low = GetNumber(j, "low");
  b.high = GetNumber(j, "high");
  b.Validate();
  return b;
}

}  // namespace

Json ToJson(const ChangeSet &cs) {
  Json changes = Json::array();
  for (const auto &rc : cs.resource_changes) {
    Json row;
    row["change_type"] = std::string(ToString(rc.change_type));
    if (rc.old_iri) row["old_iri"] = rc.old_iri->str();
    if (rc.new_iri) row["new_iri"] = rc.new_iri->str();
    if (rc.similarity) row["similarity"] = *rc.similarity;
    row["added"] = PairsToJson(rc.added_pairs);
    row["deleted"] = PairsToJson(rc.deleted_pairs);
    changes.push_back(std::move(row));
  }
  Json j;
  j["from_version"] = cs.from_version;
  j["to_version"] = cs.to_version;
  j["theta"] = cs.theta;
  j["resource_changes"] = std::move(changes);
  j["triples_added"] = TriplesToJson(cs.triples_added);
  j["triples_deleted"] = TriplesToJson(cs.triples_deleted);
  return j;
}

ChangeSet ChangeSetFromJson(const Json &j) {
  ChangeSet cs;
  cs.from_version = GetString(j, "from_version");
  cs.to_version = GetString(j, "to_version");
  cs.theta = GetNumber(j, "theta");
  const Json &changes = Field(j, "resource_changes");
  if (!changes.is_array()) Fail("'resource_changes' must be an array");
  for (const auto &row : changes) {
    ResourceChange rc{ChangeTypeFromJson(Field(row, "change_type")),
                      std::nullopt, std::nullopt, std::nullopt, {}, {}};
    if (row.contains("old_iri")) rc.old_iri = IriFromJson(row["old_iri"]);
    if (row.contains("new_iri")) rc.new_iri = IriFromJson(row["new_iri"]);
    if (row.contains("similarity")) rc.similarity = GetNumber(row, "similarity");
    const bool needs_old = rc.change_type != ChangeType::kCreate;
    const bool needs_new = rc.change_type != ChangeType::kRemove;
    if ((needs_old && !rc.old_iri) || (needs_new && !rc.new_iri)) {
      Fail(std::string(ToString(rc.change_type)) + " change lacks an IRI");
    }
    if (row.contains("added")) rc.added_pairs = PairsFromJson(row["added"], cs.to_version);
    if (row.contains("deleted")) {
      rc.deleted_pairs = PairsFromJson(row["deleted"], cs.from_version);
    }
    cs.resource_changes.push_back(std::move(rc));
  }
  cs.triples_added = TriplesFromJson(Field(j, "triples_added"), cs.to_version);
  cs.triples_deleted =
      TriplesFromJson(Field(j, "triples_deleted"), cs.from_version);
  return cs;
}

Json ToJson(const ProfileSet &profiles) {
  Json rows = Json::array();
  for (const auto &p : profiles) {
    for (ChangeType t : kAllChangeTypes) {
      const auto i = Index(t);
      rows.push_back({{"concept", p.concept_iri.str()},
                      {"change_type", std::string(ToString(t))},
                      {"k", p.total_k[i]},
                      {"n", p.total_n[i]},
                      {"p_hat", p.p_hat[i]},
                      {"no_evidence", p.no_evidence(t)}});
    }
  }
  return rows;
}

ProfileSet ProfilesFromJson(const Json &j) {
  const Json &rows = j.is_object() ? Field(j, "profiles") : j;
  if (!rows.is_array()) Fail("profiles must be an array of rows");
  std::map<Iri, ConceptChangeProfile> by_concept;
  for (const auto &row : rows) {
    Iri c = IriFromJson(Field(row, "concept"));
    const auto i = Index(ChangeTypeFromJson(Field(row, "change_type")));
    auto it = by_concept.find(c);
    if (it == by_concept.end()) {
      it = by_concept.emplace(c, ConceptChangeProfile{c, {}, {}, {}}).first;
      it->second.p_hat.fill(SmoothedRate(0, 0));
    }
    auto &p = it->second;
    p.total_k[i] = GetCount(row, "k");
    p.total_n[i] = GetCount(row, "n");
    if (p.total_k[i] > p.total_n[i]) Fail("profile row has k > n");
    p.p_hat[i] = SmoothedRate(p.total_k[i], p.total_n[i]);
  }
  ProfileSet out;
  for (auto &[c, p] : by_concept) out.push_back(std::move(p));
  return out;
}

Json ToJson(const Boundaries &b) { return {{"low", b.low}, {"high", b.high}}; }

Json ToJson(const RegionSet &regions) {
  Json rows = Json::array();
  for (const auto &r : regions.regions) {
    Json members = Json::object();
    for (const auto &[c, rs] : r.members) members[c.str()] = IriList(rs);
    rows.push_back({{"change_type", std::string(ToString(r.change_type))},
                    {"bin", std::string(ToString(r.bin))},
                    {"boundaries", BinRange(regions.boundaries, r.bin)},
                    {"concepts", IriList(r.concepts)},
                    {"members", std::move(members)},
                    {"resource_count", r.resources.size()}});
  }
  return {{"reference_version", regions.reference_version},
          {"boundaries", ToJson(regions.boundaries)},
          {"no_evidence_bin", std::string(ToString(regions.no_evidence_bin))},
          {"regions", std::move(rows)}};
}

RegionSet RegionsFromJson(const Json &j) {
  RegionSet out;
  out.reference_version = GetString(j, "reference_version");
  out.boundaries = BoundariesFromJson(Field(j, "boundaries"));
  if (j.contains("no_evidence_bin")) {
    out.no_evidence_bin = BinFromJson(j["no_evidence_bin"]);
  }
  const Json &rows = Field(j, "regions");
  if (!rows.is_array()) Fail("'regions' must be an array");
  for (const auto &row : rows) {
    Region r{ChangeTypeFromJson(Field(row, "change_type")),
             BinFromJson(Field(row, "bin")), IriListFromJson(Field(row, "concepts")),
             {}, {}};
    std::sort(r.concepts.begin(), r.concepts.end());
    const Json &members = Field(row, "members");
    if (!members.is_object()) Fail("'members' must be an object");
    std::set<Iri> all;
    for (const auto &[c, rs] : members.items()) {
      auto list = IriListFromJson(rs);
      std::sort(list.begin(), list.end());
      all.insert(list.begin(), list.end());
      r.members.emplace(IriFromJson(Json(c)), std::move(list));
    }
    r.resources.assign(all.begin(), all.end());
    out.regions.push_back(std::move(r));
  }
  std::sort(out.regions.begin(), out.regions.end(),
            [](const Region &a, const Region &b) {
              return std::pair(a.change_type, a.bin) < std::pair(b.change_type, b.bin);
            });
  return out;
}

Json ToJson(const TransitionRecord &record) {
  Json concepts = Json::object();
  for (const auto &[c, tally] : record.concepts) {
    Json k = Json::object();
    for (ChangeType t : kAllChangeTypes) {
      k[std::string(ToString(t))] = tally.k[Index(t)];
    }
    concepts[c.str()] = {{"k", std::move(k)},
                         {"source_size", tally.source_size},
                         {"target_size", tally.target_size}};
  }
  return {{"transition_index", record.transition_index},
          {"from_version", record.from_version},
          {"to_version", record.to_version},
          {"concepts", std::move(concepts)}};
}

Json ToJson(const SchedulePlan &plan) {
  Json allocations = Json::array();
  for (const auto &a : plan.allocations) {
    allocations.push_back({{"region", a.key},
                           {"quota", a.quota},
                           {"resources", IriList(a.resources)}});
  }
  return {{"cycle_index", plan.cycle_index},
          {"strategy", plan.strategy},
          {"total", plan.total()},
          {"allocations", std::move(allocations)}};
}

SchedulePlan PlanFromJson(const Json &j) {
  SchedulePlan plan;
  plan.cycle_index = static_cast<std::int64_t>(GetNumber(j, "cycle_index"));
  plan.strategy = GetString(j, "strategy");
  const Json &rows = Field(j, "allocations");
  if (!rows.is_array()) Fail("'allocations' must be an array");
  for (const auto &row : rows) {
    plan.allocations.push_back({GetString(row, "region"), GetCount(row, "quota"),
                                IriListFromJson(Field(row, "resources"))});
  }
  return plan;
}

Json ToJson(const FetchHistory &history) {
  Json rows = Json::object();
  for (const auto &[iri, r] : history.records()) {
    Json row = {{"observed_change_count", r.observed_change_count},
                {"observation_count", r.observation_count},
                {"triple_count", r.triple_count}};
    row["last_fetched_cycle"] =
        r.last_fetched_cycle ? Json(*r.last_fetched_cycle) : Json(nullptr);
    rows[iri.str()] = std::move(row);
  }
  return {{"resources", std::move(rows)}};
}

FetchHistory HistoryFromJson(const Json &j) {
  FetchHistory history;
  const Json &rows = Field(j, "resources");
  if (!rows.is_object()) Fail("'resources' must be an object");
  for (const auto &[iri, row] : rows.items()) {
    FetchRecord r;
    const Json &last = Field(row, "last_fetched_cycle");
    if (!last.is_null()) {
      if (!last.is_number_integer()) Fail("'last_fetched_cycle' must be an integer");
      r.last_fetched_cycle = last.get<std::int64_t>();
    }
    r.observed_change_count = GetCount(row, "observed_change_count");
    r.observation_count = GetCount(row, "observation_count");
    r.triple_count = GetCount(row, "triple_count");
    history.Set(IriFromJson(Json(iri)), r);
  }
  return history;
}

Json ToJson(const Counts &c) {
  return {{"true_positive", c.tp},
          {"false_positive", c.fp},
          {"false_negative", c.fn},
          {"precision", c.precision()},
          {"recall", c.recall()},
          {"f_measure", c.f_measure()}};
}

Json ToJson(const EvaluationReport &report) {
  Json by_type = Json::object();
  for (const auto &[type, c] : report.by_type) by_type[type] = ToJson(c);
  return {{"by_type", std::move(by_type)}, {"overall", ToJson(report.overall)}};
}

Json ToJson(const SimulationResult &result) {
  Json cycles = Json::array();
  for (const auto &row : result.cycles) {
    Json j = {{"transition_index", row.transition_index},
              {"fetched", row.fetched},
              {"report", ToJson(row.report)}};
    if (!row.fetched_resources.empty()) {
      j["fetched_resources"] = IriList(row.fetched_resources);
    }
    cycles.push_back(std::move(j));
  }
  return {{"strategy", result.strategy},
          {"cycles", std::move(cycles)},
          {"cumulative", ToJson(result.cumulative)},
          {"total_fetches", result.total_fetches},
          {"optimal_f_measure", result.optimal_f_measure}};
}

Json ToJson(const UseCaseWeights &weights) {
  Json j = Json::object();
  for (ChangeType t : kAllChangeTypes) {
    j[std::string(ToString(t))] = weights.raw(t);
  }
  return j;
}

Json ToJson(const SyntheticConfig &cfg) {
  Json concepts = Json::array();
  for (const auto &c : cfg.concepts) {
    Json rates = Json::object();
    for (ChangeType t : kAllChangeTypes) {
      rates[std::string(ToString(t))] = c.rates[Index(t)];
    }
    concepts.push_back({{"name", c.name},
                        {"resource_count", c.resource_count},
                        {"rates", std::move(rates)}});
  }
  return {{"seed", cfg.seed},
          {"transitions", cfg.transitions},
          {"predicates", {cfg.predicates_min, cfg.predicates_max}},
          {"base_iri", cfg.base_iri},
          {"concepts", std::move(concepts)}};
}

SyntheticConfig SyntheticConfigFromJson(const Json &j) {
  SyntheticConfig cfg;
  if (!j.is_object()) Fail("synthetic config must be an object");
  if (j.contains("seed")) cfg.seed = GetCount(j, "seed");
  if (j.contains("transitions")) cfg.transitions = GetCount(j, "transitions");
  if (j.contains("base_iri")) cfg.base_iri = GetString(j, "base_iri");
  if (j.contains("predicates")) {
    const Json &p = j["predicates"];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number_unsigned() ||
        !p[1].is_number_unsigned()) {
      Fail("'predicates' must be [min, max]");
    }
    cfg.predicates_min = p[0].get<std::size_t>();
    cfg.predicates_max = p[1].get<std::size_t>();
  }
  const Json &concepts = Field(j, "concepts");
  if (!concepts.is_array()) Fail("'concepts' must be an array");
  for (const auto &row : concepts) {
    ConceptSpec c;
    c.name = GetString(row, "name");
    c.resource_count = GetCount(row, "resource_count");
    if (row.contains("rates")) {
      const Json &rates = row["rates"];
      if (!rates.is_object()) Fail("'rates' must be an object");
      for (const auto &[name, value] : rates.items()) {
        auto t = ParseChangeType(name);
        if (!t) Fail("unknown change type '" + name + "' in rates");
        if (!value.is_number()) Fail("rate of '" + name + "' must be a number");
        c.rates[Index(*t)] = value.get<double>();
      }
    }
    cfg.concepts.push_back(std::move(c));
  }
  cfg.Validate();
  return cfg;
}

Json ReadJsonFile(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error &e) {
    throw FormatError("'" + path.string() + "': " + e.what());
  }
}

std::string DumpJson(const Json &j) { return j.dump(2) + "\n"; }

void WriteJsonFile(const std::filesystem::path &path, const Json &j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << DumpJson(j);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace deltald
