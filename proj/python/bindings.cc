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

// Python bindings. Structured results cross the boundary as JSON text in
// the same schema the command-line tool writes; the package wrapper
// decodes them into dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "deltald/change_aggregate.h"
#include "deltald/change_detect.h"
#include "deltald/errors.h"
#include "deltald/evolution_sim.h"
#include "deltald/ntriples.h"
#include "deltald/scheduler.h"
#include "deltald/serialization.h"

namespace py = pybind11;

namespace deltald {
namespace {

std::string Dump(const Json &j) { return j.dump(); }

Json Parse(const std::string &text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw FormatError(e.what());
  }
}

std::string Diff(const DatasetVersion &v1, const DatasetVersion &v2,
                 double theta) {
  return Dump(ToJson(DiffVersions(v1, v2, theta)));
}

DatasetVersion Apply(const DatasetVersion &v1, const std::string &changeset) {
  return ApplyChangeSet(v1, ChangeSetFromJson(Parse(changeset)));
}

std::string Aggregate(const std::vector<std::string> &changesets,
                      const std::vector<DatasetVersion> &versions) {
  std::vector<ChangeSet> cs;
  for (const auto &text : changesets) cs.push_back(ChangeSetFromJson(Parse(text)));
  return Dump(ToJson(EstimateProbabilities(AggregateTransitions(cs, versions))));
}

std::string Regions(const std::string &profiles, const DatasetVersion &reference,
                    double low, double high) {
  return Dump(ToJson(BinConceptsIntoRegions(ProfilesFromJson(Parse(profiles)),
                                            Boundaries{low, high}, reference)));
}

std::string Plan(const std::string &regions, const std::string &profiles,
                 const std::string &weights, std::size_t budget, double epsilon,
                 const std::string &history, std::int64_t cycle) {
  FetchHistory h;
  if (!history.empty()) h = HistoryFromJson(Parse(history));
  return Dump(ToJson(PlanRegions(RegionsFromJson(Parse(regions)),
                                 ProfilesFromJson(Parse(profiles)),
                                 UseCaseWeights::Parse(weights), Budget(budget),
                                 epsilon, h, cycle)));
}

py::tuple Generate(const std::string &config) {
  Corpus corpus = GenerateSyntheticCorpus(SyntheticConfigFromJson(Parse(config)));
  std::vector<std::string> truth;
  for (const auto &cs : corpus.truth) truth.push_back(Dump(ToJson(cs)));
  return py::make_tuple(std::move(corpus.versions), std::move(truth));
}

std::string Simulate(const std::string &config, const std::string &strategy,
                     std::size_t budget, double epsilon, const std::string &weights,
                     double low, double high, std::size_t warmup,
                     const std::string &detection, double theta, bool listing,
                     std::uint64_t seed) {
  SimulationOptions opts;
  auto s = ParseStrategy(strategy);
  if (!s) throw BadConfig("unknown strategy '" + strategy + "'");
  auto d = ParseDetectionModel(detection);
  if (!d) throw BadConfig("unknown detection model '" + detection + "'");
  opts.strategy = *s;
  opts.budget = budget;
  opts.epsilon = epsilon;
  opts.weights = UseCaseWeights::Parse(weights);
  opts.boundaries = Boundaries{low, high};
  opts.warmup = warmup;
  opts.detection = *d;
  opts.theta = theta;
  opts.listing = listing;
  opts.seed = seed;
  const Corpus corpus = GenerateSyntheticCorpus(SyntheticConfigFromJson(Parse(config)));
  return Dump(ToJson(RunSimulation(corpus, opts)));
}

std::string Evaluate(const std::string &changeset, const std::string &gold_tsv) {
  std::istringstream in(gold_tsv);
  return Dump(ToJson(EvaluateMoves(ChangeSetFromJson(Parse(changeset)),
                                   ParseGoldStandard(in))));
}

}  // namespace
}  // namespace deltald

PYBIND11_MODULE(_core, m) {
  using namespace deltald;
  m.doc() = "deltald core";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", error.ptr());
  py::register_exception<GoldStandardError>(m, "GoldStandardError", error.ptr());

  py::class_<DatasetVersion>(m, "Dataset")
      .def_property_readonly("id", &DatasetVersion::id)
      .def("__len__", &DatasetVersion::size)
      .def("subjects",
           [](const DatasetVersion &v) {
             std::vector<std::string> out;
             for (const auto &[iri, desc] : v.subjects()) out.push_back(iri.str());
             return out;
           })
      .def("concepts",
           [](const DatasetVersion &v) {
             std::map<std::string, std::vector<std::string>> out;
             for (const auto &[c, members] : v.concepts()) {
               auto &row = out[c.str()];
               for (const auto &r : members) row.push_back(r.str());
             }
             return out;
           })
      .def("to_ntriples", &SerializeNTriples)
      .def("__eq__", [](const DatasetVersion &a, const DatasetVersion &b) {
        return a.Triples() == b.Triples();
      });

  m.def(
      "parse_ntriples",
      [](const std::string &text, const std::string &version_id, bool strict) {
        return ParseNTriplesString(text, version_id, ParseOptions{strict}).dataset;
      },
      py::arg("text"), py::arg("version_id"), py::arg("strict") = false);
  m.def(
      "load_ntriples",
      [](const std::string &path, const std::string &version_id, bool strict) {
        return LoadNTriplesFile(path, version_id, ParseOptions{strict}).dataset;
      },
      py::arg("path"), py::arg("version_id"), py::arg("strict") = false);
  m.def("diff", &Diff, py::arg("v1"), py::arg("v2"), py::arg("theta") = kDefaultTheta);
  m.def("apply_changeset", &Apply, py::arg("v1"), py::arg("changeset"));
  m.def("aggregate", &Aggregate, py::arg("changesets"), py::arg("versions"));
  m.def("bin_regions", &Regions, py::arg("profiles"), py::arg("reference"),
        py::arg("low") = 0.01, py::arg("high") = 0.1);
  m.def("plan_regions", &Plan, py::arg("regions"), py::arg("profiles"),
        py::arg("weights") = "create=1,remove=1,update=1,move=1,renew=1",
        py::arg("budget"), py::arg("epsilon") = kDefaultEpsilon,
        py::arg("history") = "", py::arg("cycle") = 0);
  m.def("generate_corpus", &Generate, py::arg("config"));
  m.def("simulate", &Simulate, py::arg("config"), py::arg("strategy") = "region",
        py::arg("budget"), py::arg("epsilon") = kDefaultEpsilon,
        py::arg("weights") = "create=1,remove=1,update=1,move=1,renew=1",
        py::arg("low") = 0.01, py::arg("high") = 0.1, py::arg("warmup") = 1,
        py::arg("detection") = "diff", py::arg("theta") = kDefaultTheta,
        py::arg("listing") = true, py::arg("seed") = 0);
  m.def("evaluate_moves", &Evaluate, py::arg("changeset"), py::arg("gold_tsv"));
}
