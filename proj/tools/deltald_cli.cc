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

// deltald: change detection, region mining and monitoring schedules for
// versioned RDF datasets.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "deltald/change_aggregate.h"
#include "deltald/change_detect.h"
#include "deltald/errors.h"
#include "deltald/evolution_sim.h"
#include "deltald/ntriples.h"
#include "deltald/scheduler.h"
#include "deltald/serialization.h"

namespace fs = std::filesystem;

namespace deltald {
namespace {

struct RunConfig {
  double theta = kDefaultTheta;
  std::string bins = "0.01,0.1";
  double epsilon = kDefaultEpsilon;
  std::size_t budget = 0;
  std::string weights = "create=1,remove=1,update=1,move=1,renew=1";
  std::uint64_t seed = 0;
  std::string strategy = "region";
  bool strict = false;
  std::string detection = "diff";
  std::size_t warmup = 1;
  bool listing = true;
  std::int64_t cycle = 0;
  std::string config_path;
  std::string out;
};

// Options registered on one subcommand, by config-file key.
using OptionTable = std::map<std::string, CLI::Option *>;

class Command {
 public:
  Command(CLI::App &parent, const char *name, const char *help)
      : app_(parent.add_subcommand(name, help)) {
    app_->add_option("--config", cfg_.config_path,
                     "JSON file with option values; flags take precedence");
  }

  CLI::App *app() { return app_; }
  RunConfig &cfg() { return cfg_; }

  void Theta() {
    Register("theta", app_->add_option("--theta", cfg_.theta,
                                       "Move/renew similarity threshold in (0, 1]")
                          ->capture_default_str());
  }
  void Bins() {
    Register("bins", app_->add_option("--bins", cfg_.bins,
                                      "Bin boundaries t1,t2 (static < t1 <= low < t2 <= high)")
                         ->capture_default_str());
  }
  void Epsilon() {
    Register("epsilon", app_->add_option("--epsilon", cfg_.epsilon,
                                         "Exploration share of the budget in [0, 1)")
                            ->capture_default_str());
  }
  void BudgetFlag() {
    Register("budget",
             app_->add_option("--budget", cfg_.budget, "Resources fetched per cycle (>= 1)"));
  }
  void Weights() {
    Register("weights", app_->add_option("--weights", cfg_.weights,
                                         "Use-case weights, e.g. move=1,update=0.5; "
                                         "unlisted types get 0")
                            ->capture_default_str());
  }
  void Seed() {
    Register("seed", app_->add_option("--seed", cfg_.seed, "Random seed")
                         ->capture_default_str());
  }
  void StrategyFlag() {
    Register("strategy",
             app_->add_option("--strategy", cfg_.strategy,
                              "region|age|size|change-ratio|random")
                 ->capture_default_str());
  }
  void Strict() {
    Register("strict", app_->add_flag("--strict", cfg_.strict,
                                      "Fail on malformed N-Triples lines instead of "
                                      "skipping them (default: off)"));
  }
  void Detection() {
    Register("detection", app_->add_option("--detection", cfg_.detection,
                                           "oracle|diff")
                              ->capture_default_str());
  }
  void Warmup() {
    Register("warmup", app_->add_option("--warmup", cfg_.warmup,
                                        "Transitions observed in full before scheduling")
                           ->capture_default_str());
  }
  void Listing() {
    Register("listing",
             app_->add_option("--listing", cfg_.listing,
                              "Expose new subjects of each version to the detector")
                 ->capture_default_str());
  }
  void Cycle() {
    Register("cycle", app_->add_option("--cycle", cfg_.cycle, "Cycle index of the plan")
                          ->capture_default_str());
  }
  void Out(const char *help) {
    Register("out", app_->add_option("--out", cfg_.out, help));
  }

  // Fills options not given on the command line from --config.
  void ApplyConfigFile() {
    if (cfg_.config_path.empty()) return;
    const Json j = ReadJsonFile(cfg_.config_path);
    if (!j.is_object()) throw Error("'" + cfg_.config_path + "' must hold a JSON object");
    static const std::set<std::string> kKnown = {
        "theta", "bins",     "epsilon", "budget",  "weights", "seed", "strategy",
        "strict", "detection", "warmup", "listing", "cycle",   "out"};
    for (const auto &[key, value] : j.items()) {
      if (!kKnown.count(key)) {
        throw Error("unknown key '" + key + "' in '" + cfg_.config_path + "'");
      }
      auto it = options_.find(key);
      if (it == options_.end() || it->second->count() > 0) continue;
      it->second->add_result(AsFlagText(key, value));
      it->second->run_callback();
    }
  }

 private:
  void Register(const std::string &key, CLI::Option *opt) { options_[key] = opt; }

  static std::string AsFlagText(const std::string &key, const Json &v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (key == "bins" && v.is_array() && v.size() == 2) {
      return v[0].dump() + "," + v[1].dump();
    }
    if (key == "weights" && v.is_object()) {
      std::string s;
      for (const auto &[name, w] : v.items()) {
        if (!s.empty()) s += ",";
        s += name + "=" + w.dump();
      }
      return s;
    }
    throw Error("config key '" + key + "' has an unsupported value " + v.dump());
  }

  CLI::App *app_;
  RunConfig cfg_;
  OptionTable options_;
};

Boundaries ParseBins(const std::string &text) {
  Boundaries b;
  char comma = 0;
  std::istringstream in(text);
  if (!(in >> b.low >> comma >> b.high) || comma != ',' || !(in >> std::ws).eof()) {
    throw BadBoundaries("--bins expects t1,t2, got '" + text + "'");
  }
  b.Validate();
  return b;
}

void CheckTheta(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw BadConfig("--theta must lie in (0, 1]");
  }
}

void CheckEpsilon(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw BadConfig("--epsilon must lie in [0, 1)");
  }
}

Strategy ParseStrategyFlag(const std::string &s) {
  auto strategy = ParseStrategy(s);
  if (!strategy) throw BadConfig("unknown strategy '" + s + "'");
  return *strategy;
}

UseCaseWeights ParseWeightsFlag(const std::string &s) {
  try {
    return UseCaseWeights::Parse(s);
  } catch (const std::invalid_argument &e) {
    throw BadConfig(std::string("--weights: ") + e.what());
  }
}

Json EffectiveConfig(const RunConfig &c) {
  const Boundaries b = ParseBins(c.bins);
  return {{"theta", c.theta},
          {"bins", {b.low, b.high}},
          {"epsilon", c.epsilon},
          {"budget", c.budget},
          {"weights", ToJson(ParseWeightsFlag(c.weights))},
          {"seed", c.seed},
          {"strategy", c.strategy},
          {"strict", c.strict},
          {"detection", c.detection},
          {"warmup", c.warmup},
          {"listing", c.listing},
          {"cycle", c.cycle}};
}

// Adds provenance and writes `body` when --out was given.
void Emit(const RunConfig &c, Json body) {
  if (c.out.empty()) return;
  body["tool_version"] = std::string(kToolVersion);
  body["config"] = EffectiveConfig(c);
  WriteJsonFile(c.out, body);
}

std::string VersionId(const fs::path &path) {
  fs::path p = path.filename();
  if (p.extension() == ".gz") p = p.stem();
  return p.stem().string();
}

DatasetVersion Load(const std::string &path, const RunConfig &c) {
  ParseOptions options;
  options.strict = c.strict;
  ParseResult r = LoadNTriplesFile(path, VersionId(path), options);
  const auto skipped = r.report.malformed + r.report.blank_subjects;
  if (skipped > 0) {
    std::cerr << "warning: '" << path << "': skipped " << skipped
              << " line(s) (" << r.report.malformed << " malformed, "
              << r.report.blank_subjects << " blank-node subject)\n";
  }
  return std::move(r.dataset);
}

std::string Summary(const ChangeSet &cs) {
  const auto counts = cs.Counts();
  std::string s;
  for (ChangeType t : kAllChangeTypes) {
    if (!s.empty()) s += " ";
    s += std::string(ToString(t)) + "=" + std::to_string(counts[Index(t)]);
  }
  return s;
}

std::string PrfLine(const Counts &c) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "P=%.4f R=%.4f F=%.4f", c.precision(),
                c.recall(), c.f_measure());
  return buf;
}

// Corpus directory: truth.json lists the version ids; each version is
// stored as <id>.nt next to it.
Corpus LoadCorpus(const fs::path &dir, const RunConfig &c) {
  const Json truth = ReadJsonFile(dir / "truth.json");
  Corpus corpus;
  if (!truth.contains("versions") || !truth.contains("changesets")) {
    throw FormatError("'" + (dir / "truth.json").string() +
                      "' needs 'versions' and 'changesets'");
  }
  for (const auto &id : truth["versions"]) {
    corpus.versions.push_back(Load((dir / (id.get<std::string>() + ".nt")).string(), c));
  }
  for (const auto &cs : truth["changesets"]) {
    corpus.truth.push_back(ChangeSetFromJson(cs));
  }
  return corpus;
}

void WriteCorpus(const fs::path &dir, const Corpus &corpus,
                 const SyntheticConfig &cfg) {
  fs::create_directories(dir);
  Json versions = Json::array();
  for (const auto &v : corpus.versions) {
    SaveNTriplesFile(dir / (v.id() + ".nt"), v);
    versions.push_back(v.id());
  }
  Json changesets = Json::array();
  for (const auto &cs : corpus.truth) changesets.push_back(ToJson(cs));
  WriteJsonFile(dir / "truth.json", {{"tool_version", std::string(kToolVersion)},
                                     {"config", ToJson(cfg)},
                                     {"versions", std::move(versions)},
                                     {"changesets", std::move(changesets)}});
}

int Run(int argc, char **argv) {
  CLI::App app{"deltald: detect changes between RDF dataset versions, mine "
               "change regions and plan budgeted monitoring"};
  app.require_subcommand(1);

  // diff
  Command diff(app, "diff", "Classify the changes between two N-Triples versions");
  std::string v1_path, v2_path;
  diff.app()->add_option("v1", v1_path, "Old version (.nt or .nt.gz)")->required();
  diff.app()->add_option("v2", v2_path, "New version (.nt or .nt.gz)")->required();
  diff.Theta();
  diff.Strict();
  diff.Out("Write the change set JSON here");

  // aggregate
  Command aggregate(app, "aggregate",
                    "Estimate per-concept change probabilities from change sets");
  std::vector<std::string> changeset_paths, dataset_paths;
  aggregate.app()
      ->add_option("--changesets", changeset_paths, "Change set JSON files, in order")
      ->required();
  aggregate.app()
      ->add_option("--datasets", dataset_paths,
                   "The n + 1 versions the change sets connect, in order")
      ->required();
  aggregate.Strict();
  aggregate.Out("Write the profiles JSON here");

  // regions
  Command regions(app, "regions", "Bin concepts into static / low / high regions");
  std::string profiles_path, reference_path;
  regions.app()->add_option("profiles", profiles_path, "Profiles JSON")->required();
  regions.app()
      ->add_option("reference", reference_path, "Version whose resources populate regions")
      ->required();
  regions.Bins();
  regions.Strict();
  regions.Out("Write the regions JSON here");

  // schedule
  Command schedule(app, "schedule", "Plan one monitoring cycle");
  std::string regions_path, sched_profiles_path, history_path;
  schedule.app()->add_option("regions", regions_path, "Regions JSON")->required();
  schedule.app()->add_option("profiles", sched_profiles_path, "Profiles JSON")->required();
  schedule.app()->add_option("--history", history_path, "Fetch history JSON");
  schedule.BudgetFlag();
  schedule.Epsilon();
  schedule.Weights();
  schedule.StrategyFlag();
  schedule.Seed();
  schedule.Cycle();
  schedule.Out("Write the plan JSON here");

  // simulate
  Command simulate(app, "simulate", "Replay a corpus under a monitoring strategy");
  std::string corpus_dir, synthetic_path;
  auto *corpus_opt = simulate.app()->add_option(
      "--corpus", corpus_dir, "Corpus directory written by `generate`");
  auto *synthetic_opt = simulate.app()->add_option(
      "--synthetic", synthetic_path, "Synthetic corpus config JSON");
  corpus_opt->excludes(synthetic_opt);
  simulate.StrategyFlag();
  simulate.BudgetFlag();
  simulate.Epsilon();
  simulate.Weights();
  simulate.Bins();
  simulate.Theta();
  simulate.Warmup();
  simulate.Detection();
  simulate.Listing();
  simulate.Seed();
  simulate.Strict();
  simulate.Out("Write the simulation result JSON here");

  // generate
  Command generate(app, "generate", "Write a synthetic evolving corpus");
  std::string gen_config;
  generate.app()->add_option("synthetic_config", gen_config, "Synthetic corpus config JSON")->required();
  std::optional<std::uint64_t> gen_seed;
  generate.app()->add_option("--seed", gen_seed, "Override the config seed");
  std::string gen_out;
  generate.app()->add_option("--out", gen_out, "Output directory")->required();

  // evaluate
  Command evaluate(app, "evaluate",
                   "Score detected move/renew pairs against a gold standard");
  std::string eval_changes, gold_path;
  evaluate.app()->add_option("changeset", eval_changes, "Change set JSON")->required();
  evaluate.app()->add_option("gold", gold_path, "Gold standard TSV (old<TAB>new)")->required();
  evaluate.Out("Write the report JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }

  if (diff.app()->parsed()) {
    diff.ApplyConfigFile();
    RunConfig &c = diff.cfg();
    CheckTheta(c.theta);
    const DatasetVersion v1 = Load(v1_path, c);
    const DatasetVersion v2 = Load(v2_path, c);
    const ChangeSet cs = DiffVersions(v1, v2, c.theta);
    std::cout << Summary(cs) << "\n";
    Emit(c, ToJson(cs));
  } else if (aggregate.app()->parsed()) {
    aggregate.ApplyConfigFile();
    RunConfig &c = aggregate.cfg();
    std::vector<ChangeSet> changesets;
    for (const auto &p : changeset_paths) {
      changesets.push_back(ChangeSetFromJson(ReadJsonFile(p)));
    }
    std::vector<DatasetVersion> versions;
    for (const auto &p : dataset_paths) versions.push_back(Load(p, c));
    const auto records = AggregateTransitions(changesets, versions);
    Json transitions = Json::array();
    for (const auto &r : records) transitions.push_back(ToJson(r));
    const ProfileSet profiles = EstimateProbabilities(records);
    std::cout << profiles.size() << " concept(s) over " << records.size()
              << " transition(s)\n";
    Emit(c, {{"transitions", std::move(transitions)}, {"profiles", ToJson(profiles)}});
  } else if (regions.app()->parsed()) {
    regions.ApplyConfigFile();
    RunConfig &c = regions.cfg();
    const Boundaries b = ParseBins(c.bins);
    const ProfileSet profiles = ProfilesFromJson(ReadJsonFile(profiles_path));
    const DatasetVersion reference = Load(reference_path, c);
    const RegionSet rs = BinConceptsIntoRegions(profiles, b, reference);
    for (const auto &r : rs.regions) {
      std::cout << r.Key() << " concepts=" << r.concepts.size()
                << " resources=" << r.resources.size() << "\n";
    }
    Emit(c, ToJson(rs));
  } else if (schedule.app()->parsed()) {
    schedule.ApplyConfigFile();
    RunConfig &c = schedule.cfg();
    CheckEpsilon(c.epsilon);
    if (c.budget < 1) throw BadConfig("--budget must be >= 1");
    const Budget budget(c.budget);
    const Strategy strategy = ParseStrategyFlag(c.strategy);
    const UseCaseWeights weights = ParseWeightsFlag(c.weights);
    const RegionSet rs = RegionsFromJson(ReadJsonFile(regions_path));
    const ProfileSet profiles = ProfilesFromJson(ReadJsonFile(sched_profiles_path));
    FetchHistory history;
    if (!history_path.empty()) history = HistoryFromJson(ReadJsonFile(history_path));
    SchedulePlan plan;
    if (strategy == Strategy::kRegion) {
      plan = PlanRegions(rs, profiles, weights, budget, c.epsilon, history, c.cycle);
    } else {
      std::set<Iri> all;
      for (const auto &r : rs.regions) all.insert(r.resources.begin(), r.resources.end());
      const std::vector<Iri> listing(all.begin(), all.end());
      plan = BaselinePlan(strategy, listing, history, budget, c.cycle, c.seed);
    }
    for (const auto &a : plan.allocations) {
      std::cout << a.key << " quota=" << a.quota << "\n";
    }
    Emit(c, ToJson(plan));
  } else if (simulate.app()->parsed()) {
    simulate.ApplyConfigFile();
    RunConfig &c = simulate.cfg();
    if (corpus_dir.empty() == synthetic_path.empty()) {
      throw BadConfig("simulate needs exactly one of --corpus or --synthetic");
    }
    CheckTheta(c.theta);
    CheckEpsilon(c.epsilon);
    if (c.budget < 1) throw BadConfig("--budget must be >= 1");
    SimulationOptions opts;
    opts.strategy = ParseStrategyFlag(c.strategy);
    opts.budget = c.budget;
    opts.epsilon = c.epsilon;
    opts.weights = ParseWeightsFlag(c.weights);
    opts.boundaries = ParseBins(c.bins);
    opts.warmup = c.warmup;
    auto detection = ParseDetectionModel(c.detection);
    if (!detection) throw BadConfig("unknown detection model '" + c.detection + "'");
    opts.detection = *detection;
    opts.theta = c.theta;
    opts.listing = c.listing;
    opts.seed = c.seed;
    const Corpus corpus =
        corpus_dir.empty()
            ? GenerateSyntheticCorpus(SyntheticConfigFromJson(ReadJsonFile(synthetic_path)))
            : LoadCorpus(corpus_dir, c);
    const SimulationResult result = RunSimulation(corpus, opts);
    std::cout << result.strategy << " " << PrfLine(result.cumulative.overall)
              << " optimal_F=";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", result.optimal_f_measure);
    std::cout << buf << " fetches=" << result.total_fetches << "\n";
    Emit(c, ToJson(result));
  } else if (generate.app()->parsed()) {
    SyntheticConfig cfg = SyntheticConfigFromJson(ReadJsonFile(gen_config));
    if (gen_seed) cfg.seed = *gen_seed;
    const Corpus corpus = GenerateSyntheticCorpus(cfg);
    WriteCorpus(gen_out, corpus, cfg);
    std::cout << corpus.versions.size() << " versions written to " << gen_out << "\n";
  } else if (evaluate.app()->parsed()) {
    evaluate.ApplyConfigFile();
    const ChangeSet cs = ChangeSetFromJson(ReadJsonFile(eval_changes));
    const EvaluationReport report = EvaluateMoves(cs, LoadGoldStandard(gold_path));
    std::cout << PrfLine(report.overall) << "\n";
    Emit(evaluate.cfg(), ToJson(report));
  }
  return 0;
}

}  // namespace
}  // namespace deltald

int main(int argc, char **argv) {
  try {
    return deltald::Run(argc, argv);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
