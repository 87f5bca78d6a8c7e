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

// JSON interchange for every pipeline stage. Terms are written in their
// N-Triples token form; objects have sorted keys so reruns are
// byte-identical.

#ifndef DELTALD_SERIALIZATION_H_
#define DELTALD_SERIALIZATION_H_

#include <filesystem>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "deltald/change_aggregate.h"
#include "deltald/change_detect.h"
#include "deltald/errors.h"
#include "deltald/evolution_sim.h"
#include "deltald/scheduler.h"

namespace deltald {

using Json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "deltald 0.1.0";

// Malformed JSON input. The message names the offending field.
class FormatError : public Error {
 public:
  using Error::Error;
};

Json ToJson(const ChangeSet &cs);
// Blank nodes on the deleted side are scoped to from_version, added ones
// to to_version.
ChangeSet ChangeSetFromJson(const Json &j);

// One row per (concept, change type).
Json ToJson(const ProfileSet &profiles);
ProfileSet ProfilesFromJson(const Json &j);

Json ToJson(const RegionSet &regions);
RegionSet RegionsFromJson(const Json &j);

Json ToJson(const TransitionRecord &record);

Json ToJson(const SchedulePlan &plan);
SchedulePlan PlanFromJson(const Json &j);

Json ToJson(const FetchHistory &history);
FetchHistory HistoryFromJson(const Json &j);

Json ToJson(const Counts &counts);
Json ToJson(const EvaluationReport &report);
Json ToJson(const SimulationResult &result);

Json ToJson(const SyntheticConfig &cfg);
SyntheticConfig SyntheticConfigFromJson(const Json &j);

Json ToJson(const UseCaseWeights &weights);
Json ToJson(const Boundaries &boundaries);

// Throws Error naming the path when it cannot be read or parsed.
Json ReadJsonFile(const std::filesystem::path &path);
// Two-space indented, trailing newline.
std::string DumpJson(const Json &j);
void WriteJsonFile(const std::filesystem::path &path, const Json &j);

}  // namespace deltald

#endif  // DELTALD_SERIALIZATION_H_
