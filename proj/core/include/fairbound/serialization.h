// Copyright 2026 The fairbound Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// File formats: JSON for reports and models, small CSV files for marginals
// and classifiers. Non-finite reals are written as JSON null.

#ifndef FAIRBOUND_SERIALIZATION_H_
#define FAIRBOUND_SERIALIZATION_H_

#include <array>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbound/data_pipeline.h"
#include "fairbound/fairness.h"
#include "fairbound/prob.h"
#include "fairbound/simulation.h"
#include "fairbound/structural.h"

namespace fairbound {

// Shortest representation that reads back to the same double.
std::string FormatDouble(double x);

nlohmann::json ToJson(const FairnessSummary& summary);
nlohmann::json ToJson(const EvalReport& report);
nlohmann::json ToJson(const AggregateReport& report);
nlohmann::json ToJson(const IngestReport& report);

// {K, pi, variables: [{name, domain, cond}]} with cond as M_i rows of K.
nlohmann::json ToJson(const LatentNBModel& model);
// Throws SchemaMismatch on malformed input and InvalidArgument when the
// parameters do not form a valid model.
LatentNBModel LatentNBModelFromJson(const nlohmann::json& j);

// One line per scenario, header first, ordered as given.
void WriteScenarioCsv(const std::vector<ScenarioResult>& results,
                      std::ostream& out);

struct MarginalFile {
  std::string var_a;
  std::string var_b;
  Marginal2 marginal = Marginal2::Uniform(MarginalRole::kInternal);
  std::vector<std::string> warnings;
};

// CSV with header `<a>,<b>,prob` and one row per (a, b) in {0, 1}^2. Totals
// within 1e-6 of one are renormalised (with a warning beyond 1e-9); anything
// else is a SchemaMismatch carrying "source:line".
MarginalFile ReadMarginalCsv(std::istream& in, const std::string& source,
                             MarginalRole role);
MarginalFile ReadMarginalCsv(const std::filesystem::path& path, MarginalRole role);

// CSV `s,o,p_yes`, four rows; p_yes indexed 2 s + o.
std::array<double, 4> ReadClassifierCsv(std::istream& in, const std::string& source);
std::array<double, 4> ReadClassifierCsv(const std::filesystem::path& path);

// {"internal": [...], "external": [...], "common": [...]}.
VariablePartition PartitionFromJson(const nlohmann::json& j);

// Reads a whole JSON file; IoError or ParseError.
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

}  // namespace fairbound

#endif  // FAIRBOUND_SERIALIZATION_H_
