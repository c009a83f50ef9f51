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

// Declarative ingestion of delimited text into a categorical dataset. A
// recipe names the source files, how to read them, which rows to keep and
// how every raw column becomes a categorical attribute. See
// docs/recipes.md for the file format.

#ifndef FAIRBOUND_RECIPE_H_
#define FAIRBOUND_RECIPE_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairbound/dataset.h"

namespace fairbound {

inline constexpr int kRecipeFormatVersion = 1;

// New numeric column equal to the sum of existing ones.
struct DerivedColumn {
  std::string name;
  std::vector<std::string> sum;
};

struct RowFilter {
  enum class Kind { kIn, kNotIn, kRange };
  std::string column;
  Kind kind = Kind::kIn;
  std::vector<std::string> values;  // kIn / kNotIn
  double lo = 0.0;                  // kRange, inclusive
  double hi = 0.0;
};

// One interval of a numeric attribute. Bins are tried in order; a bin with
// neither bound catches everything left.
struct Bin {
  std::string label;
  std::optional<double> lt;  // value < lt
  std::optional<double> le;  // value <= le
};

struct AttributeSpec {
  enum class Kind { kIdentity, kValues, kBins };
  enum class OnUnknown { kError, kRejectRow };

  std::string name;
  std::string source;  // raw column, defaults to name
  Kind kind = Kind::kIdentity;
  std::vector<std::string> categories;  // output domain, in order
  std::map<std::string, std::string> values;
  std::optional<std::string> default_value;
  std::vector<Bin> bins;
  bool lowercase = false;
  OnUnknown on_unknown = OnUnknown::kError;
};

struct DatasetRecipe {
  std::string name;
  std::vector<std::filesystem::path> sources;  // resolved against the recipe
  char delimiter = ',';
  bool whitespace_delimited = false;
  bool header = true;
  std::vector<std::string> columns;  // required when header is false
  std::string comment_prefix;
  bool trim = true;
  std::vector<std::string> null_values;
  std::vector<DerivedColumn> derive;
  std::vector<RowFilter> filters;
  std::vector<AttributeSpec> attributes;
  std::string label;
  std::string favourable;
  std::string protected_attribute;
  std::string privileged;

  // Label and protected attribute exist and are binary, the favourable and
  // privileged values are declared categories, and the privileged group is
  // listed last so that category 0 is the unprivileged group.
  void Validate() const;
};

// Throws SchemaMismatch on structural problems. Relative source paths are
// resolved against `base_dir`.
DatasetRecipe ParseRecipe(const nlohmann::json& j,
                          const std::filesystem::path& base_dir);
DatasetRecipe LoadRecipe(const std::filesystem::path& path);

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_with_nulls = 0;
  std::size_t rows_filtered = 0;
  std::size_t rows_rejected = 0;  // unknown values under reject_row
  std::size_t rows_kept = 0;
};

struct IngestResult {
  CategoricalDataset data;
  IngestReport report;
};

// Reads every source, drops rows with a null in any column the recipe uses,
// applies derivations, filters and attribute transforms in that order.
// Throws IoError, ParseError (file:line located), UnknownCategory and
// EmptyDataset.
IngestResult Ingest(const DatasetRecipe& recipe);

}  // namespace fairbound

#endif  // FAIRBOUND_RECIPE_H_
