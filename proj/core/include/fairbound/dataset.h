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

#ifndef FAIRBOUND_DATASET_H_
#define FAIRBOUND_DATASET_H_

#include <cstddef>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbound/table.h"

namespace fairbound {

// Rows of category indices over an ordered list of categorical variables.
// Every variable has at least two categories and every stored index lies
// inside its variable's domain.
class CategoricalDataset {
 public:
  CategoricalDataset() = default;
  explicit CategoricalDataset(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t num_variables() const { return variables_.size(); }
  std::size_t num_rows() const {
    return variables_.empty() ? 0 : values_.size() / variables_.size();
  }
  std::size_t IndexOf(std::string_view name) const;
  bool HasVariable(std::string_view name) const;

  void Reserve(std::size_t rows) { values_.reserve(rows * variables_.size()); }
  void AddRow(std::span<const int> row);

  std::span<const int> row(std::size_t i) const {
    return {values_.data() + i * variables_.size(), variables_.size()};
  }
  int at(std::size_t row, std::size_t var) const {
    return values_[row * variables_.size() + var];
  }

  CategoricalDataset Project(std::span<const std::string> names) const;
  CategoricalDataset SelectRows(std::span<const std::size_t> rows) const;

  friend bool operator==(const CategoricalDataset&,
                         const CategoricalDataset&) = default;

 private:
  std::vector<Variable> variables_;
  std::vector<int> values_;  // row-major
};

// Relative frequencies over the selected variables. Throws EmptyDataset when
// the dataset has no rows.
ProbabilityTable EmpiricalMarginal(const CategoricalDataset& data,
                                   std::span<const std::string> vars);

// Empirical p(target | given); only observed conditioning cells get columns.
ConditionalTable EmpiricalConditional(const CategoricalDataset& data,
                                      std::span<const std::string> target,
                                      std::span<const std::string> given);

// Comma-separated file with a header row; each column's domain is the sorted
// set of distinct labels seen in it.
CategoricalDataset ReadCategoricalCsv(const std::filesystem::path& path,
                                      char delimiter = ',');
void WriteCategoricalCsv(const CategoricalDataset& data, std::ostream& out);

}  // namespace fairbound

#endif  // FAIRBOUND_DATASET_H_
