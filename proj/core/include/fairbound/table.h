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

// Sparse probability tables over general categorical variables. Cells are
// category-index tuples in the order of the table's variable list; absent
// cells have probability zero.

#ifndef FAIRBOUND_TABLE_H_
#define FAIRBOUND_TABLE_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fairbound {

struct Variable {
  std::string name;
  std::vector<std::string> domain;

  std::size_t arity() const { return domain.size(); }
  friend bool operator==(const Variable&, const Variable&) = default;
};

using Cell = std::vector<int>;

std::size_t FindVariable(std::span<const Variable> variables,
                         std::string_view name);

class ProbabilityTable {
 public:
  ProbabilityTable() = default;
  explicit ProbabilityTable(std::vector<Variable> variables);

  const std::vector<Variable>& variables() const { return variables_; }
  std::size_t IndexOf(std::string_view name) const;

  // Accumulates p into the cell. Cells outside the variables' domains throw
  // InvalidArgument.
  void Add(const Cell& cell, double p);
  double Get(const Cell& cell) const;

  const std::map<Cell, double>& cells() const { return cells_; }
  double Total() const;
  void Normalize();

  // Sums out every variable not named in `keep`; the result's variables are
  // in the order given by `keep`.
  ProbabilityTable Marginalize(std::span<const std::string> keep) const;

 private:
  void CheckCell(const Cell& cell) const;

  std::vector<Variable> variables_;
  std::map<Cell, double> cells_;
};

// 0.5 * sum |a - b| over the union of cells; tables must share variables.
double TotalVariation(const ProbabilityTable& a, const ProbabilityTable& b);

// p(target | given), column-sparse: only observed conditioning cells exist.
class ConditionalTable {
 public:
  ConditionalTable() = default;
  ConditionalTable(std::vector<Variable> target, std::vector<Variable> given);

  const std::vector<Variable>& target() const { return target_; }
  const std::vector<Variable>& given() const { return given_; }

  void Set(const Cell& given, const Cell& target, double p);
  // nullptr when the conditioning cell has no column.
  const std::map<Cell, double>* Column(const Cell& given) const;
  const std::map<Cell, std::map<Cell, double>>& columns() const {
    return columns_;
  }

  // Throws InvalidArgument if a column does not sum to one within 1e-9.
  void Validate() const;

 private:
  std::vector<Variable> target_;
  std::vector<Variable> given_;
  std::map<Cell, std::map<Cell, double>> columns_;
};

// Number of cells in the product domain; throws Overflow beyond 2^62.
std::size_t ProductDomainSize(std::span<const Variable> variables);

// Decodes a row-major flat index over the product domain into a cell.
Cell DecodeCell(std::span<const Variable> variables, std::size_t flat);

}  // namespace fairbound

#endif  // FAIRBOUND_TABLE_H_
