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

#include "fairbound/structural.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "fairbound/error.h"

namespace fairbound {
namespace {

constexpr std::size_t kMaxDenseCells = std::size_t{1} << 24;

// Distinct rows of one dataset restricted to the model variables it observes,
// with multiplicities. Equal rows contribute identical responsibilities, so
// the E-step only visits each pattern once.
struct Patterns {
  std::vector<std::size_t> model_vars;  // model variable per column
  std::vector<std::vector<int>> rows;
  std::vector<double> counts;
  double total = 0.0;
};

Patterns Collapse(const CategoricalDataset& data,
                  const std::vector<Variable>& model_vars,
                  const std::vector<std::string>& names) {
  Patterns out;
  std::vector<std::size_t> columns;
  for (const std::string& name : names) {
    out.model_vars.push_back(FindVariable(model_vars, name));
    columns.push_back(data.IndexOf(name));
  }
  std::map<std::vector<int>, std::size_t> counts;
  std::vector<int> row(columns.size());
  for (std::size_t r = 0; r < data.num_rows(); ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) row[i] = data.at(r, columns[i]);
    ++counts[row];
  }
  for (const auto& [pattern, count] : counts) {
    out.rows.push_back(pattern);
    out.counts.push_back(static_cast<double>(count));
  }
  out.total = static_cast<double>(data.num_rows());
  return out;
}

void CheckSchema(const CategoricalDataset& data, const char* label,
                 const std::vector<std::string>& own,
                 const std::vector<std::string>& common) {
  std::set<std::string> expected(own.begin(), own.end());
  expected.insert(common.begin(), common.end());
  std::set<std::string> actual;
  for (const Variable& v : data.variables()) actual.insert(v.name);
  if (expected != actual) {
    ThrowError(ErrorCode::kSchemaMismatch,
               std::string(label) +
                   " does not hold exactly its own and the common variables");
  }
  if (data.num_rows() == 0) {
    ThrowError(ErrorCode::kSchemaMismatch, std::string(label) + " has no rows");
  }
}

std::vector<Variable> ModelVariables(const CategoricalDataset& d1,
                                     const CategoricalDataset& d2,
                                     const VariablePartition& partition) {
  std::vector<Variable> vars;
  for (const std::string& name : partition.internal) {
    vars.push_back(d1.variables()[d1.IndexOf(name)]);
  }
  for (const std::string& name : partition.external) {
    vars.push_back(d2.variables()[d2.IndexOf(name)]);
  }
  for (const std::string& name : partition.common) {
    const Variable& a = d1.variables()[d1.IndexOf(name)];
    const Variable& b = d2.variables()[d2.IndexOf(name)];
    if (a.domain != b.domain) {
      ThrowError(ErrorCode::kSchemaMismatch,
                 "common variable '" + name + "' has different domains");
    }
    vars.push_back(a);
  }
  return vars;
}

std::vector<std::string> Concat(const std::vector<std::string>& a,
                                const std::vector<std::string>& b) {
  std::vector<std::string> out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

class EMState {
 public:
  EMState(const LatentNBModel& model, double smoothing)
      : model_(model), smoothing_(smoothing) {}

  const LatentNBModel& model() const { return model_; }

  // Accumulates responsibilities for all patterns and returns the objective
  // at the current parameters.
  double EStep(std::span<const Patterns> datasets) {
    const std::size_t K = static_cast<std::size_t>(model_.K);
    RefreshLogs();
    pi_acc_.assign(K, 0.0);
    s_acc_.resize(model_.cond.size());
    for (std::size_t v = 0; v < model_.cond.size(); ++v) {
      s_acc_[v].assign(model_.cond[v].size(), 0.0);
    }
    std::vector<double> logw(K);
    double objective = 0.0;
    for (const Patterns& data : datasets) {
      for (std::size_t r = 0; r < data.rows.size(); ++r) {
        const std::vector<int>& row = data.rows[r];
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < K; ++k) {
          double w = log_pi_[k];
          for (std::size_t i = 0; i < row.size(); ++i) {
            w += log_cond_[data.model_vars[i]][static_cast<std::size_t>(row[i]) * K + k];
          }
          logw[k] = w;
          top = std::max(top, w);
        }
        if (!std::isfinite(top)) {
          ThrowError(ErrorCode::kNonFiniteLikelihood,
                     "a row has zero probability under every latent class");
        }
        double z = 0.0;
        for (std::size_t k = 0; k < K; ++k) z += std::exp(logw[k] - top);
        const double lse = top + std::log(z);
        const double count = data.counts[r];
        objective += count * lse;
        for (std::size_t k = 0; k < K; ++k) {
          const double q = count * std::exp(logw[k] - lse);
          pi_acc_[k] += q;
          for (std::size_t i = 0; i < row.size(); ++i) {
            s_acc_[data.model_vars[i]][static_cast<std::size_t>(row[i]) * K + k] += q;
          }
        }
      }
    }
    if (!std::isfinite(objective)) {
      ThrowError(ErrorCode::kNonFiniteLikelihood, "log-likelihood is not finite");
    }
    if (smoothing_ > 0.0) {
      for (const auto& table : log_cond_) {
        for (double l : table) objective += smoothing_ * l;
      }
    }
    return objective;
  }

  void MStep(double n_total) {
    const std::size_t K = static_cast<std::size_t>(model_.K);
    for (std::size_t k = 0; k < K; ++k) model_.pi[k] = pi_acc_[k] / n_total;
    for (std::size_t v = 0; v < model_.cond.size(); ++v) {
      const std::size_t M = model_.variables[v].arity();
      for (std::size_t k = 0; k < K; ++k) {
        double column = 0.0;
        for (std::size_t m = 0; m < M; ++m) column += s_acc_[v][m * K + k] + smoothing_;
        for (std::size_t m = 0; m < M; ++m) {
          model_.cond[v][m * K + k] =
              column > 0.0 ? (s_acc_[v][m * K + k] + smoothing_) / column
                           : 1.0 / static_cast<double>(M);
        }
      }
    }
  }

 private:
  void RefreshLogs() {
    log_pi_.resize(model_.pi.size());
    std::transform(model_.pi.begin(), model_.pi.end(), log_pi_.begin(),
                   [](double p) { return std::log(p); });
    log_cond_.resize(model_.cond.size());
    for (std::size_t v = 0; v < model_.cond.size(); ++v) {
      log_cond_[v].resize(model_.cond[v].size());
      std::transform(model_.cond[v].begin(), model_.cond[v].end(),
                     log_cond_[v].begin(), [](double p) { return std::log(p); });
    }
  }

  LatentNBModel model_;
  double smoothing_;
  std::vector<double> log_pi_;
  std::vector<std::vector<double>> log_cond_;
  std::vector<double> pi_acc_;
  std::vector<std::vector<double>> s_acc_;
};

LatentNBModel RandomModel(const std::vector<Variable>& vars, int K, RngSeed seed) {
  Rng rng(seed);
  LatentNBModel model;
  model.K = K;
  model.variables = vars;
  model.pi = K == 1 ? std::vector<double>{1.0}
                    : SampleDirichlet(rng, static_cast<std::size_t>(K), 1.0);
  model.cond.resize(vars.size());
  for (std::size_t v = 0; v < vars.size(); ++v) {
    const std::size_t M = vars[v].arity();
    model.cond[v].assign(M * static_cast<std::size_t>(K), 0.0);
    for (int k = 0; k < K; ++k) {
      const std::vector<double> column = SampleDirichlet(rng, M, 1.0);
      for (std::size_t m = 0; m < M; ++m) {
        model.cond[v][m * static_cast<std::size_t>(K) + static_cast<std::size_t>(k)] =
            column[m];
      }
    }
  }
  return model;
}

std::vector<Patterns> PreparePatterns(const CategoricalDataset& d1,
                                      const CategoricalDataset& d2,
                                      const VariablePartition& partition,
                                      const std::vector<Variable>& vars) {
  std::vector<Patterns> out;
  out.push_back(Collapse(d1, vars, Concat(partition.internal, partition.common)));
  out.push_back(Collapse(d2, vars, Concat(partition.external, partition.common)));
  return out;
}

}  // namespace

void VariablePartition::Validate() const {
  if (common.empty()) {
    ThrowError(ErrorCode::kInvalidArgument, "partition needs a common variable");
  }
  std::set<std::string> seen;
  for (const auto* group : {&internal, &external, &common}) {
    for (const std::string& name : *group) {
      if (!seen.insert(name).second) {
        ThrowError(ErrorCode::kInvalidArgument,
                   "variable '" + name + "' appears twice in the partition");
      }
    }
  }
}

void EMConfig::Validate() const {
  if (K < 1 || max_iters < 1 || n_restarts < 1 || !(elbo_tol > 0.0) ||
      !(smoothing >= 0.0)) {
    ThrowError(ErrorCode::kInvalidArgument,
               "EM config needs K, max_iters, n_restarts >= 1, elbo_tol > 0 "
               "and smoothing >= 0");
  }
}

void LatentNBModel::Validate() const {
  const auto check_simplex = [](std::span<const double> p, const char* what) {
    double total = 0.0;
    for (double x : p) {
      if (!(x >= 0.0)) {
        ThrowError(ErrorCode::kInvalidArgument,
                   std::string(what) + " has a negative entry");
      }
      total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      ThrowError(ErrorCode::kInvalidArgument,
                 std::string(what) + " does not sum to one");
    }
  };
  if (K < 1 || pi.size() != static_cast<std::size_t>(K) ||
      cond.size() != variables.size()) {
    ThrowError(ErrorCode::kInvalidArgument, "model dimensions disagree");
  }
  check_simplex(pi, "pi");
  std::vector<double> column;
  for (std::size_t v = 0; v < variables.size(); ++v) {
    const std::size_t M = variables[v].arity();
    if (cond[v].size() != M * static_cast<std::size_t>(K)) {
      ThrowError(ErrorCode::kInvalidArgument,
                 "conditional table of '" + variables[v].name +
                     "' has the wrong size");
    }
    for (int k = 0; k < K; ++k) {
      column.clear();
      for (std::size_t m = 0; m < M; ++m) column.push_back(Cond(v, static_cast<int>(m), k));
      check_simplex(column, "conditional column");
    }
  }
}

EMFit FitLatentNB(const CategoricalDataset& d1, const CategoricalDataset& d2,
                  const VariablePartition& partition, const EMConfig& cfg) {
  partition.Validate();
  cfg.Validate();
  CheckSchema(d1, "internal dataset", partition.internal, partition.common);
  CheckSchema(d2, "external dataset", partition.external, partition.common);
  const std::vector<Variable> vars = ModelVariables(d1, d2, partition);
  const std::vector<Patterns> patterns = PreparePatterns(d1, d2, partition, vars);
  const double n_total = patterns[0].total + patterns[1].total;

  EMFit fit;
  double best = -std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.n_restarts; ++restart) {
    EMState state(RandomModel(vars, cfg.K,
                              DeriveSeed(cfg.seed, static_cast<std::uint64_t>(restart))),
                  cfg.smoothing);
    std::vector<double> trace;
    for (int iter = 0;; ++iter) {
      const double objective = state.EStep(patterns);
      const bool converged =
          !trace.empty() && objective - trace.back() < cfg.elbo_tol;
      trace.push_back(objective);
      if (converged || iter == cfg.max_iters) break;
      state.MStep(n_total);
    }
    if (restart == 0 || trace.back() > best) {
      best = trace.back();
      fit.model = state.model();
      fit.best_restart = restart;
    }
    fit.traces.push_back(std::move(trace));
  }
  fit.final_elbo = best;
  return fit;
}

double LogLikelihood(const LatentNBModel& model, const CategoricalDataset& d1,
                     const CategoricalDataset& d2,
                     const VariablePartition& partition) {
  const std::vector<Patterns> patterns =
      PreparePatterns(d1, d2, partition, model.variables);
  EMState state(model, 0.0);
  return state.EStep(patterns);
}

ProbabilityTable ModelJoint(const LatentNBModel& model,
                            std::span<const std::string> variables) {
  std::vector<std::size_t> index;
  std::vector<Variable> selected;
  for (const std::string& name : variables) {
    index.push_back(model.IndexOf(name));
    selected.push_back(model.variables[index.back()]);
  }
  const std::size_t n_cells = ProductDomainSize(selected);
  if (n_cells > kMaxDenseCells) {
    ThrowError(ErrorCode::kOverflow,
               "joint over the requested variables has too many cells");
  }
  ProbabilityTable table(selected);
  for (std::size_t flat = 0; flat < n_cells; ++flat) {
    const Cell cell = DecodeCell(selected, flat);
    double p = 0.0;
    for (int k = 0; k < model.K; ++k) {
      double term = model.pi[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < index.size(); ++i) {
        term *= model.Cond(index[i], cell[i], k);
      }
      p += term;
    }
    if (p > 0.0) table.Add(cell, p);
  }
  return table;
}

ProbabilityTable MarginalPreserve(const ProbabilityTable& external,
                                  const ConditionalTable& internal_given_common,
                                  std::vector<std::string>* warnings) {
  const auto& ext_vars = external.variables();
  const auto& targets = internal_given_common.target();
  const auto& common = internal_given_common.given();

  std::vector<std::size_t> common_cols;
  for (const Variable& c : common) {
    const std::size_t i = FindVariable(ext_vars, c.name);
    if (ext_vars[i].domain != c.domain) {
      ThrowError(ErrorCode::kDomainMismatch,
                 "common variable '" + c.name + "' has different domains");
    }
    common_cols.push_back(i);
  }
  std::vector<std::size_t> rest_cols;
  for (std::size_t i = 0; i < ext_vars.size(); ++i) {
    if (std::find(common_cols.begin(), common_cols.end(), i) == common_cols.end()) {
      rest_cols.push_back(i);
    }
  }
  for (const Variable& t : targets) {
    if (std::any_of(ext_vars.begin(), ext_vars.end(),
                    [&](const Variable& v) { return v.name == t.name; })) {
      ThrowError(ErrorCode::kDomainMismatch,
                 "'" + t.name + "' is in both the external table and the "
                 "conditional's targets");
    }
  }

  std::vector<Variable> out_vars = targets;
  out_vars.insert(out_vars.end(), common.begin(), common.end());
  for (std::size_t i : rest_cols) out_vars.push_back(ext_vars[i]);
  ProbabilityTable out(out_vars);

  std::map<Cell, double> uniform_column;
  std::set<Cell> warned;
  Cell given(common_cols.size());
  Cell cell(out_vars.size());
  for (const auto& [ext_cell, p] : external.cells()) {
    if (p == 0.0) continue;
    for (std::size_t i = 0; i < common_cols.size(); ++i) given[i] = ext_cell[common_cols[i]];
    const std::map<Cell, double>* column = internal_given_common.Column(given);
    if (column == nullptr) {
      if (uniform_column.empty()) {
        const std::size_t n = ProductDomainSize(targets);
        for (std::size_t flat = 0; flat < n; ++flat) {
          uniform_column[DecodeCell(targets, flat)] = 1.0 / static_cast<double>(n);
        }
      }
      if (warnings != nullptr && warned.insert(given).second) {
        std::string label;
        for (std::size_t i = 0; i < common.size(); ++i) {
          label += (i ? ", " : "") + common[i].name + "=" +
                   common[i].domain[static_cast<std::size_t>(given[i])];
        }
        warnings->push_back("no internal rows with " + label +
                            "; using the uniform conditional");
      }
      column = &uniform_column;
    }
    std::copy(given.begin(), given.end(), cell.begin() +
                                              static_cast<std::ptrdiff_t>(targets.size()));
    for (std::size_t i = 0; i < rest_cols.size(); ++i) {
      cell[targets.size() + common.size() + i] = ext_cell[rest_cols[i]];
    }
    for (const auto& [target_cell, q] : *column) {
      if (q == 0.0) continue;
      std::copy(target_cell.begin(), target_cell.end(), cell.begin());
      out.Add(cell, p * q);
    }
  }
  return out;
}

CategoricalDataset SampleModel(const LatentNBModel& model, std::size_t n,
                               RngSeed seed) {
  Rng rng(seed);
  const CategoricalSampler classes(model.pi);
  // One sampler per (variable, class) column.
  std::vector<std::vector<CategoricalSampler>> columns(model.variables.size());
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    const std::size_t M = model.variables[v].arity();
    for (int k = 0; k < model.K; ++k) {
      std::vector<double> w(M);
      for (std::size_t m = 0; m < M; ++m) w[m] = model.Cond(v, static_cast<int>(m), k);
      columns[v].emplace_back(w);
    }
  }
  CategoricalDataset out(model.variables);
  out.Reserve(n);
  std::vector<int> row(model.variables.size());
  for (std::size_t r = 0; r < n; ++r) {
    const std::size_t k = classes.Sample(rng);
    for (std::size_t v = 0; v < row.size(); ++v) {
      row[v] = static_cast<int>(columns[v][k].Sample(rng));
    }
    out.AddRow(row);
  }
  return out;
}

CategoricalDataset SampleTable(const ProbabilityTable& table, std::size_t n,
                               RngSeed seed) {
  std::vector<const Cell*> cells;
  std::vector<double> weights;
  for (const auto& [cell, p] : table.cells()) {
    cells.push_back(&cell);
    weights.push_back(p);
  }
  if (cells.empty()) {
    ThrowError(ErrorCode::kInvalidArgument, "cannot sample from an empty table");
  }
  const CategoricalSampler sampler(weights);
  Rng rng(seed);
  CategoricalDataset out(table.variables());
  out.Reserve(n);
  for (std::size_t r = 0; r < n; ++r) out.AddRow(*cells[sampler.Sample(rng)]);
  return out;
}

}  // namespace fairbound
