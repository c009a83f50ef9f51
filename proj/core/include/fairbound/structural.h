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

// Point estimates of a joint distribution from two datasets that share only
// their common variables: a latent-class naive Bayes model fitted by EM over
// both datasets at once, and the marginal-preservation product that keeps the
// external marginal exact.

#ifndef FAIRBOUND_STRUCTURAL_H_
#define FAIRBOUND_STRUCTURAL_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairbound/dataset.h"
#include "fairbound/random.h"
#include "fairbound/table.h"

namespace fairbound {

// Names of the variables seen only in the first dataset (internal), only in
// the second (external), and in both (common).
struct VariablePartition {
  std::vector<std::string> internal;
  std::vector<std::string> external;
  std::vector<std::string> common;

  // Throws InvalidArgument on duplicates, overlap or an empty common set.
  void Validate() const;
};

struct EMConfig {
  int K = 4;
  int max_iters = 500;
  double elbo_tol = 1e-6;
  int n_restarts = 5;
  RngSeed seed{0};
  double smoothing = 1e-9;  // pseudo-count added to every S_i(m, k)

  void Validate() const;
};

struct LatentNBModel {
  int K = 0;
  std::vector<double> pi;
  std::vector<Variable> variables;
  // cond[i][m * K + k] = p_i(m | k).
  std::vector<std::vector<double>> cond;

  std::size_t IndexOf(std::string_view name) const {
    return FindVariable(variables, name);
  }
  double Cond(std::size_t var, int m, int k) const {
    return cond[var][static_cast<std::size_t>(m * K + k)];
  }

  // pi and every column sum to one within 1e-9 and nothing is negative.
  void Validate() const;
};

struct EMFit {
  LatentNBModel model;
  // Objective after each E-step, one trace per restart. With smoothing s > 0
  // the objective is the log-likelihood plus s times the sum of log p_i(m | k),
  // which is what the smoothed M-step maximises.
  std::vector<std::vector<double>> traces;
  int best_restart = 0;
  double final_elbo = 0.0;
};

// Fits the model to d1 (internal + common variables) and d2 (external +
// common variables) and keeps the restart with the highest final objective.
// Model variables are ordered internal, external, common. Throws
// SchemaMismatch when a dataset does not match the partition and
// NonFiniteLikelihood when a row has zero probability under every class.
EMFit FitLatentNB(const CategoricalDataset& d1, const CategoricalDataset& d2,
                  const VariablePartition& partition, const EMConfig& cfg);

// Log-likelihood of d1 and d2 under `model`, summed. Used by tests.
double LogLikelihood(const LatentNBModel& model, const CategoricalDataset& d1,
                     const CategoricalDataset& d2,
                     const VariablePartition& partition);

// Mixture joint over the named variables, expanded over their product domain.
// Throws UnknownVariable and Overflow above 2^24 cells.
ProbabilityTable ModelJoint(const LatentNBModel& model,
                            std::span<const std::string> variables);

// external(common, ext) * p(internal | common). Variables of the result are
// the conditional's targets, then its conditioning variables, then the
// remaining external-table variables. A conditioning cell with no column
// gets the uniform conditional and a message appended to `warnings`.
// Throws DomainMismatch when the common variables disagree.
ProbabilityTable MarginalPreserve(const ProbabilityTable& external,
                                  const ConditionalTable& internal_given_common,
                                  std::vector<std::string>* warnings = nullptr);

// i.i.d. rows by ancestral sampling. Deterministic in `seed`.
CategoricalDataset SampleModel(const LatentNBModel& model, std::size_t n,
                               RngSeed seed);
CategoricalDataset SampleTable(const ProbabilityTable& table, std::size_t n,
                               RngSeed seed);

}  // namespace fairbound

#endif  // FAIRBOUND_STRUCTURAL_H_
