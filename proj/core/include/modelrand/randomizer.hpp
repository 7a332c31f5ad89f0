// Copyright 2026 The modelrand Authors
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

#ifndef MODELRAND_RANDOMIZER_HPP_
#define MODELRAND_RANDOMIZER_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "modelrand/model.hpp"

namespace modelrand {

enum class DistortionKind { kSquaredError, kAbsoluteError };

// Per-step distortion between an input vector and its disguised version,
// averaged over components.
double pointwise_distortion(DistortionKind kind, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& ytilde);

// Column-stochastic randomization rule: P(j, i) is the probability of
// selecting pseudo parameter j when the true parameter is i.
struct RandomizerPolicy {
  Eigen::MatrixXd P;  // m_pseudo x m_true
  std::vector<ModelHandle> pseudo_labels;

  // Throws std::invalid_argument unless every entry lies in [0, 1] and
  // every column sums to 1 within 1e-9.
  void validate() const;
};

// Monte Carlo estimate of the expected filter distortion for every
// (true, pseudo) parameter pair, averaged over the horizon.
struct DistortionMatrix {
  Eigen::MatrixXd mean;                 // m_true x m_pseudo
  Eigen::MatrixXd std_error;            // sample std / sqrt(n_paths)
  Eigen::MatrixXd saturation_fraction;  // clamped quantiles per (cell, sample)
  int n_paths = 0;
  int horizon = 0;
  std::vector<ModelHandle> true_labels;
  std::vector<ModelHandle> pseudo_labels;

  // A cell whose transform clamped more than 1% of its quantiles is
  // numerically suspect.
  bool saturation_flagged(int i, int j) const { return saturation_fraction(i, j) > 0.01; }
};

// Simulates n_paths measurement paths per (i, j) cell from the true model,
// pushes them through the filter configured with (true_i, pseudo_j) and
// averages the per-step distortion over the horizon. Path r uses the same
// derived seed in every cell (common random numbers), so cells are
// comparable and the result is independent of the thread count. Cells with
// true == pseudo are exactly zero: the filter is the identity there, so no
// simulation is spent on them.
DistortionMatrix estimate_distortion_matrix(const ModelRegistry& registry,
                                            const ParameterPrior& prior,
                                            std::span<const ModelHandle> pseudo_labels,
                                            int horizon, DistortionKind kind, int n_paths,
                                            std::uint64_t seed, int threads = 0);

// I(true; pseudo) in nats for a discrete prior and a column-stochastic
// policy, with 0 log 0 := 0.
double mutual_information(std::span<const double> probs, const Eigen::MatrixXd& policy);
double mutual_information(const ParameterPrior& prior, const RandomizerPolicy& policy);

struct RandomizerSolution {
  RandomizerPolicy policy;
  double achieved_mi = 0.0;          // nats
  double achieved_distortion = 0.0;  // sum_ij p_i P(j,i) D(i,j)
  bool constraint_active = false;
  double lambda = 0.0;               // scalarization weight at the solution
};

// Minimizes the expected distortion over column-stochastic policies subject
// to I(true; pseudo) <= i0_nats. The objective is linear and the constraint
// convex; the solver scalarizes with a multiplier lambda, runs
// Blahut-Arimoto style alternating updates to a fixed point for each
// lambda, and bisects lambda until the achieved mutual information lands in
// [i0 - 1e-6, i0] (or the constraint is verified inactive). Deterministic;
// argmin ties break toward the lowest pseudo index.
RandomizerSolution solve_randomizer(const Eigen::MatrixXd& distortion,
                                    std::span<const double> probs, double i0_nats);
RandomizerSolution solve_randomizer(const DistortionMatrix& distortion,
                                    const ParameterPrior& prior, double i0_nats);

}  // namespace modelrand

#endif  // MODELRAND_RANDOMIZER_HPP_
