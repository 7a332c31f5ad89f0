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
//
// Independent reference implementations used to pin down expected values.
// Everything here is deliberately brute force and shares no code with the
// library paths it checks.

#ifndef MODELRAND_TESTS_SUPPORT_ORACLES_HPP_
#define MODELRAND_TESTS_SUPPORT_ORACLES_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "modelrand/gauss_markov.hpp"
#include "modelrand/model.hpp"
#include "modelrand/random.hpp"

namespace modelrand::testing {

// Standard normal quantile by pure bisection on a long-double erfc CDF.
double oracle_standard_normal_icdf(double u);

// One-sample Kolmogorov-Smirnov statistic against U(0, 1).
double ks_statistic_uniform(std::vector<double> samples);
// Asymptotic critical value sqrt(-ln(alpha / 2) / 2) / sqrt(n).
double ks_critical_value(double alpha, std::size_t n);

// Exact joint Gaussian of the stacked vector [X_1..X_T, Y_1..Y_T] of a
// linear Gaussian state-space model, built from the defining recursions.
struct JointGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  int state_dim = 0;
  int output_dim = 0;
  int horizon = 0;

  int x_index(int k, int i) const { return (k - 1) * state_dim + i; }  // k is 1-based
  int y_index(int k, int l) const { return horizon * state_dim + (k - 1) * output_dim + l; }
};

JointGaussian gm_joint_distribution(const GmParameter& theta, int horizon);

// Gaussian conditioning of one coordinate on an arbitrary subset, via a
// dense solve on the full covariance (Schur complement).
struct ScalarConditional {
  double mean = 0.0;
  double variance = 0.0;
};
ScalarConditional condition_scalar(const JointGaussian& joint, int target,
                                   const std::vector<int>& given,
                                   const Eigen::VectorXd& given_values);

// Conditional mean of several coordinates given a subset.
Eigen::VectorXd conditional_mean(const JointGaussian& joint, const std::vector<int>& targets,
                                 const std::vector<int>& given,
                                 const Eigen::VectorXd& given_values);

// Log-density of the stacked measurement block y_1..y_T under the joint.
double joint_y_log_density(const JointGaussian& joint,
                           const std::vector<Eigen::VectorXd>& path);

// Exact mean trajectory E[Y_k], k = 1..T, from the state recursion.
std::vector<Eigen::VectorXd> gm_mean_trajectory(const GmParameter& theta, int horizon);

// Random observable, Schur-stable system with SPD noise. Deterministic in
// the generator state.
GmDescriptor random_gm_descriptor(Rng& rng, int state_dim, int output_dim,
                                  double spectral_radius, double mean_scale);

// Best feasible objective of
//   min sum_ij p_i P(j,i) D(i,j)  s.t.  I(P) <= i0, P column-stochastic
// found by an exhaustive per-column simplex grid with cascaded local
// refinement (final resolution ~1e-4 per coordinate).
double grid_search_policy_objective(const Eigen::MatrixXd& distortion,
                                    const std::vector<double>& probs, double i0_nats);

// Per-time sample moments across Monte Carlo paths of one component.
struct MomentSummary {
  std::vector<double> mean, mean_se;
  std::vector<double> variance, variance_se;
  std::vector<double> lag1, lag1_se;  // cov(Y_k, Y_{k+1}), size T-1
};
MomentSummary path_moments(const std::vector<std::vector<Eigen::VectorXd>>& paths,
                           int component);

// |a - b| <= 3 sqrt(se_a^2 + se_b^2)
bool within_3se(double a, double se_a, double b, double se_b);

}  // namespace modelrand::testing

#endif  // MODELRAND_TESTS_SUPPORT_ORACLES_HPP_
