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

#ifndef MODELRAND_ADVERSARY_HPP_
#define MODELRAND_ADVERSARY_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "modelrand/model.hpp"
#include "modelrand/randomizer.hpp"

namespace modelrand {

// Windowed drift estimator over a scalar measurement stream: the difference
// between the trailing window mean ending at eval_index and the same window
// shifted back one step, divided by the state decay coefficient.
struct OccupancyEstimatorConfig {
  int window = 10;                 // samples per window
  double decay = 0.95;             // state coefficient the statistic divides by
  std::vector<double> candidates;  // admissible parameter values
  int eval_index = 50;             // 1-based time index the statistic is taken at
};

// Requires eval_index >= window + 1 and a series that reaches eval_index;
// throws std::invalid_argument otherwise.
double drift_statistic(std::span<const double> series, const OccupancyEstimatorConfig& config);

// Nearest candidate to the statistic; ties go to the smaller value.
double classify_theta(double statistic, std::span<const double> candidates);

struct ErrorProbability {
  double p_err = 0.0;
  double std_error = 0.0;  // Wilson-interval half-width at one sigma
  long trials = 0;
  long errors = 0;
};

// Monte Carlo error probability of the drift estimator against the full
// pipeline: each trial draws a true parameter from the prior, a pseudo
// parameter from the matching policy column, simulates a measurement path,
// disguises it and classifies the drift statistic. true_values supplies the
// numeric parameter value for each prior label, aligned with the prior.
// Trial r derives its seed from (seed, r), so sweeps over different
// policies with the same root seed are comparable (common random numbers)
// and the result does not depend on the thread count.
ErrorProbability error_probability(const ModelRegistry& registry, const ParameterPrior& prior,
                                   std::span<const double> true_values,
                                   const RandomizerPolicy& policy, int horizon,
                                   const OccupancyEstimatorConfig& config, long n_trials,
                                   std::uint64_t seed, int threads = 0);

}  // namespace modelrand

#endif  // MODELRAND_ADVERSARY_HPP_
