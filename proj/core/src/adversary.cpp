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

#include "modelrand/adversary.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "modelrand/parallel.hpp"
#include "modelrand/random.hpp"
#include "modelrand/transform.hpp"

namespace modelrand {

double drift_statistic(std::span<const double> series, const OccupancyEstimatorConfig& config) {
  if (config.window < 1) throw std::invalid_argument("drift_statistic: window must be >= 1");
  if (config.decay == 0.0) throw std::invalid_argument("drift_statistic: decay must be nonzero");
  const int k = config.eval_index;
  if (k < config.window + 1) {
    throw std::invalid_argument("drift_statistic: eval index must be at least window + 1");
  }
  if (static_cast<int>(series.size()) < k) {
    throw std::invalid_argument("drift_statistic: series shorter than the evaluation index");
  }
  // 1-based windows [k - window + 1, k] and [k - window, k - 1].
  double current = 0.0, shifted = 0.0;
  for (int t = k - config.window + 1; t <= k; ++t) current += series[t - 1];
  for (int t = k - config.window; t <= k - 1; ++t) shifted += series[t - 1];
  return (current - shifted) / (config.window * config.decay);
}

double classify_theta(double statistic, std::span<const double> candidates) {
  if (candidates.empty()) throw std::invalid_argument("classify_theta: empty candidate set");
  double best = candidates[0];
  double best_distance = std::abs(statistic - best);
  for (double c : candidates.subspan(1)) {
    const double distance = std::abs(statistic - c);
    if (distance < best_distance || (distance == best_distance && c < best)) {
      best = c;
      best_distance = distance;
    }
  }
  return best;
}

namespace {

int draw_index(std::span<const double> probs, double u) {
  double acc = 0.0;
  for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
    acc += probs[i];
    if (u <= acc) return i;
  }
  return static_cast<int>(probs.size()) - 1;
}

}  // namespace

ErrorProbability error_probability(const ModelRegistry& registry, const ParameterPrior& prior,
                                   std::span<const double> true_values,
                                   const RandomizerPolicy& policy, int horizon,
                                   const OccupancyEstimatorConfig& config, long n_trials,
                                   std::uint64_t seed, int threads) {
  if (n_trials < 1) throw std::invalid_argument("error_probability: n_trials must be >= 1");
  if (true_values.size() != prior.labels().size()) {
    throw std::invalid_argument("error_probability: one true value per prior label required");
  }
  if (config.candidates.empty()) {
    throw std::invalid_argument("error_probability: estimator needs candidates");
  }
  policy.validate();
  if (policy.P.cols() != prior.size()) {
    throw std::invalid_argument("error_probability: policy has wrong number of columns");
  }
  for (const ModelHandle& h : prior.labels()) {
    if (registry.dimension(h) != 1) {
      throw std::invalid_argument("error_probability: the drift estimator is scalar");
    }
  }

  std::vector<std::uint8_t> wrong(n_trials);
  parallel_for(n_trials, threads, [&](long begin, long end) {
    std::vector<double> scalar_series(horizon);
    for (long t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(t)}));
      const int i = draw_index(prior.probs(), rng.uniform01());
      const std::vector<double> column(policy.P.col(i).data(),
                                       policy.P.col(i).data() + policy.P.rows());
      const int j = draw_index(column, rng.uniform01());

      const ModelHandle true_h = prior.labels()[i];
      const ModelHandle pseudo_h = policy.pseudo_labels.at(j);
      const std::vector<Eigen::VectorXd> path =
          registry.model(true_h).sample_path(horizon, rng);
      FilterSession session(registry, true_h, pseudo_h);
      for (int k = 0; k < horizon; ++k) scalar_series[k] = session.step(path[k]).disguised[0];

      const double stat = drift_statistic(scalar_series, config);
      const double decided = classify_theta(stat, config.candidates);
      wrong[t] = decided != true_values[i] ? 1 : 0;
    }
  });

  ErrorProbability result;
  result.trials = n_trials;
  result.errors = std::accumulate(wrong.begin(), wrong.end(), 0L);
  result.p_err = static_cast<double>(result.errors) / static_cast<double>(n_trials);
  // Wilson interval half-width at z = 1; strictly positive even at 0 or n errors.
  const double n = static_cast<double>(n_trials);
  const double p = result.p_err;
  result.std_error = std::sqrt(p * (1.0 - p) / n + 1.0 / (4.0 * n * n)) / (1.0 + 1.0 / n);
  return result;
}

}  // namespace modelrand
