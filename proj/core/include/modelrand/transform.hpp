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

#ifndef MODELRAND_TRANSFORM_HPP_
#define MODELRAND_TRANSFORM_HPP_

#include <Eigen/Dense>
#include <memory>
#include <span>
#include <vector>

#include "modelrand/gauss_markov.hpp"
#include "modelrand/model.hpp"
#include "modelrand/normal.hpp"

namespace modelrand {

struct SessionOptions {
  // Run Gauss-Markov models through the generic history-replay path instead
  // of the recursive two-predictor fast path. Both paths compute the same
  // map; the flag exists so tests can cross-check them.
  bool force_generic = false;
  // Quantiles are clamped to [epsilon, 1 - epsilon] before inversion;
  // clamp events are counted as saturations.
  double clamp_epsilon = 1e-15;
};

struct StepResult {
  Eigen::VectorXd disguised;  // ytilde_k
  Eigen::VectorXd uniforms;   // u_k (after clamping), diagnostic
};

// Diagnostic capture of the per-component uniforms, in (time, component)
// order.
struct UniformTrace {
  std::vector<double> values;
};

// Streaming realization of the measurement disguise: component by
// component, push y through the true model's conditional c.d.f. and pull
// the result back through the pseudo model's conditional quantile. The two
// conditioning histories never mix: the true side sees only y, the pseudo
// side only its own outputs. The map is deterministic; all randomness lives
// upstream (data generation and the randomizer).
//
// A session is a strictly sequential state machine and is not thread-safe;
// run one session per path. The registry must outlive the session.
class FilterSession {
 public:
  FilterSession(const ModelRegistry& registry, ModelHandle true_model,
                ModelHandle pseudo_model, SessionOptions options = {});
  FilterSession(FilterSession&&) noexcept;
  FilterSession& operator=(FilterSession&&) noexcept;
  ~FilterSession();

  // Consumes y_k, emits ytilde_k, advances both histories by one step.
  StepResult step(const Eigen::VectorXd& y);

  int dimension() const { return dimension_; }
  int time() const { return time_; }  // index of the next step, 1-based
  long saturation_count() const { return saturations_; }

 private:
  class Side;
  std::unique_ptr<Side> true_side_;
  std::unique_ptr<Side> pseudo_side_;
  int dimension_ = 0;
  int time_ = 1;
  long saturations_ = 0;
  double clamp_epsilon_ = 1e-15;
};

FilterSession open_session(const ModelRegistry& registry, ModelHandle true_model,
                           ModelHandle pseudo_model, SessionOptions options = {});

struct FilterRun {
  std::vector<Eigen::VectorXd> disguised;
  UniformTrace uniforms;
  long saturations = 0;
};

// Batch convenience over step().
std::vector<Eigen::VectorXd> run_filter(const ModelRegistry& registry, ModelHandle true_model,
                                        ModelHandle pseudo_model,
                                        std::span<const Eigen::VectorXd> input,
                                        SessionOptions options = {});
FilterRun run_filter_traced(const ModelRegistry& registry, ModelHandle true_model,
                            ModelHandle pseudo_model, std::span<const Eigen::VectorXd> input,
                            SessionOptions options = {});

}  // namespace modelrand

#endif  // MODELRAND_TRANSFORM_HPP_
