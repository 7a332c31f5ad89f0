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

#include "modelrand/transform.hpp"

#include <algorithm>
#include <stdexcept>

namespace modelrand {

// One conditioning side of the filter. The Gauss-Markov fast path carries a
// predictor state and the current step's output prediction; the generic
// path stores the full history and defers to ConditionalModel.
class FilterSession::Side {
 public:
  Side(const ConditionalModel& model, const GmParameter* gm, bool force_generic)
      : model_(model), gm_(force_generic ? nullptr : gm) {
    if (gm_ != nullptr) state_ = initial_predictor_state(*gm_);
  }

  void begin_step() {
    if (gm_ != nullptr) prediction_ = predict_output(state_, *gm_);
  }

  double cdf(double z, int component, std::span<const double> prefix) const {
    if (gm_ != nullptr) {
      const ComponentConditional cc = component_conditional(prediction_, component, prefix);
      return gaussian_cdf(z, cc.mean, cc.variance);
    }
    return model_.cond_cdf(z, component, prefix, history_);
  }

  double icdf(double u, int component, std::span<const double> prefix) const {
    if (gm_ != nullptr) {
      const ComponentConditional cc = component_conditional(prediction_, component, prefix);
      return gaussian_icdf(u, cc.mean, cc.variance);
    }
    return model_.cond_icdf(u, component, prefix, history_);
  }

  void commit(const Eigen::VectorXd& own_vector) {
    if (gm_ != nullptr) {
      state_ = update_state(state_, own_vector, *gm_);
    } else {
      history_.push_back(own_vector);
    }
  }

 private:
  const ConditionalModel& model_;
  const GmParameter* gm_;
  PredictorState state_;
  OutputPrediction prediction_;
  std::vector<Eigen::VectorXd> history_;
};

FilterSession::FilterSession(const ModelRegistry& registry, ModelHandle true_model,
                             ModelHandle pseudo_model, SessionOptions options)
    : clamp_epsilon_(options.clamp_epsilon) {
  const ConditionalModel& mt = registry.model(true_model);
  const ConditionalModel& mp = registry.model(pseudo_model);
  if (mt.family() != mp.family()) {
    throw std::invalid_argument("open_session: models must come from the same family");
  }
  if (mt.dimension() != mp.dimension()) {
    throw std::invalid_argument("open_session: models must have equal dimension");
  }
  if (!(clamp_epsilon_ > 0.0 && clamp_epsilon_ < 0.5)) {
    throw std::invalid_argument("open_session: clamp_epsilon must lie in (0, 0.5)");
  }
  dimension_ = mt.dimension();
  true_side_ = std::make_unique<Side>(mt, registry.gauss_markov_parameter(true_model),
                                      options.force_generic);
  pseudo_side_ = std::make_unique<Side>(mp, registry.gauss_markov_parameter(pseudo_model),
                                        options.force_generic);
}

FilterSession::FilterSession(FilterSession&&) noexcept = default;
FilterSession& FilterSession::operator=(FilterSession&&) noexcept = default;
FilterSession::~FilterSession() = default;

StepResult FilterSession::step(const Eigen::VectorXd& y) {
  if (y.size() != dimension_) {
    throw std::invalid_argument("FilterSession::step: input has wrong dimension");
  }
  true_side_->begin_step();
  pseudo_side_->begin_step();

  StepResult result;
  result.disguised.resize(dimension_);
  result.uniforms.resize(dimension_);
  for (int l = 0; l < dimension_; ++l) {
    const std::span<const double> true_prefix(y.data(), l);
    const std::span<const double> pseudo_prefix(result.disguised.data(), l);
    double u = true_side_->cdf(y[l], l, true_prefix);
    if (u < clamp_epsilon_) {
      u = clamp_epsilon_;
      ++saturations_;
    } else if (u > 1.0 - clamp_epsilon_) {
      u = 1.0 - clamp_epsilon_;
      ++saturations_;
    }
    result.uniforms[l] = u;
    result.disguised[l] = pseudo_side_->icdf(u, l, pseudo_prefix);
  }

  true_side_->commit(y);
  pseudo_side_->commit(result.disguised);
  ++time_;
  return result;
}

FilterSession open_session(const ModelRegistry& registry, ModelHandle true_model,
                           ModelHandle pseudo_model, SessionOptions options) {
  return FilterSession(registry, true_model, pseudo_model, options);
}

FilterRun run_filter_traced(const ModelRegistry& registry, ModelHandle true_model,
                            ModelHandle pseudo_model, std::span<const Eigen::VectorXd> input,
                            SessionOptions options) {
  FilterSession session(registry, true_model, pseudo_model, options);
  FilterRun run;
  run.disguised.reserve(input.size());
  run.uniforms.values.reserve(input.size() * session.dimension());
  for (const Eigen::VectorXd& y : input) {
    StepResult r = session.step(y);
    for (int l = 0; l < session.dimension(); ++l) run.uniforms.values.push_back(r.uniforms[l]);
    run.disguised.push_back(std::move(r.disguised));
  }
  run.saturations = session.saturation_count();
  return run;
}

std::vector<Eigen::VectorXd> run_filter(const ModelRegistry& registry, ModelHandle true_model,
                                        ModelHandle pseudo_model,
                                        std::span<const Eigen::VectorXd> input,
                                        SessionOptions options) {
  return run_filter_traced(registry, true_model, pseudo_model, input, options).disguised;
}

}  // namespace modelrand
