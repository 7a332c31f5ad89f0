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

#ifndef MODELRAND_GAUSS_MARKOV_HPP_
#define MODELRAND_GAUSS_MARKOV_HPP_

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "modelrand/model.hpp"
#include "modelrand/random.hpp"

namespace modelrand {

// Linear Gaussian state-space model
//   X_{k+1} = A X_k + W_k + drift,   Y_k = C X_k + V_k,   X_1 ~ N(m0, Q0)
// with W_k ~ N(0, Qw), V_k ~ N(0, Qv) mutually independent. Validated at
// construction: A Schur stable, (A, C) observable, Qw/Qv/Q0 positive
// definite.
class GmParameter {
 public:
  explicit GmParameter(GmDescriptor descriptor);

  const Eigen::MatrixXd& A() const { return d_.A; }
  const Eigen::MatrixXd& C() const { return d_.C; }
  const Eigen::MatrixXd& Qw() const { return d_.Qw; }
  const Eigen::MatrixXd& Qv() const { return d_.Qv; }
  const Eigen::MatrixXd& Q0() const { return d_.Q0; }
  const Eigen::VectorXd& drift() const { return d_.drift; }
  const Eigen::VectorXd& m0() const { return d_.m0; }

  int state_dim() const { return static_cast<int>(d_.A.rows()); }
  int output_dim() const { return static_cast<int>(d_.C.rows()); }

  // Lower Cholesky factors of the noise covariances, precomputed for
  // simulation.
  const Eigen::MatrixXd& chol_Qw() const { return chol_qw_; }
  const Eigen::MatrixXd& chol_Qv() const { return chol_qv_; }
  const Eigen::MatrixXd& chol_Q0() const { return chol_q0_; }

 private:
  GmDescriptor d_;
  Eigen::MatrixXd chol_qw_, chol_qv_, chol_q0_;
};

// One-step-ahead predictor state: xhat = E[X_k | y_{1:k-1}], sigma its
// error covariance, both at the stored time index.
struct PredictorState {
  Eigen::VectorXd xhat;
  Eigen::MatrixXd sigma;
  int time = 1;
};

PredictorState initial_predictor_state(const GmParameter& theta);

struct OutputPrediction {
  Eigen::VectorXd mean;  // yhat_{k|k-1}
  Eigen::MatrixXd cov;   // C sigma C^T + Qv, symmetric positive definite
};

OutputPrediction predict_output(const PredictorState& state, const GmParameter& theta);

// Measurement update with y_k followed by the time update (drift carried
// through); the covariance advances by one Riccati step and is
// re-symmetrized.
PredictorState update_state(const PredictorState& state, const Eigen::VectorXd& y,
                            const GmParameter& theta);

// One Riccati step of the prediction covariance alone.
Eigen::MatrixXd riccati_step(const Eigen::MatrixXd& sigma, const GmParameter& theta);

// Scalar conditional law of one output component given the earlier
// components of the same vector (Gaussian conditioning of the output
// prediction).
struct ComponentConditional {
  double mean;
  double variance;
};

ComponentConditional component_conditional(const OutputPrediction& prediction,
                                           int component,
                                           std::span<const double> same_time_prefix);
ComponentConditional component_conditional(const PredictorState& state,
                                           const GmParameter& theta, int component,
                                           std::span<const double> same_time_prefix);

// Simulates y_1..y_T. Draw order per step: measurement noise, then process
// noise; the initial state consumes state_dim draws first.
std::vector<Eigen::VectorXd> simulate_path(const GmParameter& theta, int horizon,
                                           Rng& rng);

// ConditionalModel adapter. cond_cdf replays the predictor over the given
// history (O(k) per call); streaming consumers should hold a PredictorState
// instead and advance it once per step.
class GmModel final : public ConditionalModel {
 public:
  explicit GmModel(GmDescriptor descriptor);

  const GmParameter& parameter() const { return theta_; }

  // Fixed point of the Riccati recursion, iterated from Q0 at construction
  // (no algebraic solver). convergence_steps() reports when the successive
  // difference dropped below 1e-14.
  const Eigen::MatrixXd& stationary_prediction_covariance() const { return stationary_sigma_; }
  int convergence_steps() const { return convergence_steps_; }

  int dimension() const override { return theta_.output_dim(); }
  ModelFamily family() const override { return ModelFamily::kGaussMarkov; }
  double cond_cdf(double z, int component, std::span<const double> prefix,
                  History history) const override;
  double cond_icdf(double u, int component, std::span<const double> prefix,
                   History history) const override;
  std::vector<Eigen::VectorXd> sample_path(int horizon, Rng& rng) const override;

 private:
  PredictorState replay(History history) const;

  GmParameter theta_;
  Eigen::MatrixXd stationary_sigma_;
  int convergence_steps_ = 0;
};

}  // namespace modelrand

#endif  // MODELRAND_GAUSS_MARKOV_HPP_
