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

#include "modelrand/gauss_markov.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "modelrand/normal.hpp"

namespace modelrand {

namespace {

void require_square(const Eigen::MatrixXd& m, int n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument(std::string("gauss_markov: ") + name + " must be " +
                                std::to_string(n) + "x" + std::to_string(n));
  }
}

Eigen::MatrixXd cholesky_or_throw(const Eigen::MatrixXd& m, const char* name) {
  if (!m.isApprox(m.transpose(), 1e-9)) {
    throw std::invalid_argument(std::string("gauss_markov: ") + name + " must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument(std::string("gauss_markov: ") + name +
                                " must be positive definite");
  }
  return llt.matrixL();
}

// Solves S w = b through Cholesky; on numerical failure retries once with a
// trace-scaled jitter on the diagonal.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& s, const Eigen::VectorXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(s);
  if (llt.info() == Eigen::Success) return llt.solve(b);
  const double jitter = 1e-12 * s.trace() / static_cast<double>(s.rows());
  std::fputs("gauss_markov: jittering a non-SPD conditioning block\n", stderr);
  Eigen::MatrixXd patched = s;
  patched.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> retry(patched);
  if (retry.info() != Eigen::Success) {
    throw std::runtime_error("gauss_markov: conditioning block is not positive definite");
  }
  return retry.solve(b);
}

}  // namespace

GmParameter::GmParameter(GmDescriptor descriptor) : d_(std::move(descriptor)) {
  const int n = static_cast<int>(d_.A.rows());
  if (n == 0) throw std::invalid_argument("gauss_markov: empty state");
  require_square(d_.A, n, "A");
  if (d_.C.cols() != n || d_.C.rows() == 0) {
    throw std::invalid_argument("gauss_markov: C must have one column per state");
  }
  const int d = static_cast<int>(d_.C.rows());
  require_square(d_.Qw, n, "Qw");
  require_square(d_.Qv, d, "Qv");
  require_square(d_.Q0, n, "Q0");
  if (d_.drift.size() != n) throw std::invalid_argument("gauss_markov: drift must have state size");
  if (d_.m0.size() != n) throw std::invalid_argument("gauss_markov: m0 must have state size");

  const double rho = d_.A.eigenvalues().cwiseAbs().maxCoeff();
  if (!(rho < 1.0)) {
    throw std::invalid_argument("gauss_markov: A must be Schur stable (spectral radius < 1)");
  }

  Eigen::MatrixXd obs(d * n, n);
  Eigen::MatrixXd block = d_.C;
  for (int i = 0; i < n; ++i) {
    obs.middleRows(i * d, d) = block;
    block = block * d_.A;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(obs);
  if (lu.rank() < n) {
    throw std::invalid_argument("gauss_markov: (A, C) must be observable");
  }

  chol_qw_ = cholesky_or_throw(d_.Qw, "Qw");
  chol_qv_ = cholesky_or_throw(d_.Qv, "Qv");
  chol_q0_ = cholesky_or_throw(d_.Q0, "Q0");
}

PredictorState initial_predictor_state(const GmParameter& theta) {
  return PredictorState{theta.m0(), theta.Q0(), 1};
}

OutputPrediction predict_output(const PredictorState& state, const GmParameter& theta) {
  OutputPrediction out;
  out.mean = theta.C() * state.xhat;
  out.cov = theta.C() * state.sigma * theta.C().transpose() + theta.Qv();
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

PredictorState update_state(const PredictorState& state, const Eigen::VectorXd& y,
                            const GmParameter& theta) {
  if (y.size() != theta.output_dim()) {
    throw std::invalid_argument("update_state: measurement has wrong dimension");
  }
  const Eigen::MatrixXd s = theta.C() * state.sigma * theta.C().transpose() + theta.Qv();
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (s + s.transpose()));
  if (llt.info() != Eigen::Success) {
    // Qv is positive definite, so this indicates a corrupted state.
    throw std::runtime_error("update_state: singular innovation covariance");
  }
  const Eigen::MatrixXd cs = theta.C() * state.sigma;            // C sigma
  const Eigen::MatrixXd gain = llt.solve(cs).transpose();        // sigma C^T S^-1
  const Eigen::VectorXd innovation = y - theta.C() * state.xhat;

  PredictorState next;
  const Eigen::VectorXd x_filtered = state.xhat + gain * innovation;
  next.xhat = theta.A() * x_filtered + theta.drift();
  Eigen::MatrixXd sigma_next = theta.A() * state.sigma * theta.A().transpose() + theta.Qw() -
                               theta.A() * gain * cs * theta.A().transpose();
  next.sigma = 0.5 * (sigma_next + sigma_next.transpose());
  next.time = state.time + 1;
  return next;
}

Eigen::MatrixXd riccati_step(const Eigen::MatrixXd& sigma, const GmParameter& theta) {
  const Eigen::MatrixXd s = theta.C() * sigma * theta.C().transpose() + theta.Qv();
  Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (s + s.transpose()));
  const Eigen::MatrixXd cs = theta.C() * sigma;
  const Eigen::MatrixXd gain = llt.solve(cs).transpose();
  Eigen::MatrixXd next = theta.A() * sigma * theta.A().transpose() + theta.Qw() -
                         theta.A() * gain * cs * theta.A().transpose();
  return 0.5 * (next + next.transpose());
}

ComponentConditional component_conditional(const OutputPrediction& prediction, int component,
                                           std::span<const double> same_time_prefix) {
  const int d = static_cast<int>(prediction.mean.size());
  if (component < 0 || component >= d) {
    throw std::invalid_argument("component_conditional: component out of range");
  }
  if (static_cast<int>(same_time_prefix.size()) != component) {
    throw std::invalid_argument("component_conditional: prefix must hold the earlier components");
  }
  if (component == 0) {
    return ComponentConditional{prediction.mean[0], prediction.cov(0, 0)};
  }
  const int l = component;
  const Eigen::MatrixXd head = prediction.cov.topLeftCorner(l, l);
  const Eigen::VectorXd delta = prediction.cov.row(l).head(l).transpose();
  const Eigen::VectorXd weights = spd_solve(head, delta);
  Eigen::Map<const Eigen::VectorXd> prefix(same_time_prefix.data(), l);
  const double mean =
      prediction.mean[l] + weights.dot(prefix - prediction.mean.head(l));
  const double variance = prediction.cov(l, l) - weights.dot(delta);
  if (!(variance > 0.0)) {
    throw std::runtime_error("component_conditional: conditional variance not positive");
  }
  return ComponentConditional{mean, variance};
}

ComponentConditional component_conditional(const PredictorState& state, const GmParameter& theta,
                                           int component,
                                           std::span<const double> same_time_prefix) {
  return component_conditional(predict_output(state, theta), component, same_time_prefix);
}

std::vector<Eigen::VectorXd> simulate_path(const GmParameter& theta, int horizon, Rng& rng) {
  if (horizon < 0) throw std::invalid_argument("simulate_path: horizon must be >= 0");
  const int n = theta.state_dim();
  const int d = theta.output_dim();
  auto draw = [&rng](int size) {
    Eigen::VectorXd z(size);
    for (int i = 0; i < size; ++i) z[i] = rng.normal();
    return z;
  };
  Eigen::VectorXd x = theta.m0() + theta.chol_Q0() * draw(n);
  std::vector<Eigen::VectorXd> path;
  path.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    path.push_back(theta.C() * x + theta.chol_Qv() * draw(d));
    x = theta.A() * x + theta.chol_Qw() * draw(n) + theta.drift();
  }
  return path;
}

GmModel::GmModel(GmDescriptor descriptor) : theta_(std::move(descriptor)) {
  Eigen::MatrixXd sigma = theta_.Q0();
  for (int k = 1; k <= 10000; ++k) {
    Eigen::MatrixXd next = riccati_step(sigma, theta_);
    const double diff = (next - sigma).cwiseAbs().maxCoeff();
    sigma = std::move(next);
    if (diff < 1e-14) {
      convergence_steps_ = k;
      break;
    }
  }
  stationary_sigma_ = std::move(sigma);
}

PredictorState GmModel::replay(History history) const {
  PredictorState state = initial_predictor_state(theta_);
  for (const Eigen::VectorXd& y : history) state = update_state(state, y, theta_);
  return state;
}

double GmModel::cond_cdf(double z, int component, std::span<const double> prefix,
                         History history) const {
  const ComponentConditional cc =
      component_conditional(replay(history), theta_, component, prefix);
  return gaussian_cdf(z, cc.mean, cc.variance);
}

double GmModel::cond_icdf(double u, int component, std::span<const double> prefix,
                          History history) const {
  const ComponentConditional cc =
      component_conditional(replay(history), theta_, component, prefix);
  return gaussian_icdf(u, cc.mean, cc.variance);
}

std::vector<Eigen::VectorXd> GmModel::sample_path(int horizon, Rng& rng) const {
  return simulate_path(theta_, horizon, rng);
}

}  // namespace modelrand
