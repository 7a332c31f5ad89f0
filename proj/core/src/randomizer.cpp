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

#include "modelrand/randomizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "modelrand/parallel.hpp"
#include "modelrand/random.hpp"
#include "modelrand/transform.hpp"

namespace modelrand {

double pointwise_distortion(DistortionKind kind, const Eigen::VectorXd& y,
                            const Eigen::VectorXd& ytilde) {
  if (y.size() != ytilde.size()) {
    throw std::invalid_argument("pointwise_distortion: dimension mismatch");
  }
  const Eigen::VectorXd diff = y - ytilde;
  switch (kind) {
    case DistortionKind::kSquaredError:
      return diff.squaredNorm() / static_cast<double>(y.size());
    case DistortionKind::kAbsoluteError:
      return diff.cwiseAbs().sum() / static_cast<double>(y.size());
  }
  throw std::logic_error("unreachable distortion kind");
}

void RandomizerPolicy::validate() const {
  if (P.rows() != static_cast<Eigen::Index>(pseudo_labels.size())) {
    throw std::invalid_argument("RandomizerPolicy: one row per pseudo label required");
  }
  for (Eigen::Index i = 0; i < P.cols(); ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < P.rows(); ++j) {
      const double v = P(j, i);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("RandomizerPolicy: entries must lie in [0, 1]");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("RandomizerPolicy: columns must sum to 1");
    }
  }
}

DistortionMatrix estimate_distortion_matrix(const ModelRegistry& registry,
                                            const ParameterPrior& prior,
                                            std::span<const ModelHandle> pseudo_labels,
                                            int horizon, DistortionKind kind, int n_paths,
                                            std::uint64_t seed, int threads) {
  if (n_paths < 2) throw std::invalid_argument("estimate_distortion_matrix: n_paths must be >= 2");
  if (horizon < 1) throw std::invalid_argument("estimate_distortion_matrix: horizon must be >= 1");
  const int m = prior.size();
  const int mt = static_cast<int>(pseudo_labels.size());
  if (mt == 0) throw std::invalid_argument("estimate_distortion_matrix: empty pseudo support");

  DistortionMatrix out;
  out.mean = Eigen::MatrixXd::Zero(m, mt);
  out.std_error = Eigen::MatrixXd::Zero(m, mt);
  out.saturation_fraction = Eigen::MatrixXd::Zero(m, mt);
  out.n_paths = n_paths;
  out.horizon = horizon;
  out.true_labels = prior.labels();
  out.pseudo_labels.assign(pseudo_labels.begin(), pseudo_labels.end());

  std::vector<double> per_path(n_paths);
  std::vector<long> per_path_saturations(n_paths);
  for (int i = 0; i < m; ++i) {
    const ModelHandle true_h = prior.labels()[i];
    const ConditionalModel& true_model = registry.model(true_h);
    for (int j = 0; j < mt; ++j) {
      const ModelHandle pseudo_h = pseudo_labels[j];
      if (true_h == pseudo_h) continue;  // identity cell: distortion is exactly 0
      parallel_for(n_paths, threads, [&](long begin, long end) {
        for (long r = begin; r < end; ++r) {
          Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
          const std::vector<Eigen::VectorXd> path = true_model.sample_path(horizon, rng);
          FilterSession session(registry, true_h, pseudo_h);
          double total = 0.0;
          for (const Eigen::VectorXd& y : path) {
            total += pointwise_distortion(kind, y, session.step(y).disguised);
          }
          per_path[r] = total / horizon;
          per_path_saturations[r] = session.saturation_count();
        }
      });
      double mean = 0.0;
      long saturations = 0;
      for (int r = 0; r < n_paths; ++r) {
        mean += per_path[r];
        saturations += per_path_saturations[r];
      }
      mean /= n_paths;
      double ss = 0.0;
      for (int r = 0; r < n_paths; ++r) {
        const double d = per_path[r] - mean;
        ss += d * d;
      }
      out.mean(i, j) = mean;
      out.std_error(i, j) = std::sqrt(ss / (n_paths - 1.0)) / std::sqrt(double(n_paths));
      out.saturation_fraction(i, j) =
          static_cast<double>(saturations) /
          (static_cast<double>(n_paths) * horizon * registry.dimension(true_h));
    }
  }
  return out;
}

double mutual_information(std::span<const double> probs, const Eigen::MatrixXd& policy) {
  const int m = static_cast<int>(probs.size());
  if (policy.cols() != m) {
    throw std::invalid_argument("mutual_information: policy needs one column per prior atom");
  }
  const int mt = static_cast<int>(policy.rows());
  Eigen::VectorXd q = Eigen::VectorXd::Zero(mt);
  for (int i = 0; i < m; ++i) q += probs[i] * policy.col(i);
  double info = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < mt; ++j) {
      const double joint = probs[i] * policy(j, i);
      if (joint > 0.0 && q[j] > 0.0) info += joint * std::log(policy(j, i) / q[j]);
    }
  }
  return std::max(0.0, info);
}

double mutual_information(const ParameterPrior& prior, const RandomizerPolicy& policy) {
  return mutual_information(prior.probs(), policy.P);
}

namespace {

double objective(const Eigen::MatrixXd& d, std::span<const double> probs,
                 const Eigen::MatrixXd& policy) {
  double total = 0.0;
  for (int i = 0; i < d.rows(); ++i) {
    for (int j = 0; j < d.cols(); ++j) total += probs[i] * policy(j, i) * d(i, j);
  }
  return total;
}

// Deterministic per-column argmin rule, ties to the lowest pseudo index.
Eigen::MatrixXd vertex_policy(const Eigen::MatrixXd& d) {
  Eigen::MatrixXd policy = Eigen::MatrixXd::Zero(d.cols(), d.rows());
  for (int i = 0; i < d.rows(); ++i) {
    int best = 0;
    for (int j = 1; j < d.cols(); ++j) {
      if (d(i, j) < d(i, best)) best = j;
    }
    policy(best, i) = 1.0;
  }
  return policy;
}

// Fixed point of the scalarized problem
//   min_P <D, P> + lambda * I(P)
// by alternating the closed-form column update P(j,i) ∝ q_j exp(-D(i,j)/lambda)
// with the output-marginal update q = P p. Computed in log space.
Eigen::MatrixXd blahut_arimoto(const Eigen::MatrixXd& d, std::span<const double> probs,
                               double lambda) {
  const int m = static_cast<int>(d.rows());
  const int mt = static_cast<int>(d.cols());
  Eigen::VectorXd q = Eigen::VectorXd::Constant(mt, 1.0 / mt);
  Eigen::MatrixXd policy(mt, m);
  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 20000; ++iter) {
    for (int i = 0; i < m; ++i) {
      double best = -std::numeric_limits<double>::infinity();
      Eigen::VectorXd score(mt);
      for (int j = 0; j < mt; ++j) {
        score[j] = (q[j] > 0.0 ? std::log(q[j]) : -std::numeric_limits<double>::infinity()) -
                   d(i, j) / lambda;
        best = std::max(best, score[j]);
      }
      double norm = 0.0;
      for (int j = 0; j < mt; ++j) {
        score[j] = std::exp(score[j] - best);
        norm += score[j];
      }
      policy.col(i) = score / norm;
    }
    q.setZero();
    for (int i = 0; i < m; ++i) q += probs[i] * policy.col(i);

    const double value =
        objective(d, probs, policy) + lambda * mutual_information(probs, policy);
    if (std::abs(previous - value) <= 1e-10 * std::max(1.0, std::abs(value))) break;
    previous = value;
  }
  return policy;
}

void renormalize_columns(Eigen::MatrixXd& policy) {
  for (int i = 0; i < policy.cols(); ++i) {
    const double sum = policy.col(i).sum();
    if (sum > 0.0) policy.col(i) /= sum;
  }
}

}  // namespace

RandomizerSolution solve_randomizer(const Eigen::MatrixXd& d, std::span<const double> probs,
                                    double i0_nats) {
  const int m = static_cast<int>(probs.size());
  const int mt = static_cast<int>(d.cols());
  if (d.rows() != m) {
    throw std::invalid_argument("solve_randomizer: distortion needs one row per prior atom");
  }
  if (!d.allFinite()) {
    throw std::invalid_argument("solve_randomizer: distortion entries must be finite");
  }
  if (i0_nats < 0.0) throw std::invalid_argument("solve_randomizer: i0 must be >= 0");

  RandomizerSolution solution;

  // Unconstrained optimum: deterministic argmin per column. If it already
  // satisfies the leakage budget, the constraint is inactive.
  Eigen::MatrixXd det = vertex_policy(d);
  const double det_mi = mutual_information(probs, det);
  if (det_mi <= i0_nats + 1e-9) {
    solution.policy.P = std::move(det);
    solution.achieved_mi = det_mi;
    solution.achieved_distortion = objective(d, probs, solution.policy.P);
    solution.constraint_active = false;
    return solution;
  }

  // Zero leakage forces all columns equal; the linear objective then picks
  // the single best shared column.
  if (i0_nats <= 1e-12) {
    Eigen::VectorXd column_cost = Eigen::VectorXd::Zero(mt);
    for (int j = 0; j < mt; ++j) {
      for (int i = 0; i < m; ++i) column_cost[j] += probs[i] * d(i, j);
    }
    int best = 0;
    for (int j = 1; j < mt; ++j) {
      if (column_cost[j] < column_cost[best]) best = j;
    }
    Eigen::MatrixXd policy = Eigen::MatrixXd::Zero(mt, m);
    policy.row(best).setOnes();
    solution.policy.P = std::move(policy);
    solution.achieved_mi = 0.0;
    solution.achieved_distortion = column_cost[best];
    solution.constraint_active = true;
    return solution;
  }

  const double scale = std::max(d.maxCoeff() - d.minCoeff(), 1e-12);
  double lo = 1e-8 * scale;
  double hi = scale;
  Eigen::MatrixXd at_hi = blahut_arimoto(d, probs, hi);
  for (int i = 0; i < 200 && mutual_information(probs, at_hi) > i0_nats; ++i) {
    hi *= 2.0;
    at_hi = blahut_arimoto(d, probs, hi);
  }
  if (mutual_information(probs, at_hi) > i0_nats) {
    throw std::runtime_error("solve_randomizer: failed to bracket the leakage budget");
  }
  Eigen::MatrixXd at_lo = blahut_arimoto(d, probs, lo);
  if (mutual_information(probs, at_lo) <= i0_nats) {
    // Even a near-zero privacy weight is feasible (degenerate ties); the
    // constraint is effectively inactive.
    renormalize_columns(at_lo);
    solution.policy.P = std::move(at_lo);
    solution.achieved_mi = mutual_information(probs, solution.policy.P);
    solution.achieved_distortion = objective(d, probs, solution.policy.P);
    solution.constraint_active = false;
    solution.lambda = lo;
    return solution;
  }

  Eigen::MatrixXd best = std::move(at_hi);
  double best_lambda = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    Eigen::MatrixXd candidate = blahut_arimoto(d, probs, mid);
    const double mi = mutual_information(probs, candidate);
    if (mi > i0_nats) {
      lo = mid;
    } else {
      hi = mid;
      best = std::move(candidate);
      best_lambda = mid;
      if (mi >= i0_nats - 1e-6) break;
    }
  }

  renormalize_columns(best);
  solution.policy.P = std::move(best);
  solution.achieved_mi = mutual_information(probs, solution.policy.P);
  solution.achieved_distortion = objective(d, probs, solution.policy.P);
  solution.constraint_active = true;
  solution.lambda = best_lambda;
  return solution;
}

RandomizerSolution solve_randomizer(const DistortionMatrix& distortion,
                                    const ParameterPrior& prior, double i0_nats) {
  RandomizerSolution solution = solve_randomizer(distortion.mean, prior.probs(), i0_nats);
  solution.policy.pseudo_labels = distortion.pseudo_labels;
  solution.policy.validate();
  return solution;
}

}  // namespace modelrand
