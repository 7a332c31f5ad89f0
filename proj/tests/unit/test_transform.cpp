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

#include <doctest.h>

#include <cmath>

#include "modelrand/transform.hpp"
#include "support/occupancy.hpp"
#include "support/oracles.hpp"

using namespace modelrand;
using namespace modelrand::testing;

namespace {

ModelHandle register_iid_gaussian(ModelRegistry& registry, double mean, double variance) {
  IidDescriptor d;
  d.components.push_back(DensitySpec::gaussian(mean, variance));
  return registry.register_model(d);
}

}  // namespace

TEST_CASE("gaussian cdf/icdf: identities and precision") {
  CHECK(gaussian_cdf(3.0, 3.0, 4.0) == 0.5);
  // Reflection identity.
  for (double x : {-2.5, -0.3, 0.0, 1.7, 4.0}) {
    CHECK(std::abs(gaussian_cdf(x, 1.0, 2.0) + gaussian_cdf(2.0 - x, 1.0, 2.0) - 1.0) <= 1e-15);
  }
  // High-precision quantile against the bisection oracle.
  for (double u : {1e-12, 1e-6, 0.025, 0.31, 0.5, 0.7, 0.975, 1.0 - 1e-6}) {
    CHECK(std::abs(standard_normal_icdf(u) - oracle_standard_normal_icdf(u)) <= 1e-10);
  }
  CHECK(std::abs(gaussian_icdf(0.975, 0.0, 1.0) - 1.959963984540054) <= 1e-10);

  CHECK_THROWS_AS(gaussian_icdf(0.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_icdf(1.0, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_icdf(-0.3, 0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gaussian_cdf(0.0, 0.0, -1.0), std::domain_error);

  // Round trip across the usable range. The upper tail cannot survive the
  // trip through a double-precision probability (the gap to 1 collapses),
  // so the sweep stops at +5 sigma; the lower tail keeps full precision.
  for (double sigma_units = -8.0; sigma_units <= 5.0; sigma_units += 0.25) {
    const double z = 1.0 + std::sqrt(3.0) * sigma_units;
    const double back = gaussian_icdf(gaussian_cdf(z, 1.0, 3.0), 1.0, 3.0);
    CHECK(std::abs(back - z) <= 1e-9 * std::max(1.0, std::abs(z)));
  }
}

TEST_CASE("open_session: family and dimension checks") {
  ModelRegistry registry;
  const ModelHandle iid2 = registry.register_model_json(
      "{\"kind\":\"iid\",\"components\":[{\"family\":\"gaussian\",\"mean\":0,\"variance\":1},"
      "{\"family\":\"gaussian\",\"mean\":0,\"variance\":1}]}");
  Rng rng(3);
  const ModelHandle gm2 = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.8, 1.0));
  const ModelHandle gm1 = registry.register_model(random_gm_descriptor(rng, 2, 1, 0.8, 1.0));

  CHECK_THROWS_AS(open_session(registry, iid2, gm2), std::invalid_argument);
  CHECK_THROWS_AS(open_session(registry, gm2, gm1), std::invalid_argument);
  CHECK_NOTHROW(open_session(registry, gm2, gm2));  // same handle twice is fine
}

TEST_CASE("step: identical parameters give identity pass-through") {
  ModelRegistry registry;
  Rng rng(11);
  const ModelHandle gm = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.85, 2.0));
  FilterSession session(registry, gm, gm);
  Rng path_rng(21);
  const auto path = registry.model(gm).sample_path(50, path_rng);
  for (const auto& y : path) {
    const StepResult r = session.step(y);
    for (int l = 0; l < 2; ++l) CHECK(std::abs(r.disguised[l] - y[l]) <= 1e-9);
  }
}

TEST_CASE("step: scalar iid gaussian location and scale maps") {
  ModelRegistry registry;
  const ModelHandle standard = register_iid_gaussian(registry, 0.0, 1.0);
  const ModelHandle shifted = register_iid_gaussian(registry, 5.0, 1.0);
  const ModelHandle widened = register_iid_gaussian(registry, 0.0, 4.0);

  // Median maps to median under a location shift.
  FilterSession shift_session(registry, standard, shifted);
  const StepResult shift = shift_session.step(Eigen::VectorXd::Zero(1));
  CHECK(shift.uniforms[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(shift.disguised[0] == doctest::Approx(5.0).epsilon(1e-12));

  // Scale equivariance: F^{-1}_{N(0,4)}(F_{N(0,1)}(1)) = 2.
  FilterSession scale_session(registry, standard, widened);
  const StepResult scale = scale_session.step(Eigen::VectorXd::Ones(1));
  CHECK(std::abs(scale.disguised[0] - 2.0) <= 1e-9);
  // Cross-check through the independent quantile oracle.
  const double oracle = 2.0 * oracle_standard_normal_icdf(gaussian_cdf(1.0, 0.0, 1.0));
  CHECK(std::abs(scale.disguised[0] - oracle) <= 1e-9);
}

TEST_CASE("run_filter: empty input and bitwise causality") {
  ModelRegistry registry;
  Rng rng(31);
  const ModelHandle a = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.8, 1.0));
  const ModelHandle b = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.7, 1.0));

  CHECK(run_filter(registry, a, b, {}).empty());

  Rng path_rng(41);
  const auto path = registry.model(a).sample_path(12, path_rng);

  // Step-at-a-time output equals the batch output bit for bit, and the
  // prefix of a longer run equals the shorter run (causality).
  const auto batch = run_filter(registry, a, b, path);
  FilterSession session(registry, a, b);
  for (int k = 0; k < 12; ++k) {
    const StepResult r = session.step(path[k]);
    CHECK(r.disguised == batch[k]);
  }
  const std::span<const Eigen::VectorXd> prefix(path.data(), 7);
  const auto short_run = run_filter(registry, a, b, prefix);
  for (int k = 0; k < 7; ++k) CHECK(short_run[k] == batch[k]);
}

TEST_CASE("gauss-markov fast path agrees with the generic replay path") {
  ModelRegistry registry;
  Rng rng(51);
  const ModelHandle a = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.8, 1.0));
  const ModelHandle b = registry.register_model(random_gm_descriptor(rng, 3, 2, 0.6, 1.0));
  Rng path_rng(61);
  const auto path = registry.model(a).sample_path(15, path_rng);

  const auto fast = run_filter(registry, a, b, path);
  SessionOptions generic;
  generic.force_generic = true;
  const auto slow = run_filter(registry, a, b, path, generic);
  for (int k = 0; k < 15; ++k) {
    for (int l = 0; l < 2; ++l) {
      CHECK(std::abs(fast[k][l] - slow[k][l]) <=
            1e-10 * std::max(1.0, std::abs(slow[k][l])));
    }
  }
}

TEST_CASE("run_filter: occupancy disguise lands on the pseudo model's trajectory") {
  // True occupancy 1, pseudo occupancy 0: the pseudo model's mean stays at
  // the ambient level 100 for every k (its steady state equals its initial
  // mean), so the disguised window mean must sit there too.
  ModelRegistry registry;
  const ModelHandle theta1 = registry.register_model_json(occupancy_model_json(1.0));
  const ModelHandle pseudo0 = registry.register_model_json(occupancy_model_json(0.0));
  const GmParameter* pseudo_param = registry.gauss_markov_parameter(pseudo0);
  const auto pseudo_mean = gm_mean_trajectory(*pseudo_param, 50);
  for (int k = 0; k < 50; ++k) CHECK(pseudo_mean[k][0] == doctest::Approx(100.0).epsilon(1e-12));

  const int n_paths = 10000;
  double acc = 0.0, acc_sq = 0.0;
  for (int r = 0; r < n_paths; ++r) {
    Rng rng(derive_seed(515, {static_cast<std::uint64_t>(r)}));
    const auto y = registry.model(theta1).sample_path(50, rng);
    const auto disguised = run_filter(registry, theta1, pseudo0, y);
    double window = 0.0;
    for (int k = 39; k < 50; ++k) window += disguised[k][0];
    window /= 11.0;
    acc += window;
    acc_sq += window * window;
  }
  const double mean = acc / n_paths;
  const double se = std::sqrt((acc_sq / n_paths - mean * mean) / (n_paths - 1.0));
  CHECK(std::abs(mean - 100.0) <= 3.0 * se);
}

TEST_CASE("uniformity: the feedforward quantiles are U(0,1) (KS at alpha = 0.01)") {
  ModelRegistry registry;
  Rng rng(71);
  struct Case {
    ModelHandle true_h;
    ModelHandle pseudo_h;
  };
  std::vector<Case> cases;

  const ModelHandle iid_a = register_iid_gaussian(registry, 1.0, 2.0);
  const ModelHandle iid_b = register_iid_gaussian(registry, 0.0, 1.0);
  cases.push_back({iid_a, iid_b});

  const ModelHandle markov_a = registry.register_model_json(
      "{\"kind\":\"markov\",\"components\":[{\"phi\":0.7,"
      "\"init\":{\"family\":\"gaussian\",\"mean\":0,\"variance\":1},"
      "\"noise\":{\"family\":\"gaussian\",\"mean\":0,\"variance\":0.5}}]}");
  const ModelHandle markov_b = registry.register_model_json(
      "{\"kind\":\"markov\",\"components\":[{\"phi\":0.3,"
      "\"init\":{\"family\":\"gaussian\",\"mean\":1,\"variance\":2},"
      "\"noise\":{\"family\":\"laplace\",\"location\":0,\"scale\":0.6}}]}");
  cases.push_back({markov_a, markov_b});

  const ModelHandle gm_a = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.8, 1.0));
  const ModelHandle gm_b = registry.register_model(random_gm_descriptor(rng, 2, 2, 0.7, 1.0));
  cases.push_back({gm_a, gm_b});

  for (const Case& c : cases) {
    const int d = registry.dimension(c.true_h);
    const int horizon = 25;
    const int n_paths = (10000 + horizon * d - 1) / (horizon * d);
    std::vector<double> pooled;
    for (int r = 0; r < n_paths; ++r) {
      Rng path_rng(derive_seed(90, {c.true_h.id(), static_cast<std::uint64_t>(r)}));
      const auto path = registry.model(c.true_h).sample_path(horizon, path_rng);
      const FilterRun run = run_filter_traced(registry, c.true_h, c.pseudo_h, path);
      pooled.insert(pooled.end(), run.uniforms.values.begin(), run.uniforms.values.end());
    }
    pooled.resize(10000);
    const double ks = ks_statistic_uniform(pooled);
    CHECK(ks < ks_critical_value(0.01, pooled.size()));
  }
}

TEST_CASE("law invariance: disguised moments match a direct pseudo simulation") {
  ModelRegistry registry;
  const ModelHandle theta1 = registry.register_model_json(occupancy_model_json(1.0));
  const ModelHandle pseudo0 = registry.register_model_json(occupancy_model_json(0.0));

  const int n_paths = 10000;
  const int horizon = 50;
  std::vector<std::vector<Eigen::VectorXd>> filtered(n_paths), direct(n_paths);
  for (int r = 0; r < n_paths; ++r) {
    Rng rng(derive_seed(616, {static_cast<std::uint64_t>(r)}));
    filtered[r] = run_filter(registry, theta1, pseudo0,
                             registry.model(theta1).sample_path(horizon, rng));
    Rng rng2(derive_seed(617, {static_cast<std::uint64_t>(r)}));
    direct[r] = registry.model(pseudo0).sample_path(horizon, rng2);
  }
  const MomentSummary a = path_moments(filtered, 0);
  const MomentSummary b = path_moments(direct, 0);
  int mean_misses = 0, var_misses = 0, lag_misses = 0;
  for (int k = 0; k < horizon; ++k) {
    if (!within_3se(a.mean[k], a.mean_se[k], b.mean[k], b.mean_se[k])) ++mean_misses;
    if (!within_3se(a.variance[k], a.variance_se[k], b.variance[k], b.variance_se[k]))
      ++var_misses;
  }
  for (int k = 0; k + 1 < horizon; ++k) {
    if (!within_3se(a.lag1[k], a.lag1_se[k], b.lag1[k], b.lag1_se[k])) ++lag_misses;
  }
  CHECK(mean_misses == 0);
  CHECK(var_misses == 0);
  CHECK(lag_misses == 0);
}

TEST_CASE("markov chain structure: the output law ignores the true parameter") {
  // Same pseudo parameter, two different true parameters: the disguised
  // summary statistics must agree.
  ModelRegistry registry;
  const ModelHandle theta0 = registry.register_model_json(occupancy_model_json(0.0));
  const ModelHandle theta1 = registry.register_model_json(occupancy_model_json(1.0));
  const ModelHandle pseudo = registry.register_model_json(occupancy_model_json(0.6));

  const int n_paths = 8000;
  const int horizon = 30;
  std::vector<std::vector<Eigen::VectorXd>> from0(n_paths), from1(n_paths);
  for (int r = 0; r < n_paths; ++r) {
    Rng a(derive_seed(717, {static_cast<std::uint64_t>(r)}));
    from0[r] = run_filter(registry, theta0, pseudo,
                          registry.model(theta0).sample_path(horizon, a));
    Rng b(derive_seed(718, {static_cast<std::uint64_t>(r)}));
    from1[r] = run_filter(registry, theta1, pseudo,
                          registry.model(theta1).sample_path(horizon, b));
  }
  const MomentSummary a = path_moments(from0, 0);
  const MomentSummary b = path_moments(from1, 0);
  int misses = 0;
  for (int k = 0; k < horizon; ++k) {
    if (!within_3se(a.mean[k], a.mean_se[k], b.mean[k], b.mean_se[k])) ++misses;
    if (!within_3se(a.variance[k], a.variance_se[k], b.variance[k], b.variance_se[k])) ++misses;
  }
  CHECK(misses == 0);
}

TEST_CASE("sequential components: consistent permutation permutes the outputs") {
  // Independent components, so the per-component maps do not interact and
  // a swap of model components plus input components swaps the outputs.
  ModelRegistry registry;
  IidDescriptor ab;
  ab.components.push_back(DensitySpec::gaussian(0.0, 1.0));
  ab.components.push_back(DensitySpec::laplace(1.0, 2.0));
  IidDescriptor ba;
  ba.components.push_back(DensitySpec::laplace(1.0, 2.0));
  ba.components.push_back(DensitySpec::gaussian(0.0, 1.0));
  IidDescriptor target_ab;
  target_ab.components.push_back(DensitySpec::gaussian(3.0, 0.5));
  target_ab.components.push_back(DensitySpec::laplace(-2.0, 1.0));
  IidDescriptor target_ba;
  target_ba.components.push_back(DensitySpec::laplace(-2.0, 1.0));
  target_ba.components.push_back(DensitySpec::gaussian(3.0, 0.5));

  const ModelHandle h_ab = registry.register_model(ab);
  const ModelHandle h_ba = registry.register_model(ba);
  const ModelHandle t_ab = registry.register_model(target_ab);
  const ModelHandle t_ba = registry.register_model(target_ba);

  FilterSession forward(registry, h_ab, t_ab);
  FilterSession swapped(registry, h_ba, t_ba);
  Rng rng(81);
  for (int k = 0; k < 10; ++k) {
    const Eigen::Vector2d y(rng.normal(), rng.normal() + 1.0);
    const Eigen::Vector2d y_swapped(y[1], y[0]);
    const StepResult a = forward.step(y);
    const StepResult b = swapped.step(y_swapped);
    CHECK(a.disguised[0] == b.disguised[1]);
    CHECK(a.disguised[1] == b.disguised[0]);
  }
}

TEST_CASE("saturation: far-tail inputs are clamped and counted") {
  ModelRegistry registry;
  const ModelHandle a = register_iid_gaussian(registry, 0.0, 1.0);
  const ModelHandle b = register_iid_gaussian(registry, 0.0, 1.0);
  FilterSession session(registry, a, b);
  CHECK(session.saturation_count() == 0);
  const StepResult r = session.step(Eigen::VectorXd::Constant(1, 1e9));
  CHECK(session.saturation_count() == 1);
  CHECK(std::isfinite(r.disguised[0]));
  CHECK(r.uniforms[0] == 1.0 - 1e-15);
  session.step(Eigen::VectorXd::Constant(1, -1e9));
  CHECK(session.saturation_count() == 2);
  session.step(Eigen::VectorXd::Constant(1, 0.5));
  CHECK(session.saturation_count() == 2);
}
