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

#ifndef MODELRAND_HARNESS_HPP_
#define MODELRAND_HARNESS_HPP_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "modelrand/adversary.hpp"
#include "modelrand/infotheory.hpp"
#include "modelrand/model.hpp"
#include "modelrand/randomizer.hpp"

namespace modelrand {

// One experiment: a named model registry, a prior over some of those
// models, a pseudo support, and the Monte Carlo / sweep parameters. Parsed
// from a single JSON document; see the repository README for the schema.
struct ExperimentConfig {
  ModelRegistry registry;
  std::map<std::string, ModelHandle> models;
  std::vector<std::string> prior_names;
  std::optional<ParameterPrior> prior;
  std::vector<double> prior_values;  // numeric parameter value per prior label
  std::vector<std::string> pseudo_names;
  std::vector<ModelHandle> pseudo;
  int horizon = 50;
  DistortionKind distortion = DistortionKind::kAbsoluteError;
  std::vector<double> i0_grid;  // nats
  int n_paths = 1000;
  long n_trials = 10000;
  std::uint64_t seed = 1;
  OccupancyEstimatorConfig estimator;
  int threads = 0;

  ModelHandle handle(const std::string& name) const;
};

ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

struct SweepRow {
  double i0 = 0.0;
  double relative_distortion_pct = 0.0;
  double achieved_mi = 0.0;
  double p_err = 0.0;
  double p_err_se = 0.0;
  double fano_bound_clamped = 0.0;
  double fano_bound_raw = 0.0;
  double achieved_distortion = 0.0;  // in the configured distortion units
};

struct SweepResult {
  std::vector<SweepRow> rows;
  DistortionMatrix distortion;           // configured distortion kind
  DistortionMatrix absolute_distortion;  // absolute error, used for reporting
  double mean_signal = 0.0;              // Monte Carlo mean of the unfiltered signal
};

// Estimates the distortion matrix once, then for every leakage budget in
// the grid solves the randomizer, evaluates the adversary and assembles one
// row. Deterministic given the config seed; budgets share trial seeds
// (common random numbers), so adjacent rows are comparable.
SweepResult run_sweep(const ExperimentConfig& config);

// Columns: I0,relative_distortion_percent,achieved_MI,p_err,fano_bound
void write_sweep_csv(std::ostream& out, const SweepResult& result);
// Side-car with standard errors and the distortion matrix.
void write_sweep_meta_json(std::ostream& out, const ExperimentConfig& config,
                           const SweepResult& result);

// Monte Carlo mean of the raw measurement under the prior, averaged over
// the horizon and components (the denominator of the relative distortion).
double estimate_mean_signal(const ExperimentConfig& config);

struct BaselineRow {
  std::string model;
  int run = 0;
  int k = 0;
  double estimate_direct = 0.0;
  double estimate_noisy = 0.0;
};

// Drift-estimator traces with and without additive i.i.d. Gaussian noise of
// the given variance on the shared measurements (scalar models only).
std::vector<BaselineRow> run_baseline_noise(const ExperimentConfig& config,
                                            const std::vector<std::string>& model_names,
                                            double noise_variance, int n_runs);
void write_baseline_csv(std::ostream& out, const std::vector<BaselineRow>& rows);

// Line-by-line disguise of a CSV vector stream: reads one d-vector per
// line, writes the disguised vector (plus the uniforms when emit_uniforms
// is set) and flushes after every line. Returns the saturation count.
// Throws std::runtime_error on a malformed line.
long filter_stream(const ModelRegistry& registry, ModelHandle true_model,
                   ModelHandle pseudo_model, std::istream& in, std::ostream& out,
                   bool emit_uniforms = false);

// Policy and distortion-matrix files (JSON, names resolved through the
// config's model map).
struct PolicyFile {
  RandomizerPolicy policy;
  std::vector<std::string> pseudo_names;
  double i0_nats = 0.0;
  double achieved_mi = 0.0;
  double achieved_distortion = 0.0;
  bool constraint_active = false;
};

void write_policy_json(std::ostream& out, const PolicyFile& file);
PolicyFile read_policy_json(std::istream& in, const ExperimentConfig& config);

void write_distortion_json(std::ostream& out, const DistortionMatrix& matrix,
                           const ExperimentConfig& config);
DistortionMatrix read_distortion_json(std::istream& in, const ExperimentConfig& config);

void write_privacy_report_json(std::ostream& out, const PrivacyReport& report);

// RFC 4180 field quoting (quotes only when the field needs it).
std::string csv_field(std::string_view value);
// Deterministic, locale-independent float formatting used in all emitted files.
std::string format_double(double value);

}  // namespace modelrand

#endif  // MODELRAND_HARNESS_HPP_
