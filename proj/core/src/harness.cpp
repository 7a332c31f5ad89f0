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

#include "modelrand/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "modelrand/parallel.hpp"
#include "modelrand/random.hpp"
#include "modelrand/transform.hpp"

namespace modelrand {

using nlohmann::json;

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string csv_field(std::string_view value) {
  const bool needs_quotes =
      value.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

ModelHandle ExperimentConfig::handle(const std::string& name) const {
  const auto it = models.find(name);
  if (it == models.end()) {
    throw std::invalid_argument("config: unknown model name '" + name + "'");
  }
  return it->second;
}

namespace {

DistortionKind parse_distortion_kind(const std::string& name) {
  if (name == "absolute_error") return DistortionKind::kAbsoluteError;
  if (name == "squared_error") return DistortionKind::kSquaredError;
  throw std::invalid_argument("config: unknown distortion '" + name + "'");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  if (!j.contains("models") || !j["models"].is_object() || j["models"].empty()) {
    throw std::invalid_argument("config: needs a non-empty 'models' object");
  }
  for (const auto& [name, descriptor] : j["models"].items()) {
    cfg.models.emplace(name, cfg.registry.register_model_json(descriptor.dump()));
  }

  if (!j.contains("prior")) throw std::invalid_argument("config: needs 'prior'");
  const json& prior = j["prior"];
  std::vector<ModelHandle> labels;
  for (const json& name : prior.at("labels")) {
    cfg.prior_names.push_back(name.get<std::string>());
    labels.push_back(cfg.handle(cfg.prior_names.back()));
  }
  std::vector<double> probs = prior.at("probs").get<std::vector<double>>();
  cfg.prior.emplace(std::move(labels), std::move(probs));
  if (prior.contains("values")) {
    cfg.prior_values = prior["values"].get<std::vector<double>>();
    if (cfg.prior_values.size() != cfg.prior_names.size()) {
      throw std::invalid_argument("config: prior.values must align with prior.labels");
    }
  }

  if (!j.contains("pseudo") || j["pseudo"].empty()) {
    throw std::invalid_argument("config: needs a non-empty 'pseudo' list");
  }
  for (const json& name : j["pseudo"]) {
    cfg.pseudo_names.push_back(name.get<std::string>());
    cfg.pseudo.push_back(cfg.handle(cfg.pseudo_names.back()));
  }

  cfg.horizon = j.value("horizon", 50);
  if (cfg.horizon < 1) throw std::invalid_argument("config: horizon must be >= 1");
  cfg.distortion = parse_distortion_kind(j.value("distortion", std::string("absolute_error")));
  if (j.contains("i0_grid")) cfg.i0_grid = j["i0_grid"].get<std::vector<double>>();
  const std::string unit = j.value("i0_unit", std::string("nats"));
  if (unit == "bits") {
    for (double& v : cfg.i0_grid) v *= M_LN2;
  } else if (unit != "nats") {
    throw std::invalid_argument("config: i0_unit must be 'nats' or 'bits'");
  }
  cfg.n_paths = j.value("n_paths", 1000);
  cfg.n_trials = j.value("n_trials", 10000L);
  cfg.seed = j.value("seed", 1ULL);
  cfg.threads = j.value("threads", 0);

  if (j.contains("estimator")) {
    const json& est = j["estimator"];
    cfg.estimator.window = est.value("window", 10);
    cfg.estimator.decay = est.value("decay", 0.95);
    if (est.contains("candidates")) {
      cfg.estimator.candidates = est["candidates"].get<std::vector<double>>();
    }
    cfg.estimator.eval_index = est.value("eval_index", cfg.horizon);
  }
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str());
}

double estimate_mean_signal(const ExperimentConfig& config) {
  const ParameterPrior& prior = *config.prior;
  double total = 0.0;
  std::vector<double> per_path(config.n_paths);
  for (int i = 0; i < prior.size(); ++i) {
    const ConditionalModel& model = config.registry.model(prior.labels()[i]);
    parallel_for(config.n_paths, config.threads, [&](long begin, long end) {
      for (long r = begin; r < end; ++r) {
        Rng rng(derive_seed(config.seed, {0xa11ceull, static_cast<std::uint64_t>(r)}));
        const std::vector<Eigen::VectorXd> path = model.sample_path(config.horizon, rng);
        double acc = 0.0;
        for (const Eigen::VectorXd& y : path) acc += y.mean();
        per_path[r] = acc / config.horizon;
      }
    });
    double mean = 0.0;
    for (double v : per_path) mean += v;
    total += prior.probs()[i] * (mean / config.n_paths);
  }
  return total;
}

SweepResult run_sweep(const ExperimentConfig& config) {
  if (!config.prior) throw std::invalid_argument("run_sweep: config has no prior");
  if (config.i0_grid.empty()) throw std::invalid_argument("run_sweep: empty i0 grid");
  if (config.prior_values.empty()) {
    throw std::invalid_argument("run_sweep: prior.values are required for the adversary");
  }

  SweepResult result;
  result.distortion = estimate_distortion_matrix(
      config.registry, *config.prior, config.pseudo, config.horizon, config.distortion,
      config.n_paths, config.seed, config.threads);
  // The relative-distortion report is always in absolute-error units.
  result.absolute_distortion =
      config.distortion == DistortionKind::kAbsoluteError
          ? result.distortion
          : estimate_distortion_matrix(config.registry, *config.prior, config.pseudo,
                                       config.horizon, DistortionKind::kAbsoluteError,
                                       config.n_paths, config.seed, config.threads);
  result.mean_signal = estimate_mean_signal(config);

  const int m = config.prior->size();
  for (double i0 : config.i0_grid) {
    RandomizerSolution solution = solve_randomizer(result.distortion, *config.prior, i0);
    const ErrorProbability err = error_probability(
        config.registry, *config.prior, config.prior_values, solution.policy, config.horizon,
        config.estimator, config.n_trials, config.seed, config.threads);

    double absolute = 0.0;
    for (int i = 0; i < m; ++i) {
      for (int jj = 0; jj < static_cast<int>(config.pseudo.size()); ++jj) {
        absolute += config.prior->probs()[i] * solution.policy.P(jj, i) *
                    result.absolute_distortion.mean(i, jj);
      }
    }

    SweepRow row;
    row.i0 = i0;
    row.achieved_mi = solution.achieved_mi;
    row.achieved_distortion = solution.achieved_distortion;
    row.relative_distortion_pct = 100.0 * absolute / result.mean_signal;
    row.p_err = err.p_err;
    row.p_err_se = err.std_error;
    if (m >= 2) {
      row.fano_bound_raw = fano_bound_raw(prior_entropy(*config.prior), solution.achieved_mi, m);
      row.fano_bound_clamped = std::max(0.0, row.fano_bound_raw);
    }
    result.rows.push_back(row);
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << "I0,relative_distortion_percent,achieved_MI,p_err,fano_bound\n";
  for (const SweepRow& row : result.rows) {
    out << format_double(row.i0) << ',' << format_double(row.relative_distortion_pct) << ','
        << format_double(row.achieved_mi) << ',' << format_double(row.p_err) << ','
        << format_double(row.fano_bound_clamped) << '\n';
  }
}

namespace {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].empty()) {
    throw std::invalid_argument(std::string("file: missing matrix field '") + field + "'");
  }
  const json& rows = j[field];
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw std::invalid_argument(std::string("file: ragged matrix in '") + field + "'");
    }
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

}  // namespace

void write_sweep_meta_json(std::ostream& out, const ExperimentConfig& config,
                           const SweepResult& result) {
  json j;
  j["mean_signal"] = result.mean_signal;
  j["horizon"] = config.horizon;
  j["n_paths"] = config.n_paths;
  j["n_trials"] = config.n_trials;
  j["seed"] = config.seed;
  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    rows.push_back({{"i0", row.i0},
                    {"relative_distortion_percent", row.relative_distortion_pct},
                    {"achieved_mi", row.achieved_mi},
                    {"achieved_distortion", row.achieved_distortion},
                    {"p_err", row.p_err},
                    {"p_err_se", row.p_err_se},
                    {"fano_bound", row.fano_bound_clamped},
                    {"fano_bound_raw", row.fano_bound_raw}});
  }
  j["rows"] = std::move(rows);
  j["distortion"] = {{"true_labels", config.prior_names},
                     {"pseudo_labels", config.pseudo_names},
                     {"mean", matrix_to_json(result.distortion.mean)},
                     {"std_error", matrix_to_json(result.distortion.std_error)},
                     {"saturation_fraction", matrix_to_json(result.distortion.saturation_fraction)}};
  out << j.dump(2) << '\n';
}

std::vector<BaselineRow> run_baseline_noise(const ExperimentConfig& config,
                                            const std::vector<std::string>& model_names,
                                            double noise_variance, int n_runs) {
  if (noise_variance < 0.0) {
    throw std::invalid_argument("baseline: noise variance must be >= 0");
  }
  if (n_runs < 1) throw std::invalid_argument("baseline: n_runs must be >= 1");
  std::vector<BaselineRow> rows;
  for (std::size_t mi = 0; mi < model_names.size(); ++mi) {
    const ModelHandle h = config.handle(model_names[mi]);
    if (config.registry.dimension(h) != 1) {
      throw std::invalid_argument("baseline: drift estimator needs scalar models");
    }
    const ConditionalModel& model = config.registry.model(h);
    for (int run = 0; run < n_runs; ++run) {
      Rng rng(derive_seed(config.seed, {0xba5e11ull, mi, static_cast<std::uint64_t>(run)}));
      const std::vector<Eigen::VectorXd> path = model.sample_path(config.horizon, rng);
      std::vector<double> direct(config.horizon), noisy(config.horizon);
      for (int k = 0; k < config.horizon; ++k) {
        direct[k] = path[k][0];
        noisy[k] = noise_variance > 0.0 ? direct[k] + rng.normal(0.0, noise_variance)
                                        : direct[k];
      }
      OccupancyEstimatorConfig est = config.estimator;
      for (int k = est.window + 1; k <= config.horizon; ++k) {
        est.eval_index = k;
        rows.push_back(BaselineRow{model_names[mi], run, k, drift_statistic(direct, est),
                                   drift_statistic(noisy, est)});
      }
    }
  }
  return rows;
}

void write_baseline_csv(std::ostream& out, const std::vector<BaselineRow>& rows) {
  out << "model,run,k,estimate_direct,estimate_noisy\n";
  for (const BaselineRow& row : rows) {
    out << csv_field(row.model) << ',' << row.run << ',' << row.k << ','
        << format_double(row.estimate_direct) << ',' << format_double(row.estimate_noisy)
        << '\n';
  }
}

long filter_stream(const ModelRegistry& registry, ModelHandle true_model,
                   ModelHandle pseudo_model, std::istream& in, std::ostream& out,
                   bool emit_uniforms) {
  FilterSession session(registry, true_model, pseudo_model);
  const int d = session.dimension();
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Eigen::VectorXd y(d);
    const char* cursor = line.c_str();
    for (int l = 0; l < d; ++l) {
      char* next = nullptr;
      y[l] = std::strtod(cursor, &next);
      if (next == cursor) {
        throw std::runtime_error("filter-stream: malformed number on line " +
                                 std::to_string(line_number));
      }
      cursor = next;
      if (l + 1 < d) {
        while (*cursor == ' ') ++cursor;
        if (*cursor != ',') {
          throw std::runtime_error("filter-stream: expected " + std::to_string(d) +
                                   " fields on line " + std::to_string(line_number));
        }
        ++cursor;
      }
    }
    while (*cursor == ' ') ++cursor;
    if (*cursor != '\0' && *cursor != ',') {
      throw std::runtime_error("filter-stream: trailing garbage on line " +
                               std::to_string(line_number));
    }
    const StepResult r = session.step(y);
    for (int l = 0; l < d; ++l) {
      if (l > 0) out << ',';
      out << format_double(r.disguised[l]);
    }
    if (emit_uniforms) {
      for (int l = 0; l < d; ++l) out << ',' << format_double(r.uniforms[l]);
    }
    out << '\n';
    out.flush();
  }
  return session.saturation_count();
}

void write_policy_json(std::ostream& out, const PolicyFile& file) {
  json j;
  j["pseudo_labels"] = file.pseudo_names;
  j["P"] = matrix_to_json(file.policy.P);
  j["i0_nats"] = file.i0_nats;
  j["achieved_mi_nats"] = file.achieved_mi;
  j["achieved_distortion"] = file.achieved_distortion;
  j["constraint_active"] = file.constraint_active;
  out << j.dump(2) << '\n';
}

PolicyFile read_policy_json(std::istream& in, const ExperimentConfig& config) {
  json j = json::parse(in);
  PolicyFile file;
  file.pseudo_names = j.at("pseudo_labels").get<std::vector<std::string>>();
  file.policy.P = matrix_from_json(j, "P");
  for (const std::string& name : file.pseudo_names) {
    file.policy.pseudo_labels.push_back(config.handle(name));
  }
  file.i0_nats = j.value("i0_nats", 0.0);
  file.achieved_mi = j.value("achieved_mi_nats", 0.0);
  file.achieved_distortion = j.value("achieved_distortion", 0.0);
  file.constraint_active = j.value("constraint_active", false);
  file.policy.validate();
  return file;
}

void write_distortion_json(std::ostream& out, const DistortionMatrix& matrix,
                           const ExperimentConfig& config) {
  json j;
  std::vector<std::string> true_names, pseudo_names;
  auto name_of = [&config](ModelHandle h) {
    for (const auto& [name, handle] : config.models) {
      if (handle == h) return name;
    }
    throw std::invalid_argument("distortion file: handle not present in the config");
  };
  for (const ModelHandle& h : matrix.true_labels) true_names.push_back(name_of(h));
  for (const ModelHandle& h : matrix.pseudo_labels) pseudo_names.push_back(name_of(h));
  j["true_labels"] = true_names;
  j["pseudo_labels"] = pseudo_names;
  j["horizon"] = matrix.horizon;
  j["n_paths"] = matrix.n_paths;
  j["mean"] = matrix_to_json(matrix.mean);
  j["std_error"] = matrix_to_json(matrix.std_error);
  j["saturation_fraction"] = matrix_to_json(matrix.saturation_fraction);
  out << j.dump(2) << '\n';
}

DistortionMatrix read_distortion_json(std::istream& in, const ExperimentConfig& config) {
  json j = json::parse(in);
  DistortionMatrix matrix;
  for (const json& name : j.at("true_labels")) {
    matrix.true_labels.push_back(config.handle(name.get<std::string>()));
  }
  for (const json& name : j.at("pseudo_labels")) {
    matrix.pseudo_labels.push_back(config.handle(name.get<std::string>()));
  }
  matrix.horizon = j.value("horizon", 0);
  matrix.n_paths = j.value("n_paths", 0);
  matrix.mean = matrix_from_json(j, "mean");
  matrix.std_error = matrix_from_json(j, "std_error");
  if (j.contains("saturation_fraction")) {
    matrix.saturation_fraction = matrix_from_json(j, "saturation_fraction");
  } else {
    matrix.saturation_fraction = Eigen::MatrixXd::Zero(matrix.mean.rows(), matrix.mean.cols());
  }
  return matrix;
}

void write_privacy_report_json(std::ostream& out, const PrivacyReport& report) {
  json j;
  j["prior_entropy_nats"] = report.prior_entropy_nats;
  j["prior_entropy_bits"] = report.prior_entropy_nats / M_LN2;
  j["mutual_information_nats"] = report.mutual_information_nats;
  j["mutual_information_bits"] = report.mutual_information_nats / M_LN2;
  j["fano_lower_bound"] = report.fano_lower_bound;
  j["fano_lower_bound_raw"] = report.fano_raw;
  j["leakage_budget_nats"] = report.leakage_budget_nats;
  out << j.dump(2) << '\n';
}

}  // namespace modelrand
