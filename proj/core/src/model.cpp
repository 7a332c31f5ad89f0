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

#include "modelrand/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "modelrand/gauss_markov.hpp"
#include "modelrand/normal.hpp"

namespace modelrand {

ParameterPrior::ParameterPrior(std::vector<ModelHandle> labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  if (labels_.size() != probs_.size()) {
    throw std::invalid_argument("ParameterPrior: labels and probs must have equal length");
  }
  if (labels_.empty()) throw std::invalid_argument("ParameterPrior: empty support");
  std::unordered_set<std::uint64_t> seen;
  for (const ModelHandle& h : labels_) {
    if (!seen.insert(h.id()).second) {
      throw std::invalid_argument("ParameterPrior: labels must be distinct");
    }
  }
  double total = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0)) throw std::invalid_argument("ParameterPrior: probabilities must be >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("ParameterPrior: probabilities must sum to 1");
  }
}

double entropy_nats(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double prior_entropy(const ParameterPrior& prior) { return entropy_nats(prior.probs()); }

std::string_view to_string(ModelFamily family) {
  switch (family) {
    case ModelFamily::kIid: return "iid";
    case ModelFamily::kMarkov: return "markov";
    case ModelFamily::kGaussMarkov: return "gauss_markov";
  }
  return "unknown";
}

double ConditionalModel::cond_icdf(double u, int component,
                                   std::span<const double> prefix,
                                   History history) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw std::domain_error("cond_icdf: u must lie in (0, 1)");
  }
  // Bracket the root, expanding geometrically from [-1, 1].
  double lo = -1.0, hi = 1.0;
  for (int i = 0; i < 200 && cond_cdf(lo, component, prefix, history) > u; ++i) lo *= 2.0;
  for (int i = 0; i < 200 && cond_cdf(hi, component, prefix, history) < u; ++i) hi *= 2.0;
  double flo = cond_cdf(lo, component, prefix, history);
  double fhi = cond_cdf(hi, component, prefix, history);
  if (flo > u || fhi < u) {
    throw std::runtime_error("cond_icdf: failed to bracket the quantile");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;  // bracket exhausted at double precision
    const double fm = cond_cdf(mid, component, prefix, history);
    if (std::abs(fm - u) <= 1e-12 && hi - lo <= 1e-9 * std::max(1.0, std::abs(mid))) {
      return mid;
    }
    if (fm < u) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

DensitySpec DensitySpec::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian density: variance must be > 0");
  return DensitySpec(DensityFamily::kGaussian, mean, variance);
}

DensitySpec DensitySpec::laplace(double location, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace density: scale must be > 0");
  return DensitySpec(DensityFamily::kLaplace, location, scale);
}

DensitySpec DensitySpec::exponential(double rate) {
  if (!(rate > 0.0)) throw std::invalid_argument("exponential density: rate must be > 0");
  return DensitySpec(DensityFamily::kExponential, rate, 0.0);
}

double DensitySpec::cdf(double z) const {
  switch (family_) {
    case DensityFamily::kGaussian:
      return gaussian_cdf(z, a_, b_);
    case DensityFamily::kLaplace: {
      const double t = (z - a_) / b_;
      return t < 0.0 ? 0.5 * std::exp(t) : 1.0 - 0.5 * std::exp(-t);
    }
    case DensityFamily::kExponential:
      return z <= 0.0 ? 0.0 : -std::expm1(-a_ * z);
  }
  throw std::logic_error("unreachable density family");
}

double DensitySpec::icdf(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::domain_error("DensitySpec::icdf: u must lie in (0, 1)");
  switch (family_) {
    case DensityFamily::kGaussian:
      return gaussian_icdf(u, a_, b_);
    case DensityFamily::kLaplace:
      return u < 0.5 ? a_ + b_ * std::log(2.0 * u) : a_ - b_ * std::log(2.0 * (1.0 - u));
    case DensityFamily::kExponential:
      return -std::log1p(-u) / a_;
  }
  throw std::logic_error("unreachable density family");
}

double DensitySpec::sample(Rng& rng) const { return icdf(rng.uniform01()); }

IidModel::IidModel(IidDescriptor descriptor) : components_(std::move(descriptor.components)) {
  if (components_.empty()) throw std::invalid_argument("iid model: needs at least one component");
}

double IidModel::cond_cdf(double z, int component, std::span<const double>, History) const {
  return components_.at(component).cdf(z);
}

double IidModel::cond_icdf(double u, int component, std::span<const double>, History) const {
  return components_.at(component).icdf(u);
}

std::vector<Eigen::VectorXd> IidModel::sample_path(int horizon, Rng& rng) const {
  std::vector<Eigen::VectorXd> path;
  path.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    Eigen::VectorXd y(dimension());
    for (int l = 0; l < dimension(); ++l) y[l] = components_[l].sample(rng);
    path.push_back(std::move(y));
  }
  return path;
}

MarkovModel::MarkovModel(MarkovDescriptor descriptor)
    : components_(std::move(descriptor.components)) {
  if (components_.empty()) throw std::invalid_argument("markov model: needs at least one component");
  for (const MarkovComponent& c : components_) {
    if (!std::isfinite(c.phi)) throw std::invalid_argument("markov model: phi must be finite");
  }
}

double MarkovModel::cond_cdf(double z, int component, std::span<const double>,
                             History history) const {
  const MarkovComponent& c = components_.at(component);
  if (history.empty()) return c.init.cdf(z);
  return c.noise.cdf(z - c.phi * history.back()[component]);
}

double MarkovModel::cond_icdf(double u, int component, std::span<const double>,
                              History history) const {
  const MarkovComponent& c = components_.at(component);
  if (history.empty()) return c.init.icdf(u);
  return c.phi * history.back()[component] + c.noise.icdf(u);
}

std::vector<Eigen::VectorXd> MarkovModel::sample_path(int horizon, Rng& rng) const {
  std::vector<Eigen::VectorXd> path;
  path.reserve(horizon);
  for (int k = 0; k < horizon; ++k) {
    Eigen::VectorXd y(dimension());
    for (int l = 0; l < dimension(); ++l) {
      const MarkovComponent& c = components_[l];
      y[l] = k == 0 ? c.init.sample(rng) : c.phi * path.back()[l] + c.noise.sample(rng);
    }
    path.push_back(std::move(y));
  }
  return path;
}

ModelRegistry::ModelRegistry() = default;
ModelRegistry::~ModelRegistry() = default;
ModelRegistry::ModelRegistry(ModelRegistry&&) noexcept = default;
ModelRegistry& ModelRegistry::operator=(ModelRegistry&&) noexcept = default;

ModelHandle ModelRegistry::register_model(const ModelDescriptor& descriptor) {
  std::unique_ptr<const ConditionalModel> model = std::visit(
      [](const auto& d) -> std::unique_ptr<const ConditionalModel> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IidDescriptor>) {
          return std::make_unique<IidModel>(d);
        } else if constexpr (std::is_same_v<T, MarkovDescriptor>) {
          return std::make_unique<MarkovModel>(d);
        } else {
          return std::make_unique<GmModel>(d);
        }
      },
      descriptor);
  models_.push_back(std::move(model));
  return ModelHandle(models_.size() - 1);
}

const ConditionalModel& ModelRegistry::model(ModelHandle handle) const {
  if (handle.id() >= models_.size()) {
    throw std::invalid_argument("ModelRegistry: unknown handle");
  }
  return *models_[handle.id()];
}

int ModelRegistry::dimension(ModelHandle handle) const { return model(handle).dimension(); }

ModelFamily ModelRegistry::family(ModelHandle handle) const { return model(handle).family(); }

const GmParameter* ModelRegistry::gauss_markov_parameter(ModelHandle handle) const {
  const auto* gm = dynamic_cast<const GmModel*>(&model(handle));
  return gm == nullptr ? nullptr : &gm->parameter();
}

std::size_t ModelRegistry::size() const { return models_.size(); }

namespace {

using nlohmann::json;

double require_number(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number()) {
    throw std::invalid_argument(std::string("model descriptor: missing numeric field '") +
                                field + "'");
  }
  return j[field].get<double>();
}

DensitySpec parse_density(const json& j) {
  if (!j.contains("family")) {
    throw std::invalid_argument("model descriptor: density needs a 'family'");
  }
  const std::string family = j["family"].get<std::string>();
  if (family == "gaussian") {
    return DensitySpec::gaussian(require_number(j, "mean"), require_number(j, "variance"));
  }
  if (family == "laplace") {
    return DensitySpec::laplace(require_number(j, "location"), require_number(j, "scale"));
  }
  if (family == "exponential") {
    return DensitySpec::exponential(require_number(j, "rate"));
  }
  throw std::invalid_argument("model descriptor: unknown density family '" + family + "'");
}

Eigen::MatrixXd parse_matrix(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array() || j[field].empty()) {
    throw std::invalid_argument(std::string("model descriptor: missing matrix field '") +
                                field + "'");
  }
  const json& rows = j[field];
  const std::size_t ncols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), ncols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != ncols) {
      throw std::invalid_argument(std::string("model descriptor: ragged matrix in '") +
                                  field + "'");
    }
    for (std::size_t c = 0; c < ncols; ++c) m(r, c) = rows[r][c].get<double>();
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) {
    throw std::invalid_argument(std::string("model descriptor: missing vector field '") +
                                field + "'");
  }
  Eigen::VectorXd v(j[field].size());
  for (std::size_t i = 0; i < j[field].size(); ++i) v[i] = j[field][i].get<double>();
  return v;
}

}  // namespace

ModelHandle ModelRegistry::register_model_json(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("model descriptor: invalid JSON: ") + e.what());
  }
  if (!j.contains("kind")) throw std::invalid_argument("model descriptor: missing 'kind'");
  const std::string kind = j["kind"].get<std::string>();
  if (kind == "gauss_markov") {
    GmDescriptor d;
    d.A = parse_matrix(j, "A");
    d.C = parse_matrix(j, "C");
    d.Qw = parse_matrix(j, "Qw");
    d.Qv = parse_matrix(j, "Qv");
    d.Q0 = parse_matrix(j, "Q0");
    d.drift = parse_vector(j, "drift");
    d.m0 = parse_vector(j, "m0");
    return register_model(d);
  }
  if (kind == "iid") {
    IidDescriptor d;
    if (!j.contains("components") || j["components"].empty()) {
      throw std::invalid_argument("iid descriptor: needs 'components'");
    }
    for (const json& c : j["components"]) d.components.push_back(parse_density(c));
    return register_model(d);
  }
  if (kind == "markov") {
    MarkovDescriptor d;
    if (!j.contains("components") || j["components"].empty()) {
      throw std::invalid_argument("markov descriptor: needs 'components'");
    }
    for (const json& c : j["components"]) {
      if (!c.contains("init") || !c.contains("noise")) {
        throw std::invalid_argument("markov descriptor: component needs 'init' and 'noise'");
      }
      d.components.push_back(MarkovComponent{require_number(c, "phi"),
                                             parse_density(c["init"]),
                                             parse_density(c["noise"])});
    }
    return register_model(d);
  }
  throw std::invalid_argument("model descriptor: unknown kind '" + kind + "'");
}

}  // namespace modelrand
