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

#ifndef MODELRAND_MODEL_HPP_
#define MODELRAND_MODEL_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modelrand/random.hpp"

namespace modelrand {

// Opaque handle into a ModelRegistry. Registration identity, not content
// identity: registering the same descriptor twice yields distinct handles.
class ModelHandle {
 public:
  ModelHandle() = default;
  friend bool operator==(ModelHandle, ModelHandle) = default;
  std::uint64_t id() const { return id_; }

 private:
  friend class ModelRegistry;
  explicit ModelHandle(std::uint64_t id) : id_(id) {}
  std::uint64_t id_ = static_cast<std::uint64_t>(-1);
};

// Discrete prior over a finite set of registered parameters.
class ParameterPrior {
 public:
  // Throws std::invalid_argument unless the labels are distinct, sizes
  // match, every probability is nonnegative and the total is 1 within 1e-12.
  ParameterPrior(std::vector<ModelHandle> labels, std::vector<double> probs);

  const std::vector<ModelHandle>& labels() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }

 private:
  std::vector<ModelHandle> labels_;
  std::vector<double> probs_;
};

// Discrete entropy -sum p ln p in nats, with 0 ln 0 := 0.
double prior_entropy(const ParameterPrior& prior);
double entropy_nats(std::span<const double> probs);

enum class ModelFamily { kIid, kMarkov, kGaussMarkov };

std::string_view to_string(ModelFamily family);

// Past measurement vectors y_1, ..., y_{k-1}, oldest first.
using History = std::span<const Eigen::VectorXd>;

// A statistical model presented through its conditional c.d.f.s: for each
// component l of the current vector, the law of that component given the
// earlier components of the same vector and the whole history. The time
// index is implied by the history length (history.size() + 1).
//
// Implementations must be pure: they may not retain the spans they are
// handed. cond_cdf is strictly increasing in z for fixed conditioning.
class ConditionalModel {
 public:
  virtual ~ConditionalModel() = default;

  virtual int dimension() const = 0;
  virtual ModelFamily family() const = 0;

  // component is 0-based; same_time_prefix holds the first `component`
  // entries of the current vector.
  virtual double cond_cdf(double z, int component,
                          std::span<const double> same_time_prefix,
                          History history) const = 0;

  // Default implementation inverts cond_cdf by bisection over an
  // auto-expanded bracket (tolerance 1e-12 on u). Models with closed-form
  // quantiles override it.
  virtual double cond_icdf(double u, int component,
                           std::span<const double> same_time_prefix,
                           History history) const;

  // Draws a length-`horizon` measurement path. Deterministic given the
  // generator state.
  virtual std::vector<Eigen::VectorXd> sample_path(int horizon, Rng& rng) const = 0;
};

enum class DensityFamily { kGaussian, kLaplace, kExponential };

// One univariate density from the named families.
//   gaussian:    mean / variance
//   laplace:     location / scale
//   exponential: rate (support [0, inf); the c.d.f. saturates at 0 below it)
class DensitySpec {
 public:
  static DensitySpec gaussian(double mean, double variance);
  static DensitySpec laplace(double location, double scale);
  static DensitySpec exponential(double rate);

  DensityFamily family() const { return family_; }
  double cdf(double z) const;
  double icdf(double u) const;
  double sample(Rng& rng) const;

 private:
  DensitySpec(DensityFamily family, double a, double b) : family_(family), a_(a), b_(b) {}
  DensityFamily family_;
  double a_;
  double b_;
};

struct IidDescriptor {
  std::vector<DensitySpec> components;
};

struct MarkovComponent {
  double phi = 0.0;    // AR(1) coefficient for this component
  DensitySpec init;    // law of the first sample
  DensitySpec noise;   // innovation law: y_k = phi * y_{k-1} + noise
};

struct MarkovDescriptor {
  std::vector<MarkovComponent> components;
};

struct GmDescriptor {
  Eigen::MatrixXd A;      // n x n state transition
  Eigen::MatrixXd C;      // d x n output map
  Eigen::MatrixXd Qw;     // n x n process noise covariance
  Eigen::MatrixXd Qv;     // d x d measurement noise covariance
  Eigen::MatrixXd Q0;     // n x n initial state covariance
  Eigen::VectorXd drift;  // constant state input
  Eigen::VectorXd m0;     // initial state mean
};

using ModelDescriptor = std::variant<IidDescriptor, MarkovDescriptor, GmDescriptor>;

class GmParameter;  // gauss_markov.hpp

// Registry of registered models. Build it up front, then share freely:
// after the registration phase it is immutable and all lookups are
// const and thread-safe.
class ModelRegistry {
 public:
  ModelRegistry();
  ~ModelRegistry();
  ModelRegistry(ModelRegistry&&) noexcept;
  ModelRegistry& operator=(ModelRegistry&&) noexcept;

  // Validates the descriptor and returns a fresh handle. Throws
  // std::invalid_argument on malformed descriptors.
  ModelHandle register_model(const ModelDescriptor& descriptor);

  // Parses one JSON descriptor, e.g.
  //   {"kind":"gauss_markov","A":[[..]],"C":[[..]],"Qw":[[..]],"Qv":[[..]],
  //    "Q0":[[..]],"drift":[..],"m0":[..]}
  //   {"kind":"iid","components":[{"family":"gaussian","mean":0,"variance":1}]}
  //   {"kind":"markov","components":[{"phi":0.8,"init":{...},"noise":{...}}]}
  ModelHandle register_model_json(std::string_view json_text);

  const ConditionalModel& model(ModelHandle handle) const;
  int dimension(ModelHandle handle) const;
  ModelFamily family(ModelHandle handle) const;

  // Non-null only for Gauss-Markov registrations; used for fast paths.
  const GmParameter* gauss_markov_parameter(ModelHandle handle) const;

  std::size_t size() const;

 private:
  std::vector<std::unique_ptr<const ConditionalModel>> models_;
};

// Product of independent per-component densities; the conditional law of
// every component ignores both the same-time prefix and the history.
class IidModel final : public ConditionalModel {
 public:
  explicit IidModel(IidDescriptor descriptor);

  int dimension() const override { return static_cast<int>(components_.size()); }
  ModelFamily family() const override { return ModelFamily::kIid; }
  double cond_cdf(double z, int component, std::span<const double> prefix,
                  History history) const override;
  double cond_icdf(double u, int component, std::span<const double> prefix,
                   History history) const override;
  std::vector<Eigen::VectorXd> sample_path(int horizon, Rng& rng) const override;

 private:
  std::vector<DensitySpec> components_;
};

// Independent per-component AR(1) chains: the conditional law of component
// l depends on the history only through y_{k-1}[l].
class MarkovModel final : public ConditionalModel {
 public:
  explicit MarkovModel(MarkovDescriptor descriptor);

  int dimension() const override { return static_cast<int>(components_.size()); }
  ModelFamily family() const override { return ModelFamily::kMarkov; }
  double cond_cdf(double z, int component, std::span<const double> prefix,
                  History history) const override;
  double cond_icdf(double u, int component, std::span<const double> prefix,
                   History history) const override;
  std::vector<Eigen::VectorXd> sample_path(int horizon, Rng& rng) const override;

 private:
  std::vector<MarkovComponent> components_;
};

}  // namespace modelrand

#endif  // MODELRAND_MODEL_HPP_
