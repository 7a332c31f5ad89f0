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

#include "modelrand/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modelrand {

double fano_bound_raw(double entropy_nats, double leakage_nats, int alphabet_size) {
  if (alphabet_size < 2) {
    throw std::domain_error("fano_bound: alphabet size must be at least 2");
  }
  if (entropy_nats < 0.0 || leakage_nats < 0.0) {
    throw std::domain_error("fano_bound: entropy and leakage must be >= 0");
  }
  return (entropy_nats - leakage_nats - 1.0) / std::log(static_cast<double>(alphabet_size));
}

double fano_bound(double entropy_nats, double leakage_nats, int alphabet_size) {
  return std::max(0.0, fano_bound_raw(entropy_nats, leakage_nats, alphabet_size));
}

double data_processing_bound(const ParameterPrior& prior, const RandomizerPolicy& policy) {
  return mutual_information(prior, policy);
}

PrivacyReport make_privacy_report(const ParameterPrior& prior, const RandomizerPolicy& policy,
                                  double leakage_budget_nats) {
  PrivacyReport report;
  report.prior_entropy_nats = prior_entropy(prior);
  report.mutual_information_nats = data_processing_bound(prior, policy);
  if (prior.size() >= 2) {
    report.fano_raw = fano_bound_raw(report.prior_entropy_nats,
                                     report.mutual_information_nats, prior.size());
    report.fano_lower_bound = std::max(0.0, report.fano_raw);
  }
  report.leakage_budget_nats = leakage_budget_nats;
  return report;
}

}  // namespace modelrand
