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

#ifndef MODELRAND_INFOTHEORY_HPP_
#define MODELRAND_INFOTHEORY_HPP_

#include "modelrand/model.hpp"
#include "modelrand/randomizer.hpp"

namespace modelrand {

// Lower bound (entropy - leakage - 1) / ln(alphabet_size) on the error
// probability of any estimator of the private parameter from the shared
// data. All quantities in nats; the "- 1" is likewise 1 nat. Throws
// std::domain_error for alphabet_size < 2.
double fano_bound_raw(double entropy_nats, double leakage_nats, int alphabet_size);

// Same bound clamped at 0 (a negative probability bound is vacuous).
double fano_bound(double entropy_nats, double leakage_nats, int alphabet_size);

// Certified analytic bound on the end-to-end leakage: the data shared
// downstream of the randomizer can reveal at most I(true; pseudo) nats
// about the private parameter. No sample-based estimate is involved.
double data_processing_bound(const ParameterPrior& prior, const RandomizerPolicy& policy);

struct PrivacyReport {
  double prior_entropy_nats = 0.0;
  double mutual_information_nats = 0.0;  // I(true; pseudo), the leakage bound
  double fano_raw = 0.0;
  double fano_lower_bound = 0.0;         // clamped at 0
  double leakage_budget_nats = 0.0;      // the configured budget
};

PrivacyReport make_privacy_report(const ParameterPrior& prior, const RandomizerPolicy& policy,
                                  double leakage_budget_nats);

}  // namespace modelrand

#endif  // MODELRAND_INFOTHEORY_HPP_
