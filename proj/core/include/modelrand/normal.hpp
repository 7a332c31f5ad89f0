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

#ifndef MODELRAND_NORMAL_HPP_
#define MODELRAND_NORMAL_HPP_

#include <cmath>

namespace modelrand {

// Gaussian CDF, evaluated through erfc so the lower tail keeps full
// relative precision.
double gaussian_cdf(double z, double mean, double variance);

// Gaussian quantile (Wichura's PPND16 rational approximation, relative
// error below 1e-15). Requires u in the open interval (0, 1) and
// variance > 0; throws std::domain_error otherwise.
double gaussian_icdf(double u, double mean, double variance);

// Standard-normal versions.
double standard_normal_cdf(double z);
double standard_normal_icdf(double u);

}  // namespace modelrand

#endif  // MODELRAND_NORMAL_HPP_
