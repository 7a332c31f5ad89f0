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

#ifndef MODELRAND_TESTS_SUPPORT_OCCUPANCY_HPP_
#define MODELRAND_TESTS_SUPPORT_OCCUPANCY_HPP_

#include <cstdint>
#include <string>

#include "modelrand/harness.hpp"

namespace modelrand::testing {

// Scalar CO2 model for a room with `occupants` people: the level decays
// with coefficient 0.95 toward the ambient baseline of 100 and each person
// adds a source strength of 10 per step, so the state input is
// 10 * occupants + (1 - 0.95) * 100. Process and measurement noise both
// have variance 0.1; the initial level is N(100, 1).
inline std::string occupancy_model_json(double occupants) {
  const double drift = 10.0 * occupants + 0.05 * 100.0;
  return std::string("{\"kind\":\"gauss_markov\",\"A\":[[0.95]],\"C\":[[1]],"
                     "\"Qw\":[[0.1]],\"Qv\":[[0.1]],\"Q0\":[[1]],\"drift\":[") +
         std::to_string(drift) + "],\"m0\":[100]}";
}

// The full occupancy experiment: occupancy prior uniform on {0, 1}, pseudo
// support {0, 0.2, ..., 1}, horizon 50, absolute-error distortion, drift
// estimator with window 10 evaluated at the end of the horizon.
inline std::string occupancy_config_json(int n_paths, long n_trials, std::uint64_t seed,
                                         const std::string& i0_grid = "[0,0.1,0.2,0.3,0.4,0.5,0.6,0.69]") {
  std::string j = "{\"models\":{";
  j += "\"theta0\":" + occupancy_model_json(0.0) + ",";
  j += "\"theta1\":" + occupancy_model_json(1.0) + ",";
  j += "\"theta2\":" + occupancy_model_json(2.0) + ",";
  const double pseudo_levels[] = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  const char* pseudo_names[] = {"p00", "p02", "p04", "p06", "p08", "p10"};
  for (int i = 0; i < 6; ++i) {
    j += std::string("\"") + pseudo_names[i] + "\":" + occupancy_model_json(pseudo_levels[i]);
    if (i + 1 < 6) j += ",";
  }
  j += "},";
  j += "\"prior\":{\"labels\":[\"theta0\",\"theta1\"],\"probs\":[0.5,0.5],\"values\":[0,1]},";
  j += "\"pseudo\":[\"p00\",\"p02\",\"p04\",\"p06\",\"p08\",\"p10\"],";
  j += "\"horizon\":50,\"distortion\":\"absolute_error\",";
  j += "\"i0_grid\":" + i0_grid + ",";
  j += "\"n_paths\":" + std::to_string(n_paths) + ",";
  j += "\"n_trials\":" + std::to_string(n_trials) + ",";
  j += "\"seed\":" + std::to_string(seed) + ",";
  j += "\"estimator\":{\"window\":10,\"decay\":0.95,\"candidates\":[0,1],\"eval_index\":50}";
  j += "}";
  return j;
}

inline ExperimentConfig occupancy_config(int n_paths, long n_trials, std::uint64_t seed) {
  return parse_experiment_config(occupancy_config_json(n_paths, n_trials, seed));
}

}  // namespace modelrand::testing

#endif  // MODELRAND_TESTS_SUPPORT_OCCUPANCY_HPP_
