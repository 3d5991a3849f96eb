// Copyright 2026 The pilevol Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PILEVOL_VALIDATE_HPP
#define PILEVOL_VALIDATE_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "pilevol/config.hpp"

namespace pilevol {

struct ValidationResult {
  int checks = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
  void expect(bool condition, const std::string& message) {
    ++checks;
    if (!condition) failures.push_back(message);
  }
};

/**
 * Re-checks an emitted run directory against the config in its manifest:
 * every trajectory waypoint in C_free (q_pos > tau, bounds, enough features),
 * consecutive waypoints within the step radius, sigma^V non-increasing and
 * mu^V finite in the time series.
 */
ValidationResult validate_run(const std::filesystem::path& dir);

/// Static checks of a config before flying: sub-configs, terrain coverage, start pose feasibility.
ValidationResult validate_config(const CampaignConfig& cfg);

}  // namespace pilevol

#endif  // PILEVOL_VALIDATE_HPP
