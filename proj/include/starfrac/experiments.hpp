// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "starfrac/geometry.hpp"
#include "starfrac/grid.hpp"
#include "starfrac/initial_density.hpp"
#include "starfrac/test_function.hpp"

namespace starfrac {

/// Declarative experiment driver.  config["experiment"] selects one of:
///   operator-identity, h-alpha-bound, adjoint-moments, kinetic-sweep,
///   jump-vs-pde, convex-vs-nonconvex, sampler-tests
/// Artifacts (CSV tables, density snapshots, summary.json with config echo,
/// metrics, thresholds, and wall time) are written into out_dir.  `pass`
/// reflects every threshold of the experiment.
struct ExperimentOutcome {
  bool pass = false;
  nlohmann::json summary;
};

ExperimentOutcome run_experiment(const nlohmann::json& config,
                                 const std::string& out_dir);

/// Config fragments shared with the test suites.
DomainSpec domain_from_json(const nlohmann::json& j);
TestFunction test_function_from_json(const nlohmann::json& j);
InitialDensity initial_from_json(const nlohmann::json& j, const Grid* grid);

}  // namespace starfrac
