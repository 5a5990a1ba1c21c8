#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sivo/camera.hpp"
#include "sivo/selection.hpp"
#include "sivo/sim.hpp"

namespace sivo {

/// Everything needed to reproduce one simulated experiment.
struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 0;
  WorldConfig world;
  TrajectoryConfig trajectory;
  CameraRig rig;
  ObservationConfig observation;
  DropoutSimConfig dropout;
  SelectionConfig selection;
  SimEstimatorConfig estimator;
  /// Strategies run by `simulate` when none is given on the command line.
  std::vector<Strategy> strategies{Strategy::AllFeatures, Strategy::KaessBatch};

  void validate() const;
};

/// Desk-scale loop: 200 m circuit, 500 frames, KITTI-like rig.
Scenario default_scenario();

/// Parses the scenario file format, a TOML subset: `key = value` pairs with
/// numbers, "strings", booleans and single-line arrays, grouped under
/// `[table]` / `[table.sub]` headers, `#` comments. Keys not set keep the
/// default_scenario() value. Unknown keys are errors.
/// Throws ConfigError with a line number.
Scenario parse_scenario(std::string_view text);

/// Strategy from its CLI name: all, mi, sivo-batch (alias sivo), sivo-greedy.
/// Throws ConfigError.
Strategy parse_strategy(std::string_view name);

TrajectoryShape parse_shape(std::string_view name);
std::string_view to_string(TrajectoryShape shape);

/// Fully resolved configuration as JSON text (used in run manifests).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace sivo
