#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blrm/decision.hpp"
#include "blrm/posterior.hpp"
#include "blrm/simulator.hpp"

namespace blrm {

struct SimulationConfig {
  int n_reps = 1000;
  std::uint64_t master_seed = 1;
  int parallelism = 1;

  void validate() const;
};

/// One run description: model + prior + design(s) + simulation + scenario.
/// Loaded from a JSON file; unknown keys are rejected.
struct RunConfig {
  ModelSpec model;
  BivariatePrior prior;
  DesignConfig design;
  std::vector<DesignVariant> variants;  // one entry per design to run/compare
  SimulationConfig simulation;
  ScenarioSource scenario;
  bool has_scenario = false;

  void validate() const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::string& path);
  std::string to_json_text() const;

  DesignConfig design_for(DesignVariant variant) const {
    DesignConfig d = design;
    d.variant = variant;
    return d;
  }
};

/// Per-dose counts plus the current dose for the recommend subcommand.
struct CohortDataFile {
  TrialData data;
  int current_index = 0;

  static CohortDataFile from_json_text(const std::string& text, std::size_t num_doses);
  static CohortDataFile from_file(const std::string& path, std::size_t num_doses);
};

std::string decision_to_json(const Decision& decision);

}  // namespace blrm
