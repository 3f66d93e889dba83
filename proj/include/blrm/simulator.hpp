#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "blrm/decision.hpp"
#include "blrm/posterior.hpp"
#include "blrm/scenarios.hpp"

namespace blrm {

struct TrialOutcome {
  enum class Terminal { DeclaredMTD, AllToxic, NotFound };

  Terminal terminal = Terminal::NotFound;
  int mtd_index = -1;  // only for Terminal::DeclaredMTD
  std::vector<int> patients;
  std::vector<int> dlts;
  int total_patients = 0;
  int total_dlts = 0;
  std::vector<Decision> trace;
};

/// One simulated trial: enroll cohorts, draw DLTs from the true rates, refit,
/// decide, until a terminal decision. The rng stream provides both the
/// scenario draws (for generated scenarios, upstream) and the patient outcomes.
TrialOutcome run_trial(const ScenarioSpec& scenario, const DesignConfig& design,
                       const PosteriorEngine& engine, Philox4x32& rng);

/// Spec-shaped convenience overload; builds a throwaway engine.
TrialOutcome run_trial(const ScenarioSpec& scenario, const DesignConfig& design,
                       const ModelSpec& model, const BivariatePrior& prior,
                       std::uint64_t seed, const QuadratureConfig& quad = {});

/// Where each replicate's true curve comes from: a fixed ScenarioSpec or one
/// of the random generators (drawn per replicate, before any patient draws).
struct ScenarioSource {
  enum class Kind { Fixed, Clertant, Paoletti };

  Kind kind = Kind::Fixed;
  ScenarioSpec fixed;
  double phi = 0.25;
  PaolettiParams paoletti;

  static ScenarioSource from_fixed(ScenarioSpec spec);
  static ScenarioSource from_clertant(double phi);
  static ScenarioSource from_paoletti(double phi, PaolettiParams params);

  ScenarioSpec realize(std::size_t num_doses, Philox4x32& rng) const;
};

struct OperatingCharacteristics {
  std::vector<double> selection_freq;  // per dose
  double all_toxic_freq = 0.0;
  double not_found_freq = 0.0;
  std::vector<double> mean_patients;  // per dose
  double mean_total_n = 0.0;
  double pct_dlt = 0.0;  // 100 * total DLTs / total patients, pooled
  // Correct identification under two credits: the declared dose is the
  // scenario's closest-to-phi dose (or an all-toxic stop when the MTD lies
  // below the grid), and the weaker interval credit where the declared
  // dose's true rate falls inside the target interval.
  double correct_mtd_freq = 0.0;
  double selected_in_tti_freq = 0.0;
  int n_replicates = 0;
};

/// Monte Carlo operating characteristics. Replicate i draws from stream
/// (master_seed, i), so results do not depend on the parallelism degree.
OperatingCharacteristics run_batch(const ScenarioSource& source, const DesignConfig& design,
                                   const ModelSpec& model, const BivariatePrior& prior,
                                   int n_reps, std::uint64_t master_seed, int parallelism,
                                   const QuadratureConfig& quad = {},
                                   const PosteriorEngine* shared_engine = nullptr);

}  // namespace blrm
