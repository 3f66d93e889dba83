#pragma once

#include <string>

#include "blrm/model.hpp"

namespace blrm {

enum class DesignVariant { Original, Design1, Design2, Design3, Design4 };

std::string to_string(DesignVariant variant);
DesignVariant design_variant_from_string(const std::string& name);

/// All knobs of a single design: the interval partition, the variant and its
/// add-on parameters, plus the trial-conduct rules.
struct DesignConfig {
  ToxicityIntervals intervals;
  DesignVariant variant = DesignVariant::Original;
  double overdose_bound = 0.3;
  double feasibility_bound = 0.25;  // Designs 1 and 3
  double g_exponent = 1.0;          // Designs 2 and 4: g(r) = r^exponent
  int mtd_min_patients = 6;
  double mtd_target_prob_threshold = 0.5;
  int max_sample_size = 45;
  int cohort_size = 3;
  int start_dose_index = 0;

  void validate(std::size_t num_doses) const;
};

enum class Action { Escalate, Stay, Deescalate, StopAllToxic, DeclareMTD, StopMaxN };

std::string to_string(Action action);

struct Decision {
  Action action = Action::Stay;
  int target_index = -1;  // dose index for Escalate/Stay/Deescalate/DeclareMTD
  bool addon_triggered = false;

  bool terminal() const {
    return action == Action::StopAllToxic || action == Action::DeclareMTD ||
           action == Action::StopMaxN;
  }
};

/// Unit probability mass of the underdosing interval [0, a].
double upm_under(double p_under, double a);

/// Unit probability mass of the overdosing interval [b, 1].
double upm_over(double p_over, double b);

/// Escalation trigger of Designs 1-4. Must not be called for the Original
/// variant or at the highest dose.
bool addon_rule(DesignVariant variant, const IntervalProbs& probs, int current_index,
                const ModelSpec& model, const DesignConfig& config);

/// Original BLRM recommendation: the admissible dose (overdose probability
/// within the bound, no skipping upward) with the highest target probability.
Decision recommend_original(const IntervalProbs& probs, int current_index,
                            const DesignConfig& config);

/// MTD declaration test for a dose the model recommends staying at.
bool check_mtd_declaration(const IntervalProbs& probs, int proposed_stay_index,
                           int n_at_dose, const DesignConfig& config);

struct TrialState {
  TrialData data;
  int current_index = 0;
};

/// One per-cohort decision. Evaluation order: all-toxic stop, MTD declaration
/// (against the original recommendation), add-on escalation, original
/// recommendation, maximum-sample-size stop.
Decision next_action(const IntervalProbs& probs, const TrialState& state,
                     const DesignConfig& config, const ModelSpec& model);

}  // namespace blrm
