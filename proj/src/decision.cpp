#include "blrm/decision.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace blrm {

std::string to_string(DesignVariant variant) {
  switch (variant) {
    case DesignVariant::Original: return "original";
    case DesignVariant::Design1: return "d1";
    case DesignVariant::Design2: return "d2";
    case DesignVariant::Design3: return "d3";
    case DesignVariant::Design4: return "d4";
  }
  return "original";
}

DesignVariant design_variant_from_string(const std::string& name) {
  if (name == "original") return DesignVariant::Original;
  if (name == "d1" || name == "design1") return DesignVariant::Design1;
  if (name == "d2" || name == "design2") return DesignVariant::Design2;
  if (name == "d3" || name == "design3") return DesignVariant::Design3;
  if (name == "d4" || name == "design4") return DesignVariant::Design4;
  throw std::invalid_argument("unknown design variant: " + name);
}

std::string to_string(Action action) {
  switch (action) {
    case Action::Escalate: return "escalate";
    case Action::Stay: return "stay";
    case Action::Deescalate: return "deescalate";
    case Action::StopAllToxic: return "stop_all_toxic";
    case Action::DeclareMTD: return "declare_mtd";
    case Action::StopMaxN: return "stop_max_n";
  }
  return "stay";
}

void DesignConfig::validate(std::size_t num_doses) const {
  intervals.validate();
  if (!(overdose_bound > 0.0 && overdose_bound < 1.0))
    throw std::invalid_argument("DesignConfig: overdose bound must lie in (0,1)");
  if (!(feasibility_bound > 0.0 && feasibility_bound < 0.5))
    throw std::invalid_argument("DesignConfig: feasibility bound must lie in (0, 0.5)");
  if (!(g_exponent > 0.0))
    throw std::invalid_argument("DesignConfig: g exponent must be positive");
  if (mtd_min_patients < 1) throw std::invalid_argument("DesignConfig: mtd_min_patients must be >= 1");
  if (!(mtd_target_prob_threshold > 0.0 && mtd_target_prob_threshold < 1.0))
    throw std::invalid_argument("DesignConfig: MTD target-probability threshold must lie in (0,1)");
  if (cohort_size < 1) throw std::invalid_argument("DesignConfig: cohort size must be >= 1");
  if (max_sample_size < cohort_size)
    throw std::invalid_argument("DesignConfig: max sample size must fit at least one cohort");
  if (start_dose_index < 0 || static_cast<std::size_t>(start_dose_index) >= num_doses)
    throw std::invalid_argument("DesignConfig: start dose index out of range");
}

double upm_under(double p_under, double a) {
  if (!(a > 0.0 && a < 1.0)) throw std::domain_error("upm_under: a must lie in (0,1)");
  return p_under / a;
}

double upm_over(double p_over, double b) {
  if (!(b > 0.0 && b < 1.0)) throw std::domain_error("upm_over: b must lie in (0,1)");
  return p_over / (1.0 - b);
}

bool addon_rule(DesignVariant variant, const IntervalProbs& probs, int current_index,
                const ModelSpec& model, const DesignConfig& config) {
  if (variant == DesignVariant::Original)
    throw std::logic_error("addon_rule: the original design has no add-on rule");
  if (current_index < 0 || static_cast<std::size_t>(current_index) + 1 >= model.num_doses())
    throw std::logic_error("addon_rule: never assessed at the highest dose");

  const int i = current_index;
  const double af = config.feasibility_bound;
  const double a = config.intervals.lower;
  const double b = config.intervals.upper;
  const double ratio = model.doses[i + 1] / model.doses[i];
  const double g = std::pow(ratio, config.g_exponent);

  switch (variant) {
    case DesignVariant::Design1:
      return af * probs.under[i] > (1.0 - af) * probs.over[i];
    case DesignVariant::Design2:
      return probs.under[i] > g * probs.over[i + 1];
    case DesignVariant::Design3:
      return af * upm_under(probs.under[i], a) > (1.0 - af) * upm_over(probs.over[i], b);
    case DesignVariant::Design4:
      return upm_under(probs.under[i], a) > g * upm_over(probs.over[i + 1], b);
    case DesignVariant::Original:
      break;
  }
  return false;
}

Decision recommend_original(const IntervalProbs& probs, int current_index,
                            const DesignConfig& config) {
  const int num_doses = static_cast<int>(probs.size());
  const int limit = std::min(current_index + 1, num_doses - 1);
  int best = -1;
  for (int i = 0; i <= limit; ++i) {
    if (probs.over[i] > config.overdose_bound) continue;
    if (best < 0 || probs.target[i] > probs.target[best]) best = i;  // ties keep the lower dose
  }
  if (best < 0) return {Action::StopAllToxic, -1, false};
  if (best > current_index) return {Action::Escalate, best, false};
  if (best == current_index) return {Action::Stay, best, false};
  return {Action::Deescalate, best, false};
}

bool check_mtd_declaration(const IntervalProbs& probs, int proposed_stay_index,
                           int n_at_dose, const DesignConfig& config) {
  return n_at_dose >= config.mtd_min_patients &&
         probs.target[proposed_stay_index] >= config.mtd_target_prob_threshold;
}

Decision next_action(const IntervalProbs& probs, const TrialState& state,
                     const DesignConfig& config, const ModelSpec& model) {
  const int cur = state.current_index;
  const int num_doses = static_cast<int>(probs.size());

  bool all_toxic = true;
  for (int i = 0; i < num_doses; ++i) {
    if (probs.over[i] <= config.overdose_bound) {
      all_toxic = false;
      break;
    }
  }
  if (all_toxic) return {Action::StopAllToxic, -1, false};

  const Decision original = recommend_original(probs, cur, config);
  if (original.action == Action::StopAllToxic) return original;

  if (original.action == Action::Stay &&
      check_mtd_declaration(probs, cur, state.data.patients[cur], config)) {
    return {Action::DeclareMTD, cur, false};
  }

  Decision decision = original;
  if (config.variant != DesignVariant::Original && cur + 1 < num_doses &&
      addon_rule(config.variant, probs, cur, model, config)) {
    decision = {Action::Escalate, cur + 1, true};
  }

  if (state.data.total_patients() >= config.max_sample_size) {
    return {Action::StopMaxN, -1, decision.addon_triggered};
  }
  return decision;
}

}  // namespace blrm
