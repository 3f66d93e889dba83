#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "blrm/linalg.hpp"

namespace blrm {

/// Provisional dose grid plus the reference dose d_R that anchors the
/// intercept of the dose-toxicity model.
struct ModelSpec {
  std::vector<double> doses;
  double reference_dose = 0.0;

  std::size_t num_doses() const { return doses.size(); }
  double log_ratio(std::size_t i) const { return std::log(doses[i] / reference_dose); }
  void validate() const;
};

/// Bivariate normal prior on (log alpha, log beta).
struct BivariatePrior {
  Vec2 mean;
  Mat2 covariance;

  void validate() const;
};

/// Cumulative per-dose patient and DLT counts.
struct TrialData {
  std::vector<int> patients;
  std::vector<int> dlts;

  explicit TrialData(std::size_t num_doses = 0)
      : patients(num_doses, 0), dlts(num_doses, 0) {}
  TrialData(std::vector<int> n, std::vector<int> y)
      : patients(std::move(n)), dlts(std::move(y)) {}

  std::size_t size() const { return patients.size(); }
  int total_patients() const;
  int total_dlts() const;
  void validate(std::size_t num_doses) const;
};

/// Partition of [0,1] into underdosing [0,a], target (a,b), overdosing [b,1],
/// with the target toxicity level phi inside the target interval.
struct ToxicityIntervals {
  double ttl = 0.25;
  double lower = 0.16;
  double upper = 0.33;

  void validate() const;
};

/// Posterior probabilities of each toxicity interval, one row per dose.
struct IntervalProbs {
  std::vector<double> under;
  std::vector<double> target;
  std::vector<double> over;

  std::size_t size() const { return under.size(); }
};

/// DLT probability at `dose` under parameters theta = (log alpha, log beta):
/// logit(p) = log alpha + beta * log(dose / d_R).
double dlt_prob(const Vec2& theta, double dose, double reference_dose);

inline double logit(double p) { return std::log(p / (1.0 - p)); }
inline double inverse_logit(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace blrm
