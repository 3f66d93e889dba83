#include "blrm/model.hpp"

#include <numeric>

namespace blrm {

void ModelSpec::validate() const {
  if (doses.size() < 2) throw std::invalid_argument("ModelSpec: need at least two doses");
  if (reference_dose <= 0.0) throw std::invalid_argument("ModelSpec: reference dose must be positive");
  double prev = 0.0;
  for (double d : doses) {
    if (d <= prev) throw std::invalid_argument("ModelSpec: doses must be positive and strictly increasing");
    prev = d;
  }
}

void BivariatePrior::validate() const {
  // Symmetric storage; positive definiteness <=> both eigenvalues positive.
  if (!covariance.positive_definite())
    throw std::invalid_argument("BivariatePrior: covariance must be positive definite");
}

int TrialData::total_patients() const {
  return std::accumulate(patients.begin(), patients.end(), 0);
}

int TrialData::total_dlts() const {
  return std::accumulate(dlts.begin(), dlts.end(), 0);
}

void TrialData::validate(std::size_t num_doses) const {
  if (patients.size() != num_doses || dlts.size() != num_doses)
    throw std::invalid_argument("TrialData: length must match the dose grid");
  for (std::size_t i = 0; i < patients.size(); ++i) {
    if (patients[i] < 0 || dlts[i] < 0 || dlts[i] > patients[i])
      throw std::invalid_argument("TrialData: need 0 <= DLTs <= patients at every dose");
  }
}

void ToxicityIntervals::validate() const {
  if (!(0.0 < lower && lower < ttl && ttl < upper && upper < 1.0))
    throw std::invalid_argument("ToxicityIntervals: need 0 < lower < ttl < upper < 1");
}

double dlt_prob(const Vec2& theta, double dose, double reference_dose) {
  if (dose <= 0.0 || reference_dose <= 0.0)
    throw std::domain_error("dlt_prob: dose and reference dose must be positive");
  const double eta = theta.x + std::exp(theta.y) * std::log(dose / reference_dose);
  return inverse_logit(eta);
}

}  // namespace blrm
