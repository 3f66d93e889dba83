#include "blrm/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "blrm/normal.hpp"
#include "blrm/posterior.hpp"

namespace blrm {

namespace {

// Acceptance can become arbitrarily rare when the Beta draw lands B just
// above phi (all rates squeezed below the target with the MTD not at the
// top), so the ceiling is redrawn after a block of failed attempts. The MTD
// position never changes, which keeps its marginal distribution uniform.
constexpr int kClertantAttemptsPerCeiling = 10000;
constexpr int kClertantCeilingRedraws = 100;

// Keeps probit recursions finite when a tail rate underflows.
double safe_quantile(double p) {
  constexpr double kFloor = 1e-300;
  constexpr double kCeil = 1.0 - 1e-16;
  return normal_quantile(std::clamp(p, kFloor, kCeil));
}

}  // namespace

std::string to_string(FixedShape shape) {
  switch (shape) {
    case FixedShape::Steep: return "steep";
    case FixedShape::SShaped: return "s_shaped";
    case FixedShape::Flat: return "flat";
  }
  return "steep";
}

FixedShape fixed_shape_from_string(const std::string& name) {
  if (name == "steep") return FixedShape::Steep;
  if (name == "s_shaped" || name == "sshaped" || name == "s-shaped") return FixedShape::SShaped;
  if (name == "flat") return FixedShape::Flat;
  throw std::invalid_argument("unknown fixed scenario shape: " + name);
}

double fixed_curve(FixedShape shape, double dose) {
  if (dose <= 0.0) throw std::domain_error("fixed_curve: dose must be positive");
  switch (shape) {
    case FixedShape::Steep:
      return 1.0 / (1.0 + std::exp(0.916 - 1.2 * std::log(dose / 100.0)));
    case FixedShape::SShaped:
      return 0.6 / (1.0 + std::exp(-0.02 * (dose - 225.0)));
    case FixedShape::Flat:
      return 1.0 / (1.0 + std::exp(-2.0 * std::log(dose / 700.0)));
  }
  throw std::domain_error("fixed_curve: unknown shape");
}

void ScenarioSpec::validate() const {
  double prev = 0.0;
  for (double r : rates) {
    if (!(r >= 0.0 && r <= 1.0)) throw std::invalid_argument("ScenarioSpec: rates must lie in [0,1]");
    if (r < prev) throw std::invalid_argument("ScenarioSpec: rates must be nondecreasing");
    prev = r;
  }
  if (mtd_index && (*mtd_index < 0 || static_cast<std::size_t>(*mtd_index) >= rates.size()))
    throw std::invalid_argument("ScenarioSpec: MTD index out of range");
}

void PaolettiParams::validate() const {
  if (!(sigma0 > 0.0 && sigma1 > 0.0 && sigma2 > 0.0))
    throw std::invalid_argument("PaolettiParams: sigmas must be positive");
}

ScenarioSpec gen_clertant(int num_doses, double phi, Philox4x32& rng) {
  if (num_doses < 2) throw std::invalid_argument("gen_clertant: need at least two doses");
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("gen_clertant: phi must lie in (0,1)");

  const int j = static_cast<int>(rng.uniform_below(num_doses));
  // Paper indexes doses 1..J, so J - j_one_based = num_doses - 1 - j.
  const double shape = std::max<double>(num_doses - 1 - j, 0.5);

  std::vector<double> rates(num_doses);
  for (int redraw = 0; redraw < kClertantCeilingRedraws; ++redraw) {
    const double upper = phi + (1.0 - phi) * rng.beta_one(shape);
    for (int attempt = 0; attempt < kClertantAttemptsPerCeiling; ++attempt) {
      for (double& r : rates) r = upper * rng.uniform();
      std::sort(rates.begin(), rates.end());
      const double dj = std::abs(rates[j] - phi);
      bool unique_closest = true;
      for (int k = 0; k < num_doses; ++k) {
        if (k != j && std::abs(rates[k] - phi) <= dj) {
          unique_closest = false;
          break;
        }
      }
      if (unique_closest) {
        ScenarioSpec spec{std::move(rates), j, "clertant"};
        spec.validate();
        return spec;
      }
    }
  }
  throw NumericalError("gen_clertant: rejection cap exceeded");
}

ScenarioSpec gen_clertant(int num_doses, double phi, std::uint64_t seed) {
  Philox4x32 rng(seed);
  return gen_clertant(num_doses, phi, rng);
}

ScenarioSpec gen_paoletti(int num_doses, double phi, const PaolettiParams& params,
                          Philox4x32& rng) {
  if (num_doses < 2) throw std::invalid_argument("gen_paoletti: need at least two doses");
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("gen_paoletti: phi must lie in (0,1)");
  params.validate();

  const int j = static_cast<int>(rng.uniform_below(num_doses));
  std::vector<double> rates(num_doses, 0.0);

  const double z_phi = normal_quantile(phi);
  rates[j] = normal_cdf(z_phi + params.sigma0 * rng.normal());

  const double z_j = safe_quantile(rates[j]);
  const double z_reflect = safe_quantile(std::clamp(2.0 * phi - rates[j], 1e-300, 1.0 - 1e-16));
  if (j > 0) {
    const double eps = params.mu1 + params.sigma1 * rng.normal();
    const double base = (z_j > z_phi) ? z_reflect : z_j;
    rates[j - 1] = normal_cdf(base - eps * eps);
  }
  if (j < num_doses - 1) {
    const double eps = params.mu2 + params.sigma2 * rng.normal();
    const double base = (z_j < z_phi) ? z_reflect : z_j;
    rates[j + 1] = normal_cdf(base + eps * eps);
  }
  for (int k = j - 2; k >= 0; --k) {
    const double eps = params.mu1 + params.sigma1 * rng.normal();
    rates[k] = normal_cdf(safe_quantile(rates[k + 1]) - eps * eps);
  }
  for (int k = j + 2; k < num_doses; ++k) {
    const double eps = params.mu2 + params.sigma2 * rng.normal();
    rates[k] = normal_cdf(safe_quantile(rates[k - 1]) + eps * eps);
  }

  ScenarioSpec spec{std::move(rates), j, "paoletti"};
  spec.validate();
  return spec;
}

ScenarioSpec gen_paoletti(int num_doses, double phi, const PaolettiParams& params,
                          std::uint64_t seed) {
  Philox4x32 rng(seed);
  return gen_paoletti(num_doses, phi, params, rng);
}

std::optional<int> true_mtd(const std::vector<double>& rates, double phi,
                            const ToxicityIntervals& intervals) {
  if (rates.empty()) return std::nullopt;
  bool all_over = true;
  for (double r : rates) {
    if (r <= intervals.upper) {
      all_over = false;
      break;
    }
  }
  if (all_over) return std::nullopt;
  int best = 0;
  for (int i = 1; i < static_cast<int>(rates.size()); ++i) {
    if (std::abs(rates[i] - phi) < std::abs(rates[best] - phi)) best = i;
  }
  return best;
}

ScenarioSpec fixed_scenario(FixedShape shape, const ModelSpec& model, double phi,
                            const ToxicityIntervals& intervals) {
  model.validate();
  ScenarioSpec spec;
  spec.rates.reserve(model.num_doses());
  for (double d : model.doses) spec.rates.push_back(fixed_curve(shape, d));
  spec.mtd_index = true_mtd(spec.rates, phi, intervals);
  spec.label = to_string(shape);
  spec.validate();
  return spec;
}

}  // namespace blrm
