#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "blrm/model.hpp"
#include "blrm/rng.hpp"

namespace blrm {

enum class FixedShape { Steep, SShaped, Flat };

std::string to_string(FixedShape shape);
FixedShape fixed_shape_from_string(const std::string& name);

/// True DLT rate of one of the three parametric curves at `dose` (mg).
double fixed_curve(FixedShape shape, double dose);

/// A true dose-toxicity curve. mtd_index empty means the MTD lies below the
/// lowest provisional dose.
struct ScenarioSpec {
  std::vector<double> rates;
  std::optional<int> mtd_index;
  std::string label;

  void validate() const;
};

struct PaolettiParams {
  double sigma0 = 0.1;
  double mu1 = 0.2;
  double sigma1 = 0.3;
  double mu2 = 0.2;
  double sigma2 = 0.4;

  void validate() const;
};

/// Pseudo-uniform generator: uniform MTD position, rates rejection-sampled
/// from U(0, B) with B = phi + (1-phi) * Beta(max{J-j, 0.5}, 1).
ScenarioSpec gen_clertant(int num_doses, double phi, Philox4x32& rng);
ScenarioSpec gen_clertant(int num_doses, double phi, std::uint64_t seed);

/// Probit-perturbation generator of Paoletti and colleagues: the MTD rate is
/// drawn around phi and neighbours recurse outward with squared-normal steps.
ScenarioSpec gen_paoletti(int num_doses, double phi, const PaolettiParams& params,
                          Philox4x32& rng);
ScenarioSpec gen_paoletti(int num_doses, double phi, const PaolettiParams& params,
                          std::uint64_t seed);

/// Index of the dose whose rate is closest to phi (ties toward the lower
/// dose); empty when every rate is above the overdosing boundary.
std::optional<int> true_mtd(const std::vector<double>& rates, double phi,
                            const ToxicityIntervals& intervals);

/// Rates of a fixed shape evaluated on the model's dose grid.
ScenarioSpec fixed_scenario(FixedShape shape, const ModelSpec& model, double phi,
                            const ToxicityIntervals& intervals);

}  // namespace blrm
