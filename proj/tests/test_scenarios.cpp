#include <doctest.h>

#include <cmath>

#include "blrm/normal.hpp"
#include "blrm/posterior.hpp"
#include "blrm/scenarios.hpp"
#include "test_support.hpp"

using namespace blrm;
using namespace blrm_test;

namespace {

// DLT rates printed for the three fixed shapes at the provisional doses.
const double kDoses[7] = {10, 25, 50, 100, 200, 400, 800};
const double kSteep[7] = {0.025, 0.070, 0.148, 0.286, 0.479, 0.679, 0.829};
const double kSShaped[7] = {0.008, 0.011, 0.018, 0.046, 0.227, 0.582, 0.600};
const double kFlat[7] = {0.000, 0.001, 0.005, 0.020, 0.076, 0.246, 0.566};

}  // namespace

TEST_CASE("fixed curves reproduce every tabulated rate within 0.001") {
  for (int i = 0; i < 7; ++i) {
    CHECK(std::abs(fixed_curve(FixedShape::Steep, kDoses[i]) - kSteep[i]) < 0.001);
    CHECK(std::abs(fixed_curve(FixedShape::SShaped, kDoses[i]) - kSShaped[i]) < 0.001);
    CHECK(std::abs(fixed_curve(FixedShape::Flat, kDoses[i]) - kFlat[i]) < 0.001);
  }
}

TEST_CASE("fixed curve rejects non-positive doses") {
  CHECK_THROWS_AS((void)fixed_curve(FixedShape::Steep, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)fixed_curve(FixedShape::Flat, -5.0), std::domain_error);
}

TEST_CASE("true MTD picks the rate closest to phi") {
  const ToxicityIntervals tti = wide_tti();
  CHECK(true_mtd(std::vector<double>(kSteep, kSteep + 7), 0.25, tti) == 3);
  CHECK(true_mtd(std::vector<double>(kFlat, kFlat + 7), 0.25, tti) == 5);
  CHECK(true_mtd(std::vector<double>(kSShaped, kSShaped + 7), 0.25, tti) == 4);
  CHECK_FALSE(true_mtd({0.9, 0.9, 0.9}, 0.25, tti).has_value());
  // Ties break toward the lower dose.
  CHECK(true_mtd({0.20, 0.30, 0.65}, 0.25, tti) == 0);
}

TEST_CASE("fixed scenarios carry the bolded MTD") {
  const ModelSpec model = paper_model();
  CHECK(fixed_scenario(FixedShape::Steep, model, 0.25, wide_tti()).mtd_index == 3);
  CHECK(fixed_scenario(FixedShape::SShaped, model, 0.25, wide_tti()).mtd_index == 4);
  CHECK(fixed_scenario(FixedShape::Flat, model, 0.25, wide_tti()).mtd_index == 5);
  CHECK(fixed_scenario(FixedShape::Steep, model, 0.25, narrow_tti()).mtd_index == 3);
}

TEST_CASE("clertant scenarios satisfy their construction") {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const ScenarioSpec spec = gen_clertant(7, 0.25, seed);
    REQUIRE(spec.rates.size() == 7);
    REQUIRE(spec.mtd_index.has_value());
    CHECK_NOTHROW(spec.validate());
    const int j = *spec.mtd_index;
    const double dj = std::abs(spec.rates[j] - 0.25);
    for (int k = 0; k < 7; ++k) {
      CHECK(spec.rates[k] >= 0.0);
      CHECK(spec.rates[k] <= 1.0);
      if (k != j) CHECK(std::abs(spec.rates[k] - 0.25) > dj);
    }
  }
}

TEST_CASE("clertant handles two doses") {
  const ScenarioSpec spec = gen_clertant(2, 0.25, 11);
  REQUIRE(spec.rates.size() == 2);
  REQUIRE(spec.mtd_index.has_value());
  CHECK(spec.rates[0] <= spec.rates[1]);
}

TEST_CASE("clertant MTD position is uniform (chi-squared at 10k draws)") {
  int counts[7] = {0};
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    ++counts[*gen_clertant(7, 0.25, seed).mtd_index];
  }
  const double expected = 10000.0 / 7.0;
  double chi2 = 0.0;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 0.99 quantile of chi-squared with 6 degrees of freedom.
  CHECK(chi2 < 16.812);
}

TEST_CASE("clertant is reproducible") {
  const ScenarioSpec a = gen_clertant(7, 0.25, 123);
  const ScenarioSpec b = gen_clertant(7, 0.25, 123);
  CHECK(a.rates == b.rates);
  CHECK(a.mtd_index == b.mtd_index);
}

TEST_CASE("paoletti scenarios satisfy their construction") {
  const PaolettiParams params;
  bool saw_bottom = false, saw_top = false;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const ScenarioSpec spec = gen_paoletti(7, 0.25, params, seed);
    REQUIRE(spec.rates.size() == 7);
    REQUIRE(spec.mtd_index.has_value());
    CHECK_NOTHROW(spec.validate());
    const int j = *spec.mtd_index;
    saw_bottom = saw_bottom || j == 0;
    saw_top = saw_top || j == 6;
    const double dj = std::abs(spec.rates[j] - 0.25);
    for (int k = 0; k < 7; ++k) {
      if (k != j) CHECK(std::abs(spec.rates[k] - 0.25) >= dj);
    }
    for (int k = 1; k < 7; ++k) CHECK(spec.rates[k] >= spec.rates[k - 1]);
  }
  CHECK(saw_bottom);
  CHECK(saw_top);
}

TEST_CASE("paoletti at the boundary runs upward only") {
  const PaolettiParams params;
  for (std::uint64_t seed = 0; seed < 5000; ++seed) {
    const ScenarioSpec spec = gen_paoletti(7, 0.25, params, seed);
    if (*spec.mtd_index == 0) {
      for (int k = 1; k < 7; ++k) CHECK(spec.rates[k] >= spec.rates[0]);
      return;
    }
  }
  FAIL("no scenario with the lowest dose as MTD in 5000 draws");
}

TEST_CASE("paoletti MTD rate matches a direct Monte Carlo of its defining draw") {
  const PaolettiParams params;
  double mean_rate = 0.0;
  const int n = 10000;
  for (std::uint64_t seed = 0; seed < n; ++seed) {
    const ScenarioSpec spec = gen_paoletti(7, 0.25, params, seed);
    mean_rate += spec.rates[*spec.mtd_index];
  }
  mean_rate /= n;

  Philox4x32 rng(4242);
  double mc = 0.0;
  const int m = 1000000;
  const double z_phi = normal_quantile(0.25);
  for (int s = 0; s < m; ++s) mc += normal_cdf(z_phi + params.sigma0 * rng.normal());
  mc /= m;
  CHECK(std::abs(mean_rate - mc) < 0.01);
}

TEST_CASE("paoletti is reproducible") {
  const PaolettiParams params;
  const ScenarioSpec a = gen_paoletti(7, 0.25, params, 99);
  const ScenarioSpec b = gen_paoletti(7, 0.25, params, 99);
  CHECK(a.rates == b.rates);
  CHECK(a.mtd_index == b.mtd_index);
}

TEST_CASE("generator argument validation") {
  CHECK_THROWS_AS((void)gen_clertant(1, 0.25, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)gen_clertant(7, 1.5, 1), std::invalid_argument);
  PaolettiParams bad;
  bad.sigma1 = 0.0;
  CHECK_THROWS_AS((void)gen_paoletti(7, 0.25, bad, 1), std::invalid_argument);
}

TEST_CASE("scenario validation catches bad specs") {
  ScenarioSpec decreasing{{0.3, 0.2, 0.5}, 1, "x"};
  CHECK_THROWS_AS(decreasing.validate(), std::invalid_argument);
  ScenarioSpec out_of_range{{0.1, 1.2}, 0, "x"};
  CHECK_THROWS_AS(out_of_range.validate(), std::invalid_argument);
}
