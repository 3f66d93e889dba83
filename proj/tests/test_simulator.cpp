#include <doctest.h>

#include <cmath>
#include <cstring>

#include "blrm/simulator.hpp"
#include "test_support.hpp"

using namespace blrm;
using namespace blrm_test;

namespace {

const ModelSpec kModel = paper_model();
const BivariatePrior kPrior = paper_prior();

DesignConfig design(DesignVariant v = DesignVariant::Original) {
  DesignConfig config;
  config.intervals = wide_tti();
  config.variant = v;
  return config;
}

ScenarioSpec flat_rate_scenario(double rate) {
  ScenarioSpec spec;
  spec.rates.assign(7, rate);
  spec.mtd_index = true_mtd(spec.rates, 0.25, wide_tti());
  spec.label = "flat-rate";
  return spec;
}

bool same_oc(const OperatingCharacteristics& a, const OperatingCharacteristics& b) {
  return a.selection_freq == b.selection_freq && a.mean_patients == b.mean_patients &&
         a.all_toxic_freq == b.all_toxic_freq && a.not_found_freq == b.not_found_freq &&
         a.mean_total_n == b.mean_total_n && a.pct_dlt == b.pct_dlt &&
         a.correct_mtd_freq == b.correct_mtd_freq &&
         a.selected_in_tti_freq == b.selected_in_tti_freq && a.n_replicates == b.n_replicates;
}

}  // namespace

TEST_CASE("a uniformly lethal scenario stops for toxicity almost always") {
  PosteriorEngine engine(kModel, kPrior, wide_tti());
  const ScenarioSpec scenario = flat_rate_scenario(0.9);
  int all_toxic = 0;
  double mean_n = 0.0;
  for (int seed = 0; seed < 200; ++seed) {
    Philox4x32 rng(9000, seed);
    const TrialOutcome outcome = run_trial(scenario, design(), engine, rng);
    if (outcome.terminal == TrialOutcome::Terminal::AllToxic) ++all_toxic;
    mean_n += outcome.total_patients;
  }
  mean_n /= 200;
  CHECK(all_toxic >= 190);
  CHECK(mean_n < 9.0);
}

TEST_CASE("a zero-toxicity scenario never stops for toxicity and sees no DLTs") {
  PosteriorEngine engine(kModel, kPrior, wide_tti());
  const ScenarioSpec scenario = flat_rate_scenario(0.0);
  for (int seed = 0; seed < 20; ++seed) {
    Philox4x32 rng(9100, seed);
    const TrialOutcome outcome = run_trial(scenario, design(), engine, rng);
    CHECK(outcome.terminal != TrialOutcome::Terminal::AllToxic);
    CHECK(outcome.total_dlts == 0);
  }
}

TEST_CASE("run_trial is deterministic for a fixed stream") {
  PosteriorEngine engine(kModel, kPrior, wide_tti());
  const ScenarioSpec scenario = fixed_scenario(FixedShape::SShaped, kModel, 0.25, wide_tti());
  Philox4x32 r1(77, 3), r2(77, 3);
  const TrialOutcome a = run_trial(scenario, design(DesignVariant::Design1), engine, r1);
  const TrialOutcome b = run_trial(scenario, design(DesignVariant::Design1), engine, r2);
  CHECK(a.terminal == b.terminal);
  CHECK(a.mtd_index == b.mtd_index);
  CHECK(a.patients == b.patients);
  CHECK(a.dlts == b.dlts);
  CHECK(a.trace.size() == b.trace.size());
}

TEST_CASE("trial accounting invariants hold across designs and seeds") {
  PosteriorEngine engine(kModel, kPrior, wide_tti());
  const ScenarioSpec scenario = fixed_scenario(FixedShape::Steep, kModel, 0.25, wide_tti());
  for (DesignVariant v : {DesignVariant::Original, DesignVariant::Design2, DesignVariant::Design4}) {
    const DesignConfig config = design(v);
    for (int seed = 0; seed < 40; ++seed) {
      Philox4x32 rng(4000, seed);
      const TrialOutcome outcome = run_trial(scenario, config, engine, rng);
      CHECK(outcome.total_patients <= config.max_sample_size);
      CHECK(outcome.total_patients % config.cohort_size == 0);
      int sum_n = 0, sum_y = 0;
      for (int i = 0; i < 7; ++i) {
        sum_n += outcome.patients[i];
        sum_y += outcome.dlts[i];
        CHECK(outcome.dlts[i] <= outcome.patients[i]);
      }
      CHECK(sum_n == outcome.total_patients);
      CHECK(sum_y == outcome.total_dlts);
      if (outcome.terminal == TrialOutcome::Terminal::DeclaredMTD) {
        CHECK(outcome.patients[outcome.mtd_index] >= config.mtd_min_patients);
      }
      // No upward skips along the decision trace.
      int cur = config.start_dose_index;
      for (const Decision& d : outcome.trace) {
        if (d.action == Action::Escalate) {
          CHECK(d.target_index == cur + 1);
          cur = d.target_index;
        } else if (d.action == Action::Stay || d.action == Action::Deescalate) {
          CHECK(d.target_index <= cur + 1);
          cur = d.target_index;
        }
      }
    }
  }
}

TEST_CASE("single-replicate batch equals the replicate itself") {
  const ScenarioSpec scenario = fixed_scenario(FixedShape::SShaped, kModel, 0.25, wide_tti());
  const auto source = ScenarioSource::from_fixed(scenario);
  const OperatingCharacteristics oc =
      run_batch(source, design(), kModel, kPrior, 1, 321, 1);

  PosteriorEngine engine(kModel, kPrior, wide_tti());
  Philox4x32 rng(321, 0);
  const TrialOutcome outcome = run_trial(scenario, design(), engine, rng);

  CHECK(oc.n_replicates == 1);
  CHECK(oc.mean_total_n == outcome.total_patients);
  for (int i = 0; i < 7; ++i) {
    CHECK(oc.mean_patients[i] == outcome.patients[i]);
    CHECK(oc.selection_freq[i] ==
          ((outcome.terminal == TrialOutcome::Terminal::DeclaredMTD && outcome.mtd_index == i)
               ? 1.0 : 0.0));
  }
}

TEST_CASE("parallel batches reproduce the sequential result bit for bit") {
  const auto source =
      ScenarioSource::from_fixed(fixed_scenario(FixedShape::SShaped, kModel, 0.25, wide_tti()));
  const OperatingCharacteristics seq =
      run_batch(source, design(DesignVariant::Design1), kModel, kPrior, 64, 2718, 1);
  const OperatingCharacteristics par =
      run_batch(source, design(DesignVariant::Design1), kModel, kPrior, 64, 2718, 8);
  CHECK(same_oc(seq, par));
}

TEST_CASE("random-scenario batches are deterministic and accounted") {
  const auto source = ScenarioSource::from_clertant(0.25);
  const OperatingCharacteristics a =
      run_batch(source, design(), kModel, kPrior, 40, 1111, 4);
  const OperatingCharacteristics b =
      run_batch(source, design(), kModel, kPrior, 40, 1111, 2);
  CHECK(same_oc(a, b));
  CHECK(a.correct_mtd_freq >= 0.0);
  CHECK(a.correct_mtd_freq <= 1.0);
}

TEST_CASE("batch frequencies partition and patients sum") {
  const auto source =
      ScenarioSource::from_fixed(fixed_scenario(FixedShape::Flat, kModel, 0.25, wide_tti()));
  const OperatingCharacteristics oc =
      run_batch(source, design(DesignVariant::Design3), kModel, kPrior, 80, 555, 8);
  double total_freq = oc.all_toxic_freq + oc.not_found_freq;
  double total_n = 0.0;
  for (int i = 0; i < 7; ++i) {
    total_freq += oc.selection_freq[i];
    total_n += oc.mean_patients[i];
  }
  CHECK(std::abs(total_freq - 1.0) < 1e-9);
  CHECK(std::abs(total_n - oc.mean_total_n) < 1e-9);
  CHECK(oc.mean_total_n <= 45.0);
  CHECK(oc.pct_dlt >= 0.0);
  CHECK(oc.pct_dlt <= 100.0);
}

TEST_CASE("shared engines do not change results") {
  const auto source =
      ScenarioSource::from_fixed(fixed_scenario(FixedShape::SShaped, kModel, 0.25, wide_tti()));
  PosteriorEngine shared(kModel, kPrior, wide_tti());
  const OperatingCharacteristics with_shared = run_batch(
      source, design(DesignVariant::Design2), kModel, kPrior, 32, 42, 4, {}, &shared);
  const OperatingCharacteristics standalone =
      run_batch(source, design(DesignVariant::Design2), kModel, kPrior, 32, 42, 4);
  CHECK(same_oc(with_shared, standalone));
  CHECK(shared.cache_size() > 0);
}

TEST_CASE("scenario length mismatches are rejected") {
  PosteriorEngine engine(kModel, kPrior, wide_tti());
  ScenarioSpec bad;
  bad.rates = {0.1, 0.2};
  Philox4x32 rng(1);
  CHECK_THROWS_AS((void)run_trial(bad, design(), engine, rng), std::invalid_argument);
}
