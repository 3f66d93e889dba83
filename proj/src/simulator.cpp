#include "blrm/simulator.hpp"

#include <atomic>
#include <sstream>
#include <thread>

namespace blrm {

TrialOutcome run_trial(const ScenarioSpec& scenario, const DesignConfig& design,
                       const PosteriorEngine& engine, Philox4x32& rng) {
  const ModelSpec& model = engine.model();
  const std::size_t K = model.num_doses();
  if (scenario.rates.size() != K)
    throw std::invalid_argument("run_trial: scenario length must match the dose grid");
  design.validate(K);

  TrialOutcome outcome;
  outcome.patients.assign(K, 0);
  outcome.dlts.assign(K, 0);

  TrialState state;
  state.data = TrialData(K);
  state.current_index = design.start_dose_index;

  for (;;) {
    int toxicities = 0;
    for (int c = 0; c < design.cohort_size; ++c) {
      if (rng.bernoulli(scenario.rates[state.current_index])) ++toxicities;
    }
    state.data.patients[state.current_index] += design.cohort_size;
    state.data.dlts[state.current_index] += toxicities;

    Decision decision;
    try {
      const IntervalProbs& probs = engine.probs(state.data);
      decision = next_action(probs, state, design, model);
    } catch (const NumericalError& err) {
      std::ostringstream msg;
      msg << err.what() << " [trial trace: n = (";
      for (std::size_t i = 0; i < K; ++i) msg << (i ? "," : "") << state.data.patients[i];
      msg << "), dlt = (";
      for (std::size_t i = 0; i < K; ++i) msg << (i ? "," : "") << state.data.dlts[i];
      msg << "), current dose index " << state.current_index << ", " << outcome.trace.size() + 1
          << " cohorts]";
      throw NumericalError(msg.str());
    }
    outcome.trace.push_back(decision);

    if (decision.action == Action::StopAllToxic) {
      outcome.terminal = TrialOutcome::Terminal::AllToxic;
      break;
    }
    if (decision.action == Action::DeclareMTD) {
      outcome.terminal = TrialOutcome::Terminal::DeclaredMTD;
      outcome.mtd_index = decision.target_index;
      break;
    }
    if (decision.action == Action::StopMaxN) {
      outcome.terminal = TrialOutcome::Terminal::NotFound;
      break;
    }
    state.current_index = decision.target_index;
  }

  outcome.patients = state.data.patients;
  outcome.dlts = state.data.dlts;
  outcome.total_patients = state.data.total_patients();
  outcome.total_dlts = state.data.total_dlts();
  return outcome;
}

TrialOutcome run_trial(const ScenarioSpec& scenario, const DesignConfig& design,
                       const ModelSpec& model, const BivariatePrior& prior,
                       std::uint64_t seed, const QuadratureConfig& quad) {
  PosteriorEngine engine(model, prior, design.intervals, quad);
  Philox4x32 rng(seed);
  return run_trial(scenario, design, engine, rng);
}

ScenarioSource ScenarioSource::from_fixed(ScenarioSpec spec) {
  ScenarioSource source;
  source.kind = Kind::Fixed;
  source.fixed = std::move(spec);
  return source;
}

ScenarioSource ScenarioSource::from_clertant(double phi) {
  ScenarioSource source;
  source.kind = Kind::Clertant;
  source.phi = phi;
  return source;
}

ScenarioSource ScenarioSource::from_paoletti(double phi, PaolettiParams params) {
  ScenarioSource source;
  source.kind = Kind::Paoletti;
  source.phi = phi;
  source.paoletti = params;
  return source;
}

ScenarioSpec ScenarioSource::realize(std::size_t num_doses, Philox4x32& rng) const {
  switch (kind) {
    case Kind::Fixed:
      return fixed;
    case Kind::Clertant:
      return gen_clertant(static_cast<int>(num_doses), phi, rng);
    case Kind::Paoletti:
      return gen_paoletti(static_cast<int>(num_doses), phi, paoletti, rng);
  }
  throw std::logic_error("ScenarioSource: unknown kind");
}

namespace {

struct ReplicateResult {
  TrialOutcome::Terminal terminal = TrialOutcome::Terminal::NotFound;
  int selected = -1;
  bool correct = false;
  bool selected_in_tti = false;
  std::vector<int> patients;
  std::vector<int> dlts;
};

}  // namespace

OperatingCharacteristics run_batch(const ScenarioSource& source, const DesignConfig& design,
                                   const ModelSpec& model, const BivariatePrior& prior,
                                   int n_reps, std::uint64_t master_seed, int parallelism,
                                   const QuadratureConfig& quad,
                                   const PosteriorEngine* shared_engine) {
  if (n_reps < 1) throw std::invalid_argument("run_batch: need at least one replicate");
  const std::size_t K = model.num_doses();
  design.validate(K);

  std::unique_ptr<PosteriorEngine> local_engine;
  if (shared_engine == nullptr) {
    local_engine = std::make_unique<PosteriorEngine>(model, prior, design.intervals, quad);
    shared_engine = local_engine.get();
  }
  const PosteriorEngine& engine = *shared_engine;

  std::vector<ReplicateResult> results(n_reps);
  std::vector<std::string> failures(n_reps);

  auto run_replicate = [&](int i) {
    Philox4x32 rng(master_seed, static_cast<std::uint64_t>(i));
    const ScenarioSpec scenario = source.realize(K, rng);
    const TrialOutcome outcome = run_trial(scenario, design, engine, rng);
    ReplicateResult& r = results[i];
    r.terminal = outcome.terminal;
    r.selected = outcome.mtd_index;
    r.patients = outcome.patients;
    r.dlts = outcome.dlts;
    if (scenario.mtd_index.has_value()) {
      r.correct = outcome.terminal == TrialOutcome::Terminal::DeclaredMTD &&
                  outcome.mtd_index == *scenario.mtd_index;
    } else {
      // An MTD below the grid counts as correctly identified by an all-toxic stop.
      r.correct = outcome.terminal == TrialOutcome::Terminal::AllToxic;
    }
    if (outcome.terminal == TrialOutcome::Terminal::DeclaredMTD) {
      const double rate = scenario.rates[outcome.mtd_index];
      r.selected_in_tti =
          rate > design.intervals.lower && rate < design.intervals.upper;
    }
  };

  const int workers = std::max(1, std::min(parallelism, n_reps));
  if (workers == 1) {
    for (int i = 0; i < n_reps; ++i) {
      try {
        run_replicate(i);
      } catch (const NumericalError& err) {
        std::ostringstream msg;
        msg << "run_batch: replicate " << i << " (master seed " << master_seed
            << ") failed: " << err.what();
        throw NumericalError(msg.str());
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= n_reps) return;
          try {
            run_replicate(i);
          } catch (const std::exception& err) {
            failures[i] = err.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (int i = 0; i < n_reps; ++i) {
      if (!failures[i].empty()) {
        std::ostringstream msg;
        msg << "run_batch: replicate " << i << " (master seed " << master_seed
            << ") failed: " << failures[i];
        throw NumericalError(msg.str());
      }
    }
  }

  OperatingCharacteristics oc;
  oc.selection_freq.assign(K, 0.0);
  oc.mean_patients.assign(K, 0.0);
  oc.n_replicates = n_reps;
  long long total_n = 0;
  long long total_dlt = 0;
  for (const ReplicateResult& r : results) {
    switch (r.terminal) {
      case TrialOutcome::Terminal::AllToxic: oc.all_toxic_freq += 1.0; break;
      case TrialOutcome::Terminal::NotFound: oc.not_found_freq += 1.0; break;
      case TrialOutcome::Terminal::DeclaredMTD: oc.selection_freq[r.selected] += 1.0; break;
    }
    if (r.correct) oc.correct_mtd_freq += 1.0;
    if (r.selected_in_tti) oc.selected_in_tti_freq += 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      oc.mean_patients[k] += r.patients[k];
      total_n += r.patients[k];
      total_dlt += r.dlts[k];
    }
  }
  for (std::size_t k = 0; k < K; ++k) {
    oc.selection_freq[k] /= n_reps;
    oc.mean_patients[k] /= n_reps;
    oc.mean_total_n += oc.mean_patients[k];
  }
  oc.all_toxic_freq /= n_reps;
  oc.not_found_freq /= n_reps;
  oc.correct_mtd_freq /= n_reps;
  oc.selected_in_tti_freq /= n_reps;
  oc.pct_dlt = total_n > 0 ? 100.0 * static_cast<double>(total_dlt) / static_cast<double>(total_n) : 0.0;
  return oc;
}

}  // namespace blrm
