#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "blrm/config.hpp"
#include "blrm/report.hpp"

namespace {

using namespace blrm;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct CommonOverrides {
  std::string design;
  std::vector<double> tti;
  std::optional<double> phi;
  std::optional<double> overdose_bound;
  std::optional<double> alpha_f;
  std::optional<double> g_exponent;
  std::optional<int> reps;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string format = "markdown";
  std::string out;
};

void add_common(CLI::App* cmd, CommonOverrides& o) {
  cmd->add_option("--design", o.design, "design variant: original|d1|d2|d3|d4");
  cmd->add_option("--tti", o.tti, "target toxicity interval a,b")->delimiter(',')->expected(2);
  cmd->add_option("--phi", o.phi, "target toxicity level");
  cmd->add_option("--overdose-bound", o.overdose_bound, "overdose control bound c");
  cmd->add_option("--alpha-f", o.alpha_f, "feasibility bound (designs 1 and 3)");
  cmd->add_option("--g-exponent", o.g_exponent, "exponent of g(r) = r^e (designs 2 and 4)");
  cmd->add_option("--reps", o.reps, "number of replicates");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--threads", o.threads, "worker threads");
  cmd->add_option("--format", o.format, "output format: csv|markdown|json");
  cmd->add_option("--out", o.out, "write output to this path instead of stdout");
}

void apply_overrides(RunConfig& cfg, const CommonOverrides& o) {
  if (!o.design.empty()) {
    cfg.variants = {design_variant_from_string(o.design)};
    cfg.design.variant = cfg.variants.front();
  }
  if (!o.tti.empty()) {
    cfg.design.intervals.lower = o.tti[0];
    cfg.design.intervals.upper = o.tti[1];
  }
  if (o.phi) cfg.design.intervals.ttl = *o.phi;
  if (o.overdose_bound) cfg.design.overdose_bound = *o.overdose_bound;
  if (o.alpha_f) cfg.design.feasibility_bound = *o.alpha_f;
  if (o.g_exponent) cfg.design.g_exponent = *o.g_exponent;
  if (o.reps) cfg.simulation.n_reps = *o.reps;
  if (o.seed) cfg.simulation.master_seed = *o.seed;
  if (o.threads) cfg.simulation.parallelism = *o.threads;
  cfg.validate();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot write to " + out_path);
  out << text;
}

int cmd_recommend(const std::string& config_path, const std::string& data_path,
                  const CommonOverrides& o) {
  RunConfig cfg = RunConfig::from_file(config_path);
  apply_overrides(cfg, o);
  const CohortDataFile input = CohortDataFile::from_file(data_path, cfg.model.num_doses());

  const DesignConfig design = cfg.design_for(cfg.variants.front());
  design.validate(cfg.model.num_doses());
  const IntervalProbs probs = interval_probs(input.data, cfg.model, cfg.prior, design.intervals);
  const Decision decision =
      next_action(probs, TrialState{input.data, input.current_index}, design, cfg.model);

  TableSpec spec{TableLayout::SingleFit, table_format_from_string(o.format)};
  std::ostringstream text;
  text << render_single_fit(probs, input.data, cfg.model, spec);
  text << decision_to_json(decision) << "\n";
  emit(text.str(), o.out);
  return kExitOk;
}

int cmd_simulate(const std::string& config_path, const CommonOverrides& o,
                 const std::string& dump_config_path) {
  RunConfig cfg = RunConfig::from_file(config_path);
  apply_overrides(cfg, o);
  if (!cfg.has_scenario) throw std::invalid_argument("simulate: config needs a scenario section");

  if (!dump_config_path.empty()) emit(cfg.to_json_text(), dump_config_path);

  // One shared fit cache: interval probabilities depend on the data only,
  // never on the design variant.
  PosteriorEngine engine(cfg.model, cfg.prior, cfg.design.intervals, QuadratureConfig{});

  std::vector<std::string> labels;
  std::vector<OperatingCharacteristics> ocs;
  for (DesignVariant v : cfg.variants) {
    const DesignConfig design = cfg.design_for(v);
    ocs.push_back(run_batch(cfg.scenario, design, cfg.model, cfg.prior, cfg.simulation.n_reps,
                            cfg.simulation.master_seed, cfg.simulation.parallelism,
                            QuadratureConfig{}, &engine));
    labels.push_back(to_string(v));
  }

  const TableFormat format = table_format_from_string(o.format);
  std::ostringstream text;
  if (cfg.scenario.kind == ScenarioSource::Kind::Fixed) {
    const std::optional<int> mtd = cfg.scenario.fixed.mtd_index;
    if (ocs.size() == 1) {
      text << render_oc(ocs.front(), mtd, cfg.model, {TableLayout::FixedScenario, format});
    } else {
      text << render_oc_comparison(labels, ocs, mtd, cfg.model,
                                   {TableLayout::FixedScenario, format});
    }
  } else {
    text << render_random_summary(labels, ocs, {TableLayout::RandomSummary, format});
  }
  emit(text.str(), o.out);
  return kExitOk;
}

int cmd_scenario_gen(const std::string& cls, const std::string& shape, int n_scenarios,
                     double phi, std::uint64_t seed, const std::vector<double>& pao_params,
                     const std::string& out_path) {
  ModelSpec model{{10, 25, 50, 100, 200, 400, 800}, 100.0};
  ToxicityIntervals intervals;
  intervals.ttl = phi;

  std::vector<ScenarioSpec> scenarios;
  std::string comment;
  const std::vector<double>* doses = nullptr;
  if (cls == "fixed") {
    const FixedShape fs = fixed_shape_from_string(shape);
    scenarios.push_back(fixed_scenario(fs, model, phi, intervals));
    comment = "fixed shape " + to_string(fs);
    doses = &model.doses;
  } else if (cls == "clertant") {
    for (int s = 0; s < n_scenarios; ++s) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(s));
      scenarios.push_back(gen_clertant(static_cast<int>(model.num_doses()), phi, rng));
    }
    std::ostringstream c;
    c << "clertant class, phi = " << phi << ", seed = " << seed;
    comment = c.str();
  } else if (cls == "paoletti") {
    PaolettiParams params;
    if (!pao_params.empty()) {
      if (pao_params.size() != 5)
        throw std::invalid_argument("--paoletti-params needs sigma0,mu1,sigma1,mu2,sigma2");
      params = {pao_params[0], pao_params[1], pao_params[2], pao_params[3], pao_params[4]};
    }
    for (int s = 0; s < n_scenarios; ++s) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(s));
      scenarios.push_back(gen_paoletti(static_cast<int>(model.num_doses()), phi, params, rng));
    }
    std::ostringstream c;
    c << "paoletti class, phi = " << phi << ", params = {" << params.sigma0 << "," << params.mu1
      << "," << params.sigma1 << "," << params.mu2 << "," << params.sigma2 << "}, seed = " << seed;
    comment = c.str();
  } else {
    throw std::invalid_argument("scenario-gen: unknown class \"" + cls + "\"");
  }

  emit(render_scenarios_csv(scenarios, doses, comment), out_path);
  return kExitOk;
}

int cmd_debug_grid(const std::string& config_path, const std::string& data_path,
                   const std::string& out_path) {
  RunConfig cfg = RunConfig::from_file(config_path);
  const CohortDataFile input = CohortDataFile::from_file(data_path, cfg.model.num_doses());
  const auto grid = quadrature_grid(input.data, cfg.model, cfg.prior);
  std::ostringstream text;
  text << "log_alpha,log_beta,weight,log_post\n";
  for (const GridPoint& p : grid) {
    text << p.log_alpha << "," << p.log_beta << "," << p.weight << "," << p.log_post << "\n";
  }
  emit(text.str(), out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BLRM dose-finding engine and trial simulator"};
  app.require_subcommand(1);

  CommonOverrides rec_o, sim_o;
  std::string rec_config, rec_data;
  auto* rec = app.add_subcommand("recommend", "per-cohort dose recommendation for observed data");
  rec->add_option("--config", rec_config, "run configuration (JSON)")->required();
  rec->add_option("--data", rec_data, "per-dose counts plus current dose (JSON)")->required();
  add_common(rec, rec_o);

  std::string sim_config, dump_config;
  auto* simc = app.add_subcommand("simulate", "operating characteristics by simulation");
  simc->add_option("--config", sim_config, "run configuration (JSON)")->required();
  simc->add_option("--dump-config", dump_config, "write the effective configuration to this path");
  add_common(simc, sim_o);

  std::string gen_class = "clertant", gen_shape = "steep", gen_out;
  int gen_n = 1;
  double gen_phi = 0.25;
  std::uint64_t gen_seed = 1;
  std::vector<double> gen_pao;
  auto* gen = app.add_subcommand("scenario-gen", "emit true dose-toxicity scenarios as CSV");
  gen->add_option("--class", gen_class, "scenario class: clertant|paoletti|fixed")->required();
  gen->add_option("--shape", gen_shape, "fixed shape: steep|s_shaped|flat");
  gen->add_option("--n-scenarios", gen_n, "number of scenarios");
  gen->add_option("--phi", gen_phi, "target toxicity level");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--paoletti-params", gen_pao, "sigma0,mu1,sigma1,mu2,sigma2")
      ->delimiter(',')->expected(5);
  gen->add_option("--out", gen_out, "output path");

  std::string dbg_config, dbg_data, dbg_out;
  auto* dbg = app.add_subcommand("debug-grid", "dump the posterior quadrature grid as CSV");
  dbg->add_option("--config", dbg_config, "run configuration (JSON)")->required();
  dbg->add_option("--data", dbg_data, "per-dose counts (JSON)")->required();
  dbg->add_option("--out", dbg_out, "output path");

  try {
    app.parse(argc, argv);
    if (rec->parsed()) return cmd_recommend(rec_config, rec_data, rec_o);
    if (simc->parsed()) return cmd_simulate(sim_config, sim_o, dump_config);
    if (gen->parsed())
      return cmd_scenario_gen(gen_class, gen_shape, gen_n, gen_phi, gen_seed, gen_pao, gen_out);
    if (dbg->parsed()) return cmd_debug_grid(dbg_config, dbg_data, dbg_out);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
