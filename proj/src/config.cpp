#include "blrm/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace blrm {

namespace {

using nlohmann::json;

json parse(const std::string& text, const std::string& what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument(what + ": malformed JSON");
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (!allowed.contains(key))
      throw std::invalid_argument("unknown key \"" + key + "\" in " + where);
  }
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw std::invalid_argument(where + ": missing numeric field \"" + key + "\"");
  return obj[key].get<double>();
}

}  // namespace

void SimulationConfig::validate() const {
  if (n_reps < 1) throw std::invalid_argument("simulation: n_reps must be >= 1");
  if (parallelism < 1) throw std::invalid_argument("simulation: parallelism must be >= 1");
}

void RunConfig::validate() const {
  model.validate();
  prior.validate();
  for (DesignVariant v : variants) design_for(v).validate(model.num_doses());
  simulation.validate();
  if (has_scenario && scenario.kind == ScenarioSource::Kind::Fixed) {
    scenario.fixed.validate();
    if (scenario.fixed.rates.size() != model.num_doses())
      throw std::invalid_argument("scenario: fixed rates must match the dose grid");
  }
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  const json root = parse(text, "config");
  if (!root.is_object()) throw std::invalid_argument("config: expected a JSON object");
  reject_unknown_keys(root, {"model", "prior", "design", "simulation", "scenario"}, "config");
  if (!root.contains("model") || !root.contains("prior") || !root.contains("design"))
    throw std::invalid_argument("config: model, prior and design sections are required");

  RunConfig cfg;

  const json& jm = root["model"];
  reject_unknown_keys(jm, {"doses", "reference_dose"}, "model");
  if (!jm.contains("doses") || !jm["doses"].is_array())
    throw std::invalid_argument("model: doses array is required");
  for (const auto& d : jm["doses"]) cfg.model.doses.push_back(d.get<double>());
  cfg.model.reference_dose = require_number(jm, "reference_dose", "model");

  const json& jp = root["prior"];
  reject_unknown_keys(jp, {"mean", "covariance"}, "prior");
  if (!jp.contains("mean") || !jp["mean"].is_array() || jp["mean"].size() != 2)
    throw std::invalid_argument("prior: mean must be a 2-vector");
  cfg.prior.mean = {jp["mean"][0].get<double>(), jp["mean"][1].get<double>()};
  if (!jp.contains("covariance") || !jp["covariance"].is_array() || jp["covariance"].size() != 2 ||
      jp["covariance"][0].size() != 2 || jp["covariance"][1].size() != 2)
    throw std::invalid_argument("prior: covariance must be a 2x2 matrix");
  const double c01 = jp["covariance"][0][1].get<double>();
  const double c10 = jp["covariance"][1][0].get<double>();
  if (c01 != c10) throw std::invalid_argument("prior: covariance must be symmetric");
  cfg.prior.covariance = {jp["covariance"][0][0].get<double>(), c01,
                          jp["covariance"][1][1].get<double>()};

  const json& jd = root["design"];
  reject_unknown_keys(jd,
                      {"ttl", "tti", "variant", "variants", "overdose_bound", "feasibility_bound",
                       "g_exponent", "mtd_min_patients", "mtd_target_prob_threshold",
                       "max_sample_size", "cohort_size", "start_dose_index"},
                      "design");
  if (jd.contains("ttl")) cfg.design.intervals.ttl = jd["ttl"].get<double>();
  if (jd.contains("tti")) {
    if (!jd["tti"].is_array() || jd["tti"].size() != 2)
      throw std::invalid_argument("design: tti must be [lower, upper]");
    cfg.design.intervals.lower = jd["tti"][0].get<double>();
    cfg.design.intervals.upper = jd["tti"][1].get<double>();
  }
  if (jd.contains("overdose_bound")) cfg.design.overdose_bound = jd["overdose_bound"].get<double>();
  if (jd.contains("feasibility_bound"))
    cfg.design.feasibility_bound = jd["feasibility_bound"].get<double>();
  if (jd.contains("g_exponent")) cfg.design.g_exponent = jd["g_exponent"].get<double>();
  if (jd.contains("mtd_min_patients")) cfg.design.mtd_min_patients = jd["mtd_min_patients"].get<int>();
  if (jd.contains("mtd_target_prob_threshold"))
    cfg.design.mtd_target_prob_threshold = jd["mtd_target_prob_threshold"].get<double>();
  if (jd.contains("max_sample_size")) cfg.design.max_sample_size = jd["max_sample_size"].get<int>();
  if (jd.contains("cohort_size")) cfg.design.cohort_size = jd["cohort_size"].get<int>();
  if (jd.contains("start_dose_index")) cfg.design.start_dose_index = jd["start_dose_index"].get<int>();

  if (jd.contains("variant") && jd.contains("variants"))
    throw std::invalid_argument("design: give either variant or variants, not both");
  if (jd.contains("variants")) {
    for (const auto& v : jd["variants"])
      cfg.variants.push_back(design_variant_from_string(v.get<std::string>()));
    if (cfg.variants.empty()) throw std::invalid_argument("design: variants must be non-empty");
  } else if (jd.contains("variant")) {
    cfg.variants.push_back(design_variant_from_string(jd["variant"].get<std::string>()));
  } else {
    cfg.variants.push_back(DesignVariant::Original);
  }
  cfg.design.variant = cfg.variants.front();

  if (root.contains("simulation")) {
    const json& js = root["simulation"];
    reject_unknown_keys(js, {"n_reps", "master_seed", "parallelism"}, "simulation");
    if (js.contains("n_reps")) cfg.simulation.n_reps = js["n_reps"].get<int>();
    if (js.contains("master_seed")) cfg.simulation.master_seed = js["master_seed"].get<std::uint64_t>();
    if (js.contains("parallelism")) cfg.simulation.parallelism = js["parallelism"].get<int>();
  }

  if (root.contains("scenario")) {
    cfg.has_scenario = true;
    const json& jsc = root["scenario"];
    reject_unknown_keys(jsc, {"class", "shape", "rates", "phi", "paoletti_params"}, "scenario");
    const std::string cls = jsc.value("class", "fixed");
    const double phi = jsc.value("phi", cfg.design.intervals.ttl);
    if (cls == "fixed") {
      if (jsc.contains("rates")) {
        ScenarioSpec spec;
        for (const auto& r : jsc["rates"]) spec.rates.push_back(r.get<double>());
        spec.mtd_index = true_mtd(spec.rates, phi, cfg.design.intervals);
        spec.label = "custom";
        cfg.scenario = ScenarioSource::from_fixed(std::move(spec));
      } else if (jsc.contains("shape")) {
        cfg.scenario = ScenarioSource::from_fixed(fixed_scenario(
            fixed_shape_from_string(jsc["shape"].get<std::string>()), cfg.model, phi,
            cfg.design.intervals));
      } else {
        throw std::invalid_argument("scenario: fixed class needs a shape or rates");
      }
      cfg.scenario.phi = phi;
    } else if (cls == "clertant") {
      cfg.scenario = ScenarioSource::from_clertant(phi);
    } else if (cls == "paoletti") {
      PaolettiParams params;
      if (jsc.contains("paoletti_params")) {
        const json& pp = jsc["paoletti_params"];
        if (!pp.is_array() || pp.size() != 5)
          throw std::invalid_argument("scenario: paoletti_params must be [sigma0,mu1,sigma1,mu2,sigma2]");
        params = {pp[0].get<double>(), pp[1].get<double>(), pp[2].get<double>(),
                  pp[3].get<double>(), pp[4].get<double>()};
      }
      cfg.scenario = ScenarioSource::from_paoletti(phi, params);
    } else {
      throw std::invalid_argument("scenario: unknown class \"" + cls + "\"");
    }
  }

  cfg.validate();
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  return from_json_text(read_file(path));
}

std::string RunConfig::to_json_text() const {
  json root;
  root["model"] = {{"doses", model.doses}, {"reference_dose", model.reference_dose}};
  root["prior"] = {{"mean", {prior.mean.x, prior.mean.y}},
                   {"covariance",
                    {{prior.covariance.a, prior.covariance.b},
                     {prior.covariance.b, prior.covariance.c}}}};
  json jd = {{"ttl", design.intervals.ttl},
             {"tti", {design.intervals.lower, design.intervals.upper}},
             {"overdose_bound", design.overdose_bound},
             {"feasibility_bound", design.feasibility_bound},
             {"g_exponent", design.g_exponent},
             {"mtd_min_patients", design.mtd_min_patients},
             {"mtd_target_prob_threshold", design.mtd_target_prob_threshold},
             {"max_sample_size", design.max_sample_size},
             {"cohort_size", design.cohort_size},
             {"start_dose_index", design.start_dose_index}};
  if (variants.size() == 1) {
    jd["variant"] = to_string(variants.front());
  } else {
    json vs = json::array();
    for (DesignVariant v : variants) vs.push_back(to_string(v));
    jd["variants"] = std::move(vs);
  }
  root["design"] = std::move(jd);
  root["simulation"] = {{"n_reps", simulation.n_reps},
                        {"master_seed", simulation.master_seed},
                        {"parallelism", simulation.parallelism}};
  if (has_scenario) {
    json jsc;
    switch (scenario.kind) {
      case ScenarioSource::Kind::Fixed:
        jsc["class"] = "fixed";
        if (scenario.fixed.label == "custom") {
          jsc["rates"] = scenario.fixed.rates;
        } else {
          jsc["shape"] = scenario.fixed.label;
        }
        jsc["phi"] = scenario.phi;
        break;
      case ScenarioSource::Kind::Clertant:
        jsc["class"] = "clertant";
        jsc["phi"] = scenario.phi;
        break;
      case ScenarioSource::Kind::Paoletti:
        jsc["class"] = "paoletti";
        jsc["phi"] = scenario.phi;
        jsc["paoletti_params"] = {scenario.paoletti.sigma0, scenario.paoletti.mu1,
                                  scenario.paoletti.sigma1, scenario.paoletti.mu2,
                                  scenario.paoletti.sigma2};
        break;
    }
    root["scenario"] = std::move(jsc);
  }
  return root.dump(2) + "\n";
}

CohortDataFile CohortDataFile::from_json_text(const std::string& text, std::size_t num_doses) {
  const json root = parse(text, "data");
  if (!root.is_object()) throw std::invalid_argument("data: expected a JSON object");
  reject_unknown_keys(root, {"patients", "dlts", "current_index"}, "data");
  if (!root.contains("patients") || !root.contains("dlts") || !root.contains("current_index"))
    throw std::invalid_argument("data: patients, dlts and current_index are required");

  CohortDataFile file;
  for (const auto& n : root["patients"]) file.data.patients.push_back(n.get<int>());
  for (const auto& y : root["dlts"]) file.data.dlts.push_back(y.get<int>());
  file.current_index = root["current_index"].get<int>();
  file.data.validate(num_doses);
  if (file.current_index < 0 || static_cast<std::size_t>(file.current_index) >= num_doses)
    throw std::invalid_argument("data: current_index out of range");
  return file;
}

CohortDataFile CohortDataFile::from_file(const std::string& path, std::size_t num_doses) {
  return from_json_text(read_file(path), num_doses);
}

std::string decision_to_json(const Decision& decision) {
  json j = {{"action", to_string(decision.action)},
            {"target_index", decision.target_index},
            {"addon_triggered", decision.addon_triggered}};
  return j.dump();
}

}  // namespace blrm
