#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blrm/model.hpp"
#include "blrm/simulator.hpp"

namespace blrm {

enum class TableFormat { Csv, Markdown, Json };
enum class TableLayout { SingleFit, FixedScenario, RandomSummary };

TableFormat table_format_from_string(const std::string& name);

struct TableSpec {
  TableLayout layout = TableLayout::SingleFit;
  TableFormat format = TableFormat::Csv;
};

/// Round half away from zero at `digits` decimals, the convention used for
/// every printed value.
double round_half_away(double value, int digits);
std::string format_fixed(double value, int digits);

/// Per-dose fit table: Dose, #DLT, #Patient, P(Under), P(Target), P(Over).
std::string render_single_fit(const IntervalProbs& probs, const TrialData& data,
                              const ModelSpec& model, const TableSpec& spec);

/// Operating characteristics of one design: AllToxic, one row per dose (the
/// MTD row flagged), NotFound, Overall, %DLT.
std::string render_oc(const OperatingCharacteristics& oc, std::optional<int> mtd_index,
                      const ModelSpec& model, const TableSpec& spec);

/// Side-by-side frequency/N columns for several designs.
std::string render_oc_comparison(const std::vector<std::string>& labels,
                                 const std::vector<OperatingCharacteristics>& ocs,
                                 std::optional<int> mtd_index, const ModelSpec& model,
                                 const TableSpec& spec);

/// Correct-MTD accuracy rows for random-scenario batches.
std::string render_random_summary(const std::vector<std::string>& labels,
                                  const std::vector<OperatingCharacteristics>& ocs,
                                  const TableSpec& spec);

/// Scenario CSV (columns scenario_id, dose_index, dose_mg, rate, is_mtd).
std::string render_scenarios_csv(const std::vector<ScenarioSpec>& scenarios,
                                 const std::vector<double>* doses_mg,
                                 const std::string& header_comment);

}  // namespace blrm
