#include "blrm/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace blrm {

namespace {

using nlohmann::json;

std::string format_dose(double dose) {
  std::ostringstream out;
  out << dose;  // doses are plain magnitudes; default formatting keeps 10 as "10"
  return out.str();
}

struct TableBuilder {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << "\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
      out << "\n";
    }
    return out.str();
  }

  std::string markdown() const {
    std::ostringstream out;
    out << "|";
    for (const auto& h : header) out << " " << h << " |";
    out << "\n|";
    for (std::size_t i = 0; i < header.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : rows) {
      out << "|";
      for (const auto& cell : row) out << " " << (cell.empty() ? "-" : cell) << " |";
      out << "\n";
    }
    return out.str();
  }
};

}  // namespace

TableFormat table_format_from_string(const std::string& name) {
  if (name == "csv") return TableFormat::Csv;
  if (name == "markdown" || name == "md") return TableFormat::Markdown;
  if (name == "json") return TableFormat::Json;
  throw std::invalid_argument("unknown table format: " + name);
}

double round_half_away(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double magnitude = std::floor(std::abs(value) * scale + 0.5) / scale;
  return value < 0.0 ? -magnitude : magnitude;
}

std::string format_fixed(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, round_half_away(value, digits));
  return buf;
}

std::string render_single_fit(const IntervalProbs& probs, const TrialData& data,
                              const ModelSpec& model, const TableSpec& spec) {
  const std::size_t K = model.num_doses();
  if (probs.size() != K || data.size() != K)
    throw std::invalid_argument("render_single_fit: inconsistent lengths");

  if (spec.format == TableFormat::Json) {
    json rows = json::array();
    for (std::size_t i = 0; i < K; ++i) {
      rows.push_back({{"dose", model.doses[i]},
                      {"dlt", data.dlts[i]},
                      {"patients", data.patients[i]},
                      {"p_under", round_half_away(probs.under[i], 3)},
                      {"p_target", round_half_away(probs.target[i], 3)},
                      {"p_over", round_half_away(probs.over[i], 3)}});
    }
    return rows.dump(2) + "\n";
  }

  TableBuilder t;
  t.header = {"Dose", "#DLT", "#Patient", "P(Under)", "P(Target)", "P(Over)"};
  for (std::size_t i = 0; i < K; ++i) {
    t.rows.push_back({format_dose(model.doses[i]), std::to_string(data.dlts[i]),
                      std::to_string(data.patients[i]), format_fixed(probs.under[i], 3),
                      format_fixed(probs.target[i], 3), format_fixed(probs.over[i], 3)});
  }
  return spec.format == TableFormat::Csv ? t.csv() : t.markdown();
}

namespace {

std::vector<std::string> oc_row_labels(const ModelSpec& model, std::optional<int> mtd_index) {
  std::vector<std::string> labels;
  labels.push_back("AllToxic");
  for (std::size_t i = 0; i < model.num_doses(); ++i) {
    std::string label = format_dose(model.doses[i]);
    if (mtd_index && static_cast<std::size_t>(*mtd_index) == i) label += "*";
    labels.push_back(label);
  }
  labels.push_back("NotFound");
  labels.push_back("Overall");
  labels.push_back("%DLT");
  return labels;
}

// Frequency and N cells for one design, aligned with oc_row_labels.
std::vector<std::pair<std::string, std::string>> oc_cells(const OperatingCharacteristics& oc,
                                                          const ModelSpec& model) {
  std::vector<std::pair<std::string, std::string>> cells;
  cells.emplace_back(format_fixed(oc.all_toxic_freq, 3), "");
  for (std::size_t i = 0; i < model.num_doses(); ++i) {
    cells.emplace_back(format_fixed(oc.selection_freq[i], 3), format_fixed(oc.mean_patients[i], 2));
  }
  cells.emplace_back(format_fixed(oc.not_found_freq, 3), "");
  cells.emplace_back("", format_fixed(oc.mean_total_n, 2));
  cells.emplace_back(format_fixed(oc.pct_dlt, 1), "");
  return cells;
}

json oc_json(const OperatingCharacteristics& oc, std::optional<int> mtd_index,
             const ModelSpec& model) {
  json doses = json::array();
  for (std::size_t i = 0; i < model.num_doses(); ++i) {
    doses.push_back({{"dose", model.doses[i]},
                     {"frequency", round_half_away(oc.selection_freq[i], 3)},
                     {"mean_patients", round_half_away(oc.mean_patients[i], 2)},
                     {"is_mtd", mtd_index && static_cast<std::size_t>(*mtd_index) == i}});
  }
  return {{"all_toxic", round_half_away(oc.all_toxic_freq, 3)},
          {"not_found", round_half_away(oc.not_found_freq, 3)},
          {"doses", doses},
          {"mean_overall_n", round_half_away(oc.mean_total_n, 2)},
          {"pct_dlt", round_half_away(oc.pct_dlt, 1)},
          {"correct_mtd", round_half_away(oc.correct_mtd_freq, 3)},
          {"n_replicates", oc.n_replicates}};
}

}  // namespace

std::string render_oc(const OperatingCharacteristics& oc, std::optional<int> mtd_index,
                      const ModelSpec& model, const TableSpec& spec) {
  if (oc.selection_freq.size() != model.num_doses())
    throw std::invalid_argument("render_oc: operating characteristics do not match the model");

  if (spec.format == TableFormat::Json) return oc_json(oc, mtd_index, model).dump(2) + "\n";

  TableBuilder t;
  t.header = {"MTD", "Frequency", "N"};
  const auto labels = oc_row_labels(model, mtd_index);
  const auto cells = oc_cells(oc, model);
  for (std::size_t r = 0; r < labels.size(); ++r) {
    t.rows.push_back({labels[r], cells[r].first, cells[r].second});
  }
  return spec.format == TableFormat::Csv ? t.csv() : t.markdown();
}

std::string render_oc_comparison(const std::vector<std::string>& labels,
                                 const std::vector<OperatingCharacteristics>& ocs,
                                 std::optional<int> mtd_index, const ModelSpec& model,
                                 const TableSpec& spec) {
  if (labels.size() != ocs.size() || ocs.empty())
    throw std::invalid_argument("render_oc_comparison: need one label per design");

  if (spec.format == TableFormat::Json) {
    json out = json::array();
    for (std::size_t d = 0; d < ocs.size(); ++d) {
      json entry = oc_json(ocs[d], mtd_index, model);
      entry["design"] = labels[d];
      out.push_back(std::move(entry));
    }
    return out.dump(2) + "\n";
  }

  TableBuilder t;
  t.header = {"MTD"};
  for (const auto& label : labels) {
    t.header.push_back(label + " Frequency");
    t.header.push_back(label + " N");
  }
  const auto row_labels = oc_row_labels(model, mtd_index);
  std::vector<std::vector<std::pair<std::string, std::string>>> cells;
  cells.reserve(ocs.size());
  for (const auto& oc : ocs) cells.push_back(oc_cells(oc, model));
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    std::vector<std::string> row{row_labels[r]};
    for (std::size_t d = 0; d < ocs.size(); ++d) {
      row.push_back(cells[d][r].first);
      row.push_back(cells[d][r].second);
    }
    t.rows.push_back(std::move(row));
  }
  return spec.format == TableFormat::Csv ? t.csv() : t.markdown();
}

std::string render_random_summary(const std::vector<std::string>& labels,
                                  const std::vector<OperatingCharacteristics>& ocs,
                                  const TableSpec& spec) {
  if (labels.size() != ocs.size())
    throw std::invalid_argument("render_random_summary: need one label per design");

  if (spec.format == TableFormat::Json) {
    json out = json::array();
    for (std::size_t d = 0; d < ocs.size(); ++d) {
      out.push_back({{"design", labels[d]},
                     {"correct_mtd", round_half_away(ocs[d].correct_mtd_freq, 3)},
                     {"mean_overall_n", round_half_away(ocs[d].mean_total_n, 2)},
                     {"pct_dlt", round_half_away(ocs[d].pct_dlt, 1)},
                     {"n_replicates", ocs[d].n_replicates}});
    }
    return out.dump(2) + "\n";
  }

  TableBuilder t;
  t.header = {"Design", "%CorrectMTD", "Mean N", "%DLT"};
  for (std::size_t d = 0; d < ocs.size(); ++d) {
    t.rows.push_back({labels[d], format_fixed(ocs[d].correct_mtd_freq, 3),
                      format_fixed(ocs[d].mean_total_n, 2), format_fixed(ocs[d].pct_dlt, 1)});
  }
  return spec.format == TableFormat::Csv ? t.csv() : t.markdown();
}

std::string render_scenarios_csv(const std::vector<ScenarioSpec>& scenarios,
                                 const std::vector<double>* doses_mg,
                                 const std::string& header_comment) {
  std::ostringstream out;
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "scenario_id,dose_index,dose_mg,rate,is_mtd\n";
  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const ScenarioSpec& scenario = scenarios[s];
    for (std::size_t i = 0; i < scenario.rates.size(); ++i) {
      out << s << "," << i << ",";
      if (doses_mg != nullptr && i < doses_mg->size()) out << format_dose((*doses_mg)[i]);
      out << "," << format_fixed(scenario.rates[i], 6) << ",";
      out << ((scenario.mtd_index && static_cast<std::size_t>(*scenario.mtd_index) == i) ? 1 : 0);
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace blrm
