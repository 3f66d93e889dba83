#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include "blrm/report.hpp"
#include "test_support.hpp"

using namespace blrm;
using namespace blrm_test;

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  return cells;
}

OperatingCharacteristics sample_oc(int reps) {
  OperatingCharacteristics oc;
  oc.selection_freq = {0.0, 0.0, 0.1, 0.5, 0.25, 0.0, 0.0};
  oc.all_toxic_freq = 0.05;
  oc.not_found_freq = 0.1;
  oc.mean_patients = {3.0, 3.1, 4.5, 12.25, 8.0, 2.0, 0.5};
  for (double n : oc.mean_patients) oc.mean_total_n += n;
  oc.pct_dlt = 14.25;
  oc.correct_mtd_freq = 0.5;
  oc.n_replicates = reps;
  return oc;
}

}  // namespace

TEST_CASE("rounding is half away from zero") {
  CHECK(round_half_away(0.0005, 3) == doctest::Approx(0.001));
  CHECK(round_half_away(-0.0005, 3) == doctest::Approx(-0.001));
  CHECK(round_half_away(0.2895, 3) == doctest::Approx(0.290));
  CHECK(round_half_away(12.345, 2) == doctest::Approx(12.35));
  CHECK(format_fixed(0.0005, 3) == "0.001");
  CHECK(format_fixed(-0.0005, 3) == "-0.001");
  CHECK(format_fixed(0.29, 3) == "0.290");
}

TEST_CASE("single-fit table structure") {
  const ModelSpec model = paper_model();
  const TrialData data = table1_data();
  const IntervalProbs probs = table1_printed_probs();

  const std::string csv = render_single_fit(probs, data, model, {TableLayout::SingleFit, TableFormat::Csv});
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "Dose,#DLT,#Patient,P(Under),P(Target),P(Over)");
  const auto row = split_csv(lines[4]);
  REQUIRE(row.size() == 6);
  CHECK(row[0] == "100");
  CHECK(row[1] == "0");
  CHECK(row[2] == "3");
  CHECK(row[3] == "0.777");
  CHECK(row[4] == "0.186");
  CHECK(row[5] == "0.037");
}

TEST_CASE("single-fit markdown carries the same cells as csv") {
  const ModelSpec model = paper_model();
  const TrialData data = table1_data();
  const IntervalProbs probs = table1_printed_probs();
  const std::string csv = render_single_fit(probs, data, model, {TableLayout::SingleFit, TableFormat::Csv});
  const std::string md = render_single_fit(probs, data, model, {TableLayout::SingleFit, TableFormat::Markdown});
  const auto csv_lines = split_lines(csv);
  const auto md_lines = split_lines(md);
  REQUIRE(md_lines.size() == 9);  // header + separator + 7 rows
  for (int i = 0; i < 7; ++i) {
    const auto cells = split_csv(csv_lines[i + 1]);
    for (const std::string& cell : cells) {
      CHECK(md_lines[i + 2].find(cell) != std::string::npos);
    }
  }
}

TEST_CASE("csv round-trips to printed precision") {
  const ModelSpec model = paper_model();
  const IntervalProbs probs =
      interval_probs(table1_data(), model, paper_prior(), wide_tti());
  const std::string csv =
      render_single_fit(probs, table1_data(), model, {TableLayout::SingleFit, TableFormat::Csv});
  const auto lines = split_lines(csv);
  for (int i = 0; i < 7; ++i) {
    const auto cells = split_csv(lines[i + 1]);
    CHECK(std::abs(std::stod(cells[3]) - probs.under[i]) <= 0.0005 + 1e-12);
    CHECK(std::abs(std::stod(cells[4]) - probs.target[i]) <= 0.0005 + 1e-12);
    CHECK(std::abs(std::stod(cells[5]) - probs.over[i]) <= 0.0005 + 1e-12);
  }
}

TEST_CASE("oc table has one row per dose plus four") {
  const ModelSpec model = paper_model();
  const std::string csv =
      render_oc(sample_oc(100), 3, model, {TableLayout::FixedScenario, TableFormat::Csv});
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 1 + 7 + 4);
  CHECK(split_csv(lines[1])[0] == "AllToxic");
  CHECK(split_csv(lines[5])[0] == "100*");  // flagged MTD row
  CHECK(split_csv(lines[9])[0] == "NotFound");
  CHECK(split_csv(lines[10])[0] == "Overall");
  CHECK(split_csv(lines[11])[0] == "%DLT");
  CHECK(split_csv(lines[10])[2] == "33.35");
}

TEST_CASE("one-replicate oc prints frequencies of zero or one") {
  OperatingCharacteristics oc;
  oc.selection_freq = {0, 0, 0, 1, 0, 0, 0};
  oc.all_toxic_freq = 0;
  oc.not_found_freq = 0;
  oc.mean_patients = {3, 3, 3, 6, 0, 0, 0};
  oc.mean_total_n = 15;
  oc.pct_dlt = 6.7;
  oc.n_replicates = 1;
  const std::string csv =
      render_oc(oc, {}, paper_model(), {TableLayout::FixedScenario, TableFormat::Csv});
  for (int i = 1; i <= 8; ++i) {
    const auto cells = split_csv(split_lines(csv)[i]);
    CHECK((cells[1] == "0.000" || cells[1] == "1.000"));
  }
}

TEST_CASE("comparison table carries a frequency and N column pair per design") {
  const std::vector<std::string> labels = {"original", "d1", "d2", "d3", "d4"};
  std::vector<OperatingCharacteristics> ocs(5, sample_oc(1000));
  const std::string csv = render_oc_comparison(labels, ocs, 4, paper_model(),
                                               {TableLayout::FixedScenario, TableFormat::Csv});
  const auto header = split_csv(split_lines(csv)[0]);
  REQUIRE(header.size() == 1 + 10);
  CHECK(header[1] == "original Frequency");
  CHECK(header[2] == "original N");
  CHECK(header[9] == "d4 Frequency");
  CHECK(header[10] == "d4 N");
}

TEST_CASE("random summary table") {
  const std::vector<std::string> labels = {"original", "d3"};
  std::vector<OperatingCharacteristics> ocs = {sample_oc(1000), sample_oc(1000)};
  const std::string csv =
      render_random_summary(labels, ocs, {TableLayout::RandomSummary, TableFormat::Csv});
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 3);
  CHECK(split_csv(lines[1])[0] == "original");
  CHECK(split_csv(lines[1])[1] == "0.500");
}

TEST_CASE("scenario csv layout") {
  ScenarioSpec spec;
  spec.rates = {0.1, 0.2, 0.3};
  spec.mtd_index = 1;
  const std::string csv = render_scenarios_csv({spec, spec}, nullptr, "note");
  const auto lines = split_lines(csv);
  REQUIRE(lines.size() == 1 + 1 + 6);
  CHECK(lines[0] == "# note");
  CHECK(lines[1] == "scenario_id,dose_index,dose_mg,rate,is_mtd");
  const auto row = split_csv(lines[3]);
  CHECK(row[0] == "0");
  CHECK(row[1] == "1");
  CHECK(row[2] == "");
  CHECK(row[4] == "1");
}

TEST_CASE("json output is parseable and faithful") {
  const std::string json_text = render_oc(sample_oc(10), 2, paper_model(),
                                          {TableLayout::FixedScenario, TableFormat::Json});
  CHECK(json_text.find("\"mean_overall_n\": 33.35") != std::string::npos);
  CHECK(json_text.find("\"is_mtd\": true") != std::string::npos);
}
