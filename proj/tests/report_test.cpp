#include <algorithm>

#include <gtest/gtest.h>

#include <json.hpp>

#include "vfsl/report.hpp"

namespace vfsl {
namespace {

EvalReport make(std::string dataset, Method method, std::size_t shots,
                std::vector<double> accuracies) {
  EvalReport r;
  r.dataset = std::move(dataset);
  r.method = method;
  r.shots = shots;
  std::uint64_t seed = 1;
  for (double a : accuracies) r.per_seed.push_back({seed++, a});
  r.finalize();
  return r;
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

TEST(Report, SingleReportCsv) {
  const auto csv = emit_report({make("synth", Method::SiM, 16, {0.5, 0.6, 0.7})}, ReportFormat::Csv);
  EXPECT_EQ(csv,
            "dataset,method,shots,seed,accuracy\n"
            "synth,sim,16,1,0.5000\n"
            "synth,sim,16,2,0.6000\n"
            "synth,sim,16,3,0.7000\n"
            "synth,sim,16,mean,0.6000\n"
            "synth,sim,16,std,0.1000\n");
}

TEST(Report, SingleSeedIsOneDataRow) {
  const auto csv = emit_report({make("d", Method::BLM, 4, {0.25})}, ReportFormat::Csv);
  EXPECT_NE(csv.find("d,blm,4,1,0.2500\n"), std::string::npos);
  EXPECT_NE(csv.find("d,blm,4,std,0.0000\n"), std::string::npos);
}

TEST(Report, CsvRoundTrip) {
  const std::vector<EvalReport> reports = {make("a,b", Method::SiM, 16, {0.9, 0.95, 1.0}),
                                           make("c", Method::OneToOne, 4, {0.125, 0.5})};
  const auto back = parse_report_csv(emit_report(reports, ReportFormat::Csv));
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].dataset, reports[i].dataset);
    EXPECT_EQ(back[i].method, reports[i].method);
    EXPECT_EQ(back[i].shots, reports[i].shots);
    EXPECT_EQ(back[i].per_seed, reports[i].per_seed);
    EXPECT_NEAR(back[i].mean, reports[i].mean, 1e-12);
    EXPECT_NEAR(back[i].std, reports[i].std, 1e-12);
  }
}

TEST(Report, MarkdownGroupsByShots) {
  const std::vector<EvalReport> reports = {
      make("synth", Method::OneToOne, 16, {0.5}), make("synth", Method::SiM, 4, {0.7}),
      make("synth", Method::SiM, 16, {0.8}), make("synth", Method::OneToOne, 4, {0.4})};
  const auto md = emit_report(reports, ReportFormat::Markdown);
  EXPECT_EQ(md,
            "| Shots | Method | synth |\n"
            "|---:|:---|---:|\n"
            "| 4 | flm | 40.0 |\n"
            "|  | sim | 70.0 |\n"
            "| 16 | flm | 50.0 |\n"
            "|  | sim | 80.0 |\n");
  EXPECT_EQ(count_lines(md), 6u);
}

TEST(Report, MarkdownAverageColumnAcrossDatasets) {
  const auto md = emit_report({make("x", Method::SiM, 16, {0.8}), make("y", Method::SiM, 16, {0.6})},
                              ReportFormat::Markdown);
  EXPECT_NE(md.find("| Average |"), std::string::npos);
  EXPECT_NE(md.find("| 16 | sim | 80.0 | 60.0 | 70.0 |"), std::string::npos);
}

TEST(Report, JsonCarriesAggregates) {
  const auto doc =
      nlohmann::json::parse(emit_report({make("s", Method::Centroids, 8, {0.5, 0.7})},
                                        ReportFormat::Json));
  const auto& r = doc.at("reports").at(0);
  EXPECT_EQ(r.at("method"), "centroids");
  EXPECT_EQ(r.at("shots"), 8);
  EXPECT_EQ(r.at("per_seed").size(), 2u);
  EXPECT_DOUBLE_EQ(r.at("mean").get<double>(), 0.6);
}

TEST(Report, Errors) {
  EXPECT_THROW(emit_report({}, ReportFormat::Csv), Error);
  EXPECT_THROW(parse_report_format("xml"), Error);
  EXPECT_THROW(parse_report_csv("a,b\n"), Error);
}

}  // namespace
}  // namespace vfsl
