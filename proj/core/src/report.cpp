#include "vfsl/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <tuple>

#include <json.hpp>

#include "vfsl/csv.hpp"

namespace vfsl {
namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

template <typename T>
T parse_number(const std::string& field, const char* what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::ParseFailure, std::string("bad ") + what + " '" + field + "'");
  }
  return value;
}

std::string render_csv(const std::vector<EvalReport>& reports) {
  std::string out = "dataset,method,shots,seed,accuracy\n";
  for (const auto& r : reports) {
    const std::string prefix = csv_escape(r.dataset) + "," + std::string(to_string(r.method)) +
                               "," + std::to_string(r.shots) + ",";
    for (const auto& s : r.per_seed) {
      out += prefix + std::to_string(s.seed) + "," + fixed(s.accuracy, 4) + "\n";
    }
    out += prefix + "mean," + fixed(r.mean, 4) + "\n";
    out += prefix + "std," + fixed(r.std, 4) + "\n";
  }
  return out;
}

std::string render_json(const std::vector<EvalReport>& reports) {
  auto doc = nlohmann::ordered_json::object();
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json item;
    item["dataset"] = r.dataset;
    item["method"] = std::string(to_string(r.method));
    item["shots"] = r.shots;
    auto seeds = nlohmann::ordered_json::array();
    for (const auto& s : r.per_seed) {
      seeds.push_back({{"seed", s.seed}, {"accuracy", round_accuracy(s.accuracy)}});
    }
    item["per_seed"] = std::move(seeds);
    item["mean"] = round_accuracy(r.mean);
    item["std"] = round_accuracy(r.std);
    arr.push_back(std::move(item));
  }
  doc["reports"] = std::move(arr);
  return doc.dump(2) + "\n";
}

std::string render_markdown(const std::vector<EvalReport>& reports) {
  std::vector<std::string> datasets;
  std::vector<Method> methods;
  std::vector<std::size_t> shots;
  std::map<std::tuple<std::size_t, Method, std::string>, double> cell;
  for (const auto& r : reports) {
    if (std::find(datasets.begin(), datasets.end(), r.dataset) == datasets.end()) {
      datasets.push_back(r.dataset);
    }
    if (std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
      methods.push_back(r.method);
    }
    if (std::find(shots.begin(), shots.end(), r.shots) == shots.end()) shots.push_back(r.shots);
    cell[{r.shots, r.method, r.dataset}] = r.mean;
  }
  std::sort(shots.begin(), shots.end());
  const bool average = datasets.size() > 1;

  std::string out = "| Shots | Method |";
  std::string rule = "|---:|:---|";
  for (const auto& d : datasets) {
    out += " " + d + " |";
    rule += "---:|";
  }
  if (average) {
    out += " Average |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";

  for (std::size_t s : shots) {
    bool first = true;
    for (Method m : methods) {
      std::string row;
      double sum = 0.0;
      std::size_t present = 0;
      for (const auto& d : datasets) {
        const auto it = cell.find({s, m, d});
        if (it == cell.end()) {
          row += " - |";
          continue;
        }
        row += " " + fixed(100.0 * it->second, 1) + " |";
        sum += it->second;
        ++present;
      }
      if (present == 0) continue;
      if (average) {
        row += present == datasets.size() ? " " + fixed(100.0 * sum / present, 1) + " |" : " - |";
      }
      out += "| " + (first ? std::to_string(s) : std::string()) + " | " +
             std::string(to_string(m)) + " |" + row + "\n";
      first = false;
    }
  }
  return out;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "json") return ReportFormat::Json;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw Error(ErrorCode::InvalidArgument, "unknown report format '" + std::string(name) + "'");
}

std::string emit_report(const std::vector<EvalReport>& reports, ReportFormat format) {
  if (reports.empty()) throw Error(ErrorCode::InvalidArgument, "no reports to emit");
  switch (format) {
    case ReportFormat::Csv: return render_csv(reports);
    case ReportFormat::Json: return render_json(reports);
    case ReportFormat::Markdown: return render_markdown(reports);
  }
  return {};
}

std::vector<EvalReport> parse_report_csv(std::string_view text) {
  const auto records = parse_csv_records(text);
  if (records.empty() || records[0] != std::vector<std::string>{"dataset", "method", "shots",
                                                                 "seed", "accuracy"}) {
    throw Error(ErrorCode::ParseFailure, "missing report CSV header");
  }
  std::vector<EvalReport> reports;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.size() != 5) throw Error(ErrorCode::RaggedRows, "report row with wrong field count");
    if (rec[3] == "mean" || rec[3] == "std") continue;
    const Method method = parse_method(rec[1]);
    const auto shots = parse_number<std::size_t>(rec[2], "shots");
    auto it = std::find_if(reports.begin(), reports.end(), [&](const EvalReport& r) {
      return r.dataset == rec[0] && r.method == method && r.shots == shots;
    });
    if (it == reports.end()) {
      reports.push_back(EvalReport{rec[0], method, shots, {}, 0.0, 0.0});
      it = std::prev(reports.end());
    }
    it->per_seed.push_back(
        {parse_number<std::uint64_t>(rec[3], "seed"), parse_number<double>(rec[4], "accuracy")});
  }
  for (auto& r : reports) r.finalize();
  return reports;
}

}  // namespace vfsl
