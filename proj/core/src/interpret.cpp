#include "vfsl/interpret.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

namespace vfsl {
namespace {

constexpr std::size_t kBarWidth = 20;

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

std::string escape_markdown(std::string_view text) {
  std::string out;
  for (char ch : text) {
    if (ch == '|') out += '\\';
    out += ch;
  }
  return out;
}

std::string entry_label(const ExplanationEntry& e) {
  return e.prompt_name ? escape_markdown(*e.prompt_name) : "#" + std::to_string(e.prompt_index);
}

}  // namespace

std::vector<ClassExplanation> explain(const MappingModel& model, std::size_t top_k,
                                      const std::optional<std::vector<std::string>>& class_names) {
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
  const auto& w = model.weights;
  if (w.empty()) throw Error(ErrorCode::EmptyMatrix, "model has no weights");
  if (class_names && class_names->size() != w.cols()) {
    throw Error(ErrorCode::NameCountMismatch, "class name count differs from the model's classes");
  }
  if (model.prompt_names && model.prompt_names->size() != w.rows()) {
    throw Error(ErrorCode::NameCountMismatch, "prompt name count differs from the model's prompts");
  }

  const std::size_t k = w.rows();
  const std::size_t keep = std::min(top_k, k);
  std::vector<ClassExplanation> out;
  out.reserve(w.cols());
  std::vector<std::size_t> order(k);
  for (std::size_t c = 0; c < w.cols(); ++c) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w(a, c) > w(b, c); });

    auto make_entry = [&](std::size_t idx) {
      ExplanationEntry e{idx, std::nullopt, w(idx, c)};
      if (model.prompt_names) e.prompt_name = (*model.prompt_names)[idx];
      return e;
    };

    ClassExplanation ex;
    ex.class_index = c;
    if (class_names) ex.class_name = (*class_names)[c];
    ex.top_k = top_k;
    for (std::size_t i = 0; i < keep; ++i) ex.entries.push_back(make_entry(order[i]));
    // Contra-evidence: scan from the most negative end, lower index first on ties.
    std::vector<std::size_t> ascending(order.begin(), order.end());
    std::stable_sort(ascending.begin(), ascending.end(),
                     [&](std::size_t a, std::size_t b) { return w(a, c) < w(b, c); });
    for (std::size_t i = 0; i < ascending.size() && ex.contra.size() < keep; ++i) {
      if (w(ascending[i], c) >= 0.0) break;
      ex.contra.push_back(make_entry(ascending[i]));
    }
    out.push_back(std::move(ex));
  }
  return out;
}

ExplanationFormat parse_explanation_format(std::string_view name) {
  if (name == "json") return ExplanationFormat::Json;
  if (name == "markdown" || name == "md") return ExplanationFormat::Markdown;
  throw Error(ErrorCode::InvalidArgument, "unknown explanation format '" + std::string(name) + "'");
}

double bar_proportion(const ClassExplanation& explanation, std::size_t entry) {
  const double top = explanation.entries.front().weight;
  if (top == 0.0) return 0.0;
  return explanation.entries.at(entry).weight / top;
}

std::string render_explanations(const std::vector<ClassExplanation>& explanations,
                                ExplanationFormat format) {
  if (explanations.empty()) throw Error(ErrorCode::InvalidArgument, "no explanations to render");

  if (format == ExplanationFormat::Json) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& ex : explanations) {
      nlohmann::ordered_json item;
      item["class_index"] = ex.class_index;
      item["class_name"] = ex.class_name ? nlohmann::ordered_json(*ex.class_name) : nullptr;
      item["top_k"] = ex.top_k;
      item["low_confidence"] = ex.low_confidence();
      auto entries = nlohmann::ordered_json::array();
      for (std::size_t i = 0; i < ex.entries.size(); ++i) {
        const auto& e = ex.entries[i];
        entries.push_back({{"prompt_index", e.prompt_index},
                           {"prompt_name", e.prompt_name ? nlohmann::ordered_json(*e.prompt_name)
                                                         : nlohmann::ordered_json(nullptr)},
                           {"weight", e.weight},
                           {"proportion", bar_proportion(ex, i)}});
      }
      item["entries"] = std::move(entries);
      auto contra = nlohmann::ordered_json::array();
      for (const auto& e : ex.contra) {
        contra.push_back({{"prompt_index", e.prompt_index},
                          {"prompt_name", e.prompt_name ? nlohmann::ordered_json(*e.prompt_name)
                                                        : nlohmann::ordered_json(nullptr)},
                          {"weight", e.weight}});
      }
      item["contra"] = std::move(contra);
      arr.push_back(std::move(item));
    }
    nlohmann::ordered_json doc;
    doc["classes"] = std::move(arr);
    return doc.dump(2) + "\n";
  }

  std::string out;
  for (const auto& ex : explanations) {
    out += "## Class " + std::to_string(ex.class_index);
    if (ex.class_name) out += " (" + escape_markdown(*ex.class_name) + ")";
    out += "\n\n";
    if (ex.low_confidence()) {
      out += "> low-confidence explanation: every top-" + std::to_string(ex.top_k) +
             " weight is negative\n\n";
    }
    out += "| Rank | Prompt | Weight | Proportion | |\n|---:|:---|---:|---:|:---|\n";
    for (std::size_t i = 0; i < ex.entries.size(); ++i) {
      const auto& e = ex.entries[i];
      const double p = bar_proportion(ex, i);
      const auto len = p > 0.0 ? static_cast<std::size_t>(std::lround(std::min(p, 1.0) * kBarWidth))
                               : std::size_t{0};
      std::string bar;
      for (std::size_t j = 0; j < len; ++j) bar += "█";
      out += "| " + std::to_string(i + 1) + " | " + entry_label(e) + " | " + fixed(e.weight, 4) +
             " | " + fixed(p, 3) + " | " + bar + " |\n";
    }
    if (!ex.contra.empty()) {
      out += "\nContra-evidence:";
      for (const auto& e : ex.contra) out += " " + entry_label(e) + " (" + fixed(e.weight, 4) + ")";
      out += "\n";
    }
    out += "\n";
  }
  return out;
}

}  // namespace vfsl
