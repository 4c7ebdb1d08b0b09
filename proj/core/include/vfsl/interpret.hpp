#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vfsl/sim_mapper.hpp"

namespace vfsl {

struct ExplanationEntry {
  std::size_t prompt_index = 0;
  std::optional<std::string> prompt_name;
  double weight = 0.0;

  friend bool operator==(const ExplanationEntry&, const ExplanationEntry&) = default;
};

struct ClassExplanation {
  std::size_t class_index = 0;
  std::optional<std::string> class_name;
  /// Highest signed weights first; length min(top_k, K).
  std::vector<ExplanationEntry> entries;
  /// Most negative weights (strongest contra-evidence), at most top_k, only
  /// entries below zero.
  std::vector<ExplanationEntry> contra;
  std::size_t top_k = 0;

  /// True when even the best weight is negative: no prompt supports the class.
  bool low_confidence() const noexcept { return !entries.empty() && entries.front().weight < 0.0; }
};

/// Ranks the prompts of each class by raw weight w_{k,c}; ties go to the
/// lower prompt index.
std::vector<ClassExplanation> explain(
    const MappingModel& model, std::size_t top_k,
    const std::optional<std::vector<std::string>>& class_names = std::nullopt);

enum class ExplanationFormat { Json, Markdown };

ExplanationFormat parse_explanation_format(std::string_view name);

/// Entry weight divided by the class's top weight (bar-length proportion).
double bar_proportion(const ClassExplanation& explanation, std::size_t entry);

std::string render_explanations(const std::vector<ClassExplanation>& explanations,
                                ExplanationFormat format);

}  // namespace vfsl
