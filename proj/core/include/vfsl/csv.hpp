#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "vfsl/matrix.hpp"

namespace vfsl {

/// Splits RFC-4180 text into records of fields. Quoted fields may contain
/// commas, doubled quotes and line breaks. Blank lines are skipped.
std::vector<std::vector<std::string>> parse_csv_records(std::string_view text);

/// Quotes a field when it contains a comma, quote or line break.
std::string csv_escape(std::string_view field);

/// Parses a numeric CSV matrix. With `has_header`, the first record is a
/// header; if its first field is "name", the first column holds row names.
EmbeddingMatrix parse_csv(std::string_view text, bool has_header);
EmbeddingMatrix read_csv(const std::filesystem::path& path, bool has_header);

/// Always writes a header ("name,c0,..." with names, "c0,..." without) and
/// shortest round-trip float representations.
std::string format_csv(const EmbeddingMatrix& matrix);
void write_csv(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

/// Labels file: one non-negative integer per line, index-aligned with rows.
LabelVector parse_labels(std::string_view text, std::size_t num_classes = 0);
LabelVector read_labels(const std::filesystem::path& path, std::size_t num_classes = 0);
std::string format_labels(const LabelVector& labels);
void write_labels(const LabelVector& labels, const std::filesystem::path& path);

}  // namespace vfsl
