#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vfsl/harness.hpp"

namespace vfsl {

enum class ReportFormat { Csv, Json, Markdown };

ReportFormat parse_report_format(std::string_view name);

/// Renders evaluation reports.
///
/// - csv: header `dataset,method,shots,seed,accuracy`, one row per seed, then
///   `mean` and `std` aggregate rows per report (accuracy to 4 decimals).
/// - json: the same fields plus aggregates, one object per report.
/// - markdown: Table-1 layout; shot counts form row blocks, methods are rows,
///   datasets are columns, values are mean top-1 in percent to 1 decimal.
std::string emit_report(const std::vector<EvalReport>& reports, ReportFormat format);

/// Reads the per-seed rows of a CSV report back into reports (aggregate rows
/// are recomputed, not trusted).
std::vector<EvalReport> parse_report_csv(std::string_view text);

}  // namespace vfsl
