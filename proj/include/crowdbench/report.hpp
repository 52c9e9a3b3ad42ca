#pragma once

/**
 * @file report.hpp
 * @brief Aggregate tables as markdown, CSV or JSON.
 *
 * Column order follows the published result tables: success, collision and
 * timeout rates, navigation time, then M_I..M_V as mean and sample std over
 * successful episodes. Side preference goes to a separate table with one
 * row per single-human kind.
 */

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "crowdbench/metrics.hpp"

namespace crowdbench {

enum class ReportFormat { markdown, csv, json };

/// Throws ConfigError for unknown names ("markdown"/"md", "csv", "json").
ReportFormat parse_report_format(std::string_view name);

struct ReportRow {
  std::string kind;
  std::string policy;
  AggregateReport agg;

  bool operator==(const ReportRow&) const = default;
};

/// Throws InvalidInput when `rows` is empty.
std::string emit_report(std::span<const ReportRow> rows, ReportFormat format);

/// Inverse of the CSV emitter. Sample sizes are not carried by the CSV and come back as 0.
std::vector<ReportRow> parse_report_csv(std::string_view csv);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace crowdbench
