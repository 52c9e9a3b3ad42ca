#include "crowdbench/report.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "crowdbench/errors.hpp"
#include "crowdbench/scenario.hpp"

namespace crowdbench {

ReportFormat parse_report_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ReportFormat::markdown;
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ConfigError("unknown report format: " + std::string(name));
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

namespace {

using Json = nlohmann::ordered_json;

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string cell(const std::optional<MeanStd>& m, int precision) {
  if (!m) return "n/a";
  return fixed(m->mean, precision) + " ± " + fixed(m->std, precision);
}

std::string pct_cell(const std::optional<double>& v) { return v ? fixed(*v, 1) : "n/a"; }

std::string emit_markdown(std::span<const ReportRow> rows) {
  std::ostringstream out;
  out << "| Scenario | Policy | Success % | Collision % | Timeout % | Nav. time (s) "
         "| M_I | M_II | M_III (s) | M_IV | M_V |\n";
  out << "|---|---|---:|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  std::size_t aborted = 0;
  for (const ReportRow& r : rows) {
    const AggregateReport& a = r.agg;
    out << "| " << r.kind << " | " << r.policy << " | " << fixed(a.success_pct, 1) << " | "
        << fixed(a.collision_pct, 1) << " | " << fixed(a.timeout_pct, 1) << " | "
        << cell(a.nav_time, 2) << " | " << cell(a.m1, 3) << " | " << cell(a.m2, 3) << " | "
        << cell(a.m3, 2) << " | " << cell(a.m4, 3) << " | " << cell(a.m5, 3) << " |\n";
    aborted += a.aborted;
  }

  bool any_side = false;
  for (const ReportRow& r : rows) any_side = any_side || r.agg.side_applicable;
  if (any_side) {
    out << "\n| Scenario | Policy | Left % | Right % | Undetermined |\n";
    out << "|---|---|---:|---:|---:|\n";
    for (const ReportRow& r : rows) {
      if (!r.agg.side_applicable) continue;
      out << "| " << r.kind << " | " << r.policy << " | " << pct_cell(r.agg.left_pct) << " | "
          << pct_cell(r.agg.right_pct) << " | " << r.agg.side_undetermined << " |\n";
    }
  }

  if (aborted > 0) {
    out << "\nAborted episodes (excluded from all rates):";
    for (const ReportRow& r : rows) {
      if (r.agg.aborted > 0) out << ' ' << r.kind << '=' << r.agg.aborted;
    }
    out << '\n';
  }
  return out.str();
}

constexpr std::array<const char*, 28> kCsvColumns{
    "kind",          "policy",        "episodes",      "successes",     "collisions",
    "timeouts",      "aborted",       "success_pct",   "collision_pct", "timeout_pct",
    "nav_time_mean", "nav_time_std",  "m1_mean",       "m1_std",        "m2_mean",
    "m2_std",        "m3_mean",       "m3_std",        "m4_mean",       "m4_std",
    "m5_mean",       "m5_std",        "side_applicable", "side_left",   "side_right",
    "side_undetermined", "left_pct",  "right_pct",
};

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> csv_fields(const ReportRow& r) {
  const AggregateReport& a = r.agg;
  std::vector<std::string> f{csv_quote(r.kind),         csv_quote(r.policy),
                             std::to_string(a.episodes), std::to_string(a.successes),
                             std::to_string(a.collisions), std::to_string(a.timeouts),
                             std::to_string(a.aborted),  format_double(a.success_pct),
                             format_double(a.collision_pct), format_double(a.timeout_pct)};
  for (const auto* m : {&a.nav_time, &a.m1, &a.m2, &a.m3, &a.m4, &a.m5}) {
    f.push_back(*m ? format_double((*m)->mean) : "");
    f.push_back(*m ? format_double((*m)->std) : "");
  }
  f.push_back(a.side_applicable ? "1" : "0");
  f.push_back(std::to_string(a.side_left));
  f.push_back(std::to_string(a.side_right));
  f.push_back(std::to_string(a.side_undetermined));
  f.push_back(a.left_pct ? format_double(*a.left_pct) : "");
  f.push_back(a.right_pct ? format_double(*a.right_pct) : "");
  return f;
}

std::string emit_csv(std::span<const ReportRow> rows) {
  std::string out;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    if (i) out += ',';
    out += kCsvColumns[i];
  }
  out += '\n';
  for (const ReportRow& r : rows) {
    const auto fields = csv_fields(r);
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += fields[i];
    }
    out += '\n';
  }
  return out;
}

Json mean_std_json(const std::optional<MeanStd>& m) {
  if (!m) return nullptr;
  return {{"mean", m->mean}, {"std", m->std}, {"n", m->n}};
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::string emit_json(std::span<const ReportRow> rows) {
  Json arr = Json::array();
  for (const ReportRow& r : rows) {
    const AggregateReport& a = r.agg;
    arr.push_back({{"kind", r.kind},
                   {"policy", r.policy},
                   {"episodes", a.episodes},
                   {"successes", a.successes},
                   {"collisions", a.collisions},
                   {"timeouts", a.timeouts},
                   {"aborted", a.aborted},
                   {"success_pct", a.success_pct},
                   {"collision_pct", a.collision_pct},
                   {"timeout_pct", a.timeout_pct},
                   {"nav_time", mean_std_json(a.nav_time)},
                   {"m1", mean_std_json(a.m1)},
                   {"m2", mean_std_json(a.m2)},
                   {"m3", mean_std_json(a.m3)},
                   {"m4", mean_std_json(a.m4)},
                   {"m5", mean_std_json(a.m5)},
                   {"side",
                    a.side_applicable ? Json{{"left", a.side_left},
                                             {"right", a.side_right},
                                             {"undetermined", a.side_undetermined},
                                             {"left_pct", optional_json(a.left_pct)},
                                             {"right_pct", optional_json(a.right_pct)}}
                                      : Json(nullptr)}});
  }
  return Json{{"rows", std::move(arr)}}.dump(2) + "\n";
}

std::vector<std::vector<std::string>> split_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n') {
      record.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(record));
      record.clear();
      any = false;
    } else if (c != '\r') {
      field += c;
      any = true;
    }
  }
  if (quoted) throw InvalidInput("unterminated quoted CSV field");
  if (any) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }
  return records;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidInput("bad number in CSV: " + s);
  return v;
}

std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw InvalidInput("bad count in CSV: " + s);
  return v;
}

std::optional<double> parse_optional(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return parse_double(s);
}

}  // namespace

std::string emit_report(std::span<const ReportRow> rows, ReportFormat format) {
  if (rows.empty()) throw InvalidInput("no aggregates to report");
  switch (format) {
    case ReportFormat::markdown: return emit_markdown(rows);
    case ReportFormat::csv: return emit_csv(rows);
    case ReportFormat::json: return emit_json(rows);
  }
  return {};
}

std::vector<ReportRow> parse_report_csv(std::string_view csv) {
  const auto records = split_csv(csv);
  if (records.empty()) throw InvalidInput("empty CSV");
  const auto& header = records.front();
  if (header.size() != kCsvColumns.size()) throw InvalidInput("unexpected CSV header");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] != kCsvColumns[i]) throw InvalidInput("unexpected CSV column " + header[i]);
  }

  std::vector<ReportRow> rows;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& f = records[r];
    if (f.size() != kCsvColumns.size()) throw InvalidInput("CSV row has wrong field count");
    ReportRow row;
    row.kind = f[0];
    row.policy = f[1];
    AggregateReport& a = row.agg;
    a.label = row.kind;
    a.episodes = parse_count(f[2]);
    a.successes = parse_count(f[3]);
    a.collisions = parse_count(f[4]);
    a.timeouts = parse_count(f[5]);
    a.aborted = parse_count(f[6]);
    a.success_pct = parse_double(f[7]);
    a.collision_pct = parse_double(f[8]);
    a.timeout_pct = parse_double(f[9]);
    std::size_t col = 10;
    for (auto* m : {&a.nav_time, &a.m1, &a.m2, &a.m3, &a.m4, &a.m5}) {
      const auto mean = parse_optional(f[col]);
      const auto sd = parse_optional(f[col + 1]);
      if (mean.has_value() != sd.has_value()) throw InvalidInput("half-empty mean/std pair");
      if (mean) *m = MeanStd{*mean, *sd, 0};
      col += 2;
    }
    a.side_applicable = f[22] == "1";
    a.side_left = parse_count(f[23]);
    a.side_right = parse_count(f[24]);
    a.side_undetermined = parse_count(f[25]);
    a.left_pct = parse_optional(f[26]);
    a.right_pct = parse_optional(f[27]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace crowdbench
