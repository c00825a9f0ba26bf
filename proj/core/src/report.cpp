#include "adlens/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adlens/errors.hpp"

namespace adlens {
namespace {

std::string fmt_fixed(double v, int decimals) {
  if (!std::isfinite(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0.0" || s == "-0.00") s.erase(s.begin());
  return s;
}

// RFC 4180: quote fields containing comma, quote or newline.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::string md_field(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out += c;
  }
  return out;
}

std::string join_set(const std::set<std::string>& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ';';
    out += v;
  }
  return out;
}

}  // namespace

ReportFormat parse_report_format(const std::string& name) {
  if (name == "csv") return ReportFormat::Csv;
  if (name == "markdown" || name == "md") return ReportFormat::Markdown;
  throw Error("BadArgument", "unknown report format '" + name + "'");
}

std::string fmt_pct(double v) { return fmt_fixed(v, 1); }
std::string fmt_ratio(double v) { return fmt_fixed(v, 2); }

void write_table(const Table& table, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::Csv) {
    auto line = [&out](const std::vector<std::string>& row) {
      for (size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << csv_field(row[i]);
      }
      out << "\r\n";
    };
    line(table.header);
    for (const auto& row : table.rows) line(row);
    return;
  }
  auto line = [&out](const std::vector<std::string>& row) {
    out << '|';
    for (const auto& f : row) out << ' ' << md_field(f) << " |";
    out << '\n';
  };
  line(table.header);
  out << '|';
  for (size_t i = 0; i < table.header.size(); ++i) out << " --- |";
  out << '\n';
  for (const auto& row : table.rows) line(row);
}

void write_table(const Table& table, ReportFormat format,
                 const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  write_table(table, format, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Table profiles_table(const std::vector<ProfileRow>& rows) {
  Table t;
  t.header = {"app_id",       "version_code", "role",
              "integrated",   "accessed",     "ad_screens",
              "integrated_count"};
  for (const auto& r : rows)
    t.rows.push_back({r.app_id, std::to_string(r.version_code),
                      to_string(r.profile.role), join_set(r.profile.integrated),
                      join_set(r.profile.accessed),
                      join_set(r.profile.ad_screens),
                      std::to_string(r.profile.integrated.size())});
  return t;
}

Table strategy_table(const std::vector<StrategyRow>& rows) {
  Table t;
  t.header = {"app_id",         "version_code",  "integrated_count",
              "accessed_count", "mediator_kind", "mediator_package",
              "strategy"};
  for (const auto& r : rows) {
    std::string kind = "none";
    if (r.result.mediator.kind == MediatorFinding::Kind::External)
      kind = "external";
    else if (r.result.mediator.kind == MediatorFinding::Kind::Self)
      kind = "self";
    t.rows.push_back({r.app_id, std::to_string(r.version_code),
                      std::to_string(r.result.integrated.size()),
                      std::to_string(r.result.accessed.size()), kind,
                      r.result.mediator.package, to_string(r.result.strategy)});
  }
  return t;
}

Table distribution_table(const std::vector<StrategyDistributionRow>& rows) {
  Table t;
  t.header = {"strategy", "count", "percent"};
  for (const auto& r : rows)
    t.rows.push_back(
        {to_string(r.strategy), std::to_string(r.count), fmt_pct(r.percent)});
  return t;
}

Table count_summary_table(const std::vector<StrategyCountSummaryRow>& rows) {
  Table t;
  t.header = {"strategy", "n", "mean", "min", "q1", "median", "q3", "max"};
  for (const auto& r : rows) {
    const FiveNumberSummary& s = r.integrated_counts;
    t.rows.push_back({to_string(r.strategy), std::to_string(s.n),
                      fmt_ratio(s.mean), fmt_ratio(s.min), fmt_ratio(s.q1),
                      fmt_ratio(s.median), fmt_ratio(s.q3), fmt_ratio(s.max)});
  }
  return t;
}

Table evolution_table(const std::vector<LineageMetrics>& rows) {
  Table t;
  t.header = {"app_id",
              "strategy",
              "modification_probability",
              "add_remove_ratio",
              "modified_pct_when_lib_updated",
              "modified_pct_when_lib_not_updated"};
  for (const auto& r : rows)
    t.rows.push_back({r.app_id, to_string(r.strategy),
                      fmt_ratio(r.modification_probability),
                      fmt_ratio(r.add_remove_ratio),
                      fmt_pct(r.modified_pct_when_lib_updated),
                      fmt_pct(r.modified_pct_when_lib_not_updated)});
  return t;
}

Table change_event_table(const std::vector<ChangeEvent>& events) {
  Table t;
  t.header = {"app_id", "from_version", "to_version", "library", "kind"};
  for (const auto& e : events)
    t.rows.push_back({e.app_id, std::to_string(e.from_version),
                      std::to_string(e.to_version), e.library,
                      to_string(e.kind)});
  return t;
}

Table category_report_table(const CategoryTable& table) {
  Table t;
  t.header = {"category",          "studied",          "ad_displaying",
              "pct_ad_displaying", "median_integrated", "max_integrated",
              "top_libraries"};
  for (const auto& r : table.rows) {
    std::string top;
    for (const auto& [lib, pct] : r.top_libraries) {
      if (!top.empty()) top += ';';
      top += lib + "(" + fmt_pct(pct) + "%)";
    }
    t.rows.push_back({r.category, std::to_string(r.studied_count),
                      std::to_string(r.ad_displaying_count), fmt_pct(r.pct),
                      fmt_ratio(r.median_integrated),
                      std::to_string(r.max_integrated), top});
  }
  return t;
}

Table bucket_table(const BucketSeries& series) {
  Table t;
  t.header = {"lower_bound_downloads", "multi_count", "single_count", "ratio"};
  for (const auto& b : series.buckets)
    t.rows.push_back({std::to_string(b.lower_bound_downloads),
                      std::to_string(b.multi_count),
                      std::to_string(b.single_count),
                      b.defined ? fmt_ratio(b.ratio) : "undefined"});
  return t;
}

Table correlation_table(const CorrelationResult& r, const std::string& label) {
  Table t;
  t.header = {"label", "n", "rho", "p_value"};
  t.rows.push_back({label, std::to_string(r.n), fmt_ratio(r.rho),
                    fmt_fixed(r.p_value, 6)});
  return t;
}

}  // namespace adlens
