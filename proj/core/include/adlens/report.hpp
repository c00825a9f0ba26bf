#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adlens/detect.hpp"
#include "adlens/evolution.hpp"
#include "adlens/stats.hpp"
#include "adlens/strategy.hpp"

namespace adlens {

enum class ReportFormat { Csv, Markdown };

ReportFormat parse_report_format(const std::string& name);  // "csv"|"markdown"

// A rendered table: header plus string rows. All numeric formatting happens
// before this point so emission is byte-deterministic.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Fixed decimal formatting for golden-file stability.
std::string fmt_pct(double v);    // 1 decimal
std::string fmt_ratio(double v);  // 2 decimals

void write_table(const Table& table, ReportFormat format, std::ostream& out);
void write_table(const Table& table, ReportFormat format,
                 const std::filesystem::path& path);

// Table builders (rows ordered by app_id / enum order / category name).
struct ProfileRow {
  std::string app_id;
  std::int64_t version_code;
  AdIntegrationProfile profile;
};
Table profiles_table(const std::vector<ProfileRow>& rows);

struct StrategyRow {
  std::string app_id;
  std::int64_t version_code;
  StrategyResult result;
};
Table strategy_table(const std::vector<StrategyRow>& rows);
Table distribution_table(const std::vector<StrategyDistributionRow>& rows);
Table count_summary_table(const std::vector<StrategyCountSummaryRow>& rows);
Table evolution_table(const std::vector<LineageMetrics>& rows);
Table change_event_table(const std::vector<ChangeEvent>& events);
Table category_report_table(const CategoryTable& table);
Table bucket_table(const BucketSeries& series);
Table correlation_table(const CorrelationResult& r, const std::string& label);

}  // namespace adlens
