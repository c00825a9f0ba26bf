#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/model.hpp"

namespace adlens {

enum class IntegrationStrategy {
  ExternalMediation,
  SelfMediation,
  Scattered,
  Mixed,
  SingleLibrary,
  NotAdDisplaying,
  Unclassifiable,  // rule gap: |accessed| < |integrated| with no mediator
};

std::string to_string(IntegrationStrategy s);

struct MediatorFinding {
  enum class Kind { External, Self, None };
  Kind kind = Kind::None;
  std::string package;
  std::set<std::string> covered_libraries;
};

struct StrategyResult {
  IntegrationStrategy strategy = IntegrationStrategy::NotAdDisplaying;
  std::set<std::string> integrated;
  std::set<std::string> accessed;
  MediatorFinding mediator;
  std::string diagnostic;  // non-empty for Unclassifiable
};

// Classes owned neither by the catalog (ad, analytics) nor by the extra
// third-party prefix list.
std::set<std::string> app_code_classes(
    const AppUpdate& update, const AdLibraryCatalog& catalog,
    const std::vector<std::string>& extra_third_party);

// Libraries whose package prefixes are called directly from app code.
std::set<std::string> accessed_libraries(const AppUpdate& update,
                                         const AdLibraryCatalog& catalog);

// External mediator: some entry's mediator prefix is called from app code.
// covered_libraries = integrated libraries called from the mediator package.
MediatorFinding detect_external_mediator(const AppUpdate& update,
                                         const AdLibraryCatalog& catalog);

// Self mediator: the deepest common app-code package containing every
// app-code -> ad-library call site, provided it is non-root and contains no
// manifest activity.
MediatorFinding detect_self_mediator(const AppUpdate& update,
                                     const AdLibraryCatalog& catalog);

StrategyResult classify_strategy(const AppUpdate& update,
                                 const AdLibraryCatalog& catalog);

struct StrategyDistributionRow {
  IntegrationStrategy strategy;
  int count = 0;
  double percent = 0.0;  // of multi-library ad-displaying apps
};

// Distribution over multi-library ad-displaying apps, one label per app from
// its latest update.
std::vector<StrategyDistributionRow> strategy_distribution(
    const Corpus& corpus, const AdLibraryCatalog& catalog);

struct FiveNumberSummary {
  double mean = 0, min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
  int n = 0;
};

// Type-7 (linear interpolation) quantiles of a sample; sample need not be
// sorted. Throws Error("EmptySample") on empty input.
FiveNumberSummary five_number_summary(std::vector<double> values);

struct StrategyCountSummaryRow {
  IntegrationStrategy strategy;
  FiveNumberSummary integrated_counts;
};

// Mean and five-number summary of integrated-library counts per strategy,
// over multi-library ad-displaying apps.
std::vector<StrategyCountSummaryRow> integrated_count_summary(
    const Corpus& corpus, const AdLibraryCatalog& catalog);

}  // namespace adlens
