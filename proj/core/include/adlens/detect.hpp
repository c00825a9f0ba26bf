#pragma once

#include <set>
#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/model.hpp"

namespace adlens {

enum class AppRole {
  AdDisplaying,
  NonIntegrating,
  AnalyticsOnly,
  InertAdCode,
};

std::string to_string(AppRole role);

// Per-update detection result.
struct AdIntegrationProfile {
  std::set<std::string> integrated;
  std::set<std::string> accessed;
  std::set<std::string> ad_screens;
  AppRole role = AppRole::NonIntegrating;
  std::vector<std::string> diagnostics;
};

// Prefixes treated as third-party platform code in addition to the catalog's
// (used to carve out "app code"). Extend per corpus via configuration.
const std::vector<std::string>& default_third_party_prefixes();

// App code = classes not under any catalog prefix (package, mediator,
// identifier, analytics) nor any extra third-party prefix.
bool is_app_code(std::string_view fqn, const AdLibraryCatalog& catalog,
                 const std::vector<std::string>& extra_third_party);

// Recall-auditing diagnostic: all class fqns matching the substring pattern
// [aA][dD]. Classification authority is the catalog, not this filter.
std::set<std::string> candidate_ad_classes(const AppUpdate& update);

// Libraries with at least one class under one of their package prefixes.
std::set<std::string> integrated_libraries(const AppUpdate& update,
                                           const AdLibraryCatalog& catalog);

// Activities whose own code invokes a show-ad method of an integrated
// library. One-hop rule: the call site's caller class must be the activity.
std::set<std::string> ad_screens(const AppUpdate& update,
                                 const AdLibraryCatalog& catalog);

AppRole classify_role(const AppUpdate& update, const AdLibraryCatalog& catalog);

// Runs the full per-update detection (integrated/accessed/screens/role).
AdIntegrationProfile build_profile(const AppUpdate& update,
                                   const AdLibraryCatalog& catalog);

}  // namespace adlens
