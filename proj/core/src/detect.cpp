#include "adlens/detect.hpp"

#include "adlens/strategy.hpp"

namespace adlens {
namespace {

bool matches_ad_pattern(std::string_view name) {
  // substring [aA][dD]
  for (size_t i = 0; i + 1 < name.size(); ++i) {
    char a = name[i], d = name[i + 1];
    if ((a == 'a' || a == 'A') && (d == 'd' || d == 'D')) return true;
  }
  return false;
}

// Show-ad call into one of `integrated`'s libraries.
const AdLibraryEntry* show_ad_target(const CallSite& cs,
                                     const AdLibraryCatalog& catalog,
                                     const std::set<std::string>& integrated) {
  for (const auto& entry : catalog.entries) {
    if (!integrated.count(entry.name)) continue;
    for (const auto& pat : entry.show_ad_methods)
      if (pat.matches(cs.callee)) return &entry;
  }
  return nullptr;
}

}  // namespace

std::string to_string(AppRole role) {
  switch (role) {
    case AppRole::AdDisplaying: return "AdDisplaying";
    case AppRole::NonIntegrating: return "NonIntegrating";
    case AppRole::AnalyticsOnly: return "AnalyticsOnly";
    case AppRole::InertAdCode: return "InertAdCode";
  }
  return "?";
}

const std::vector<std::string>& default_third_party_prefixes() {
  static const std::vector<std::string> kPrefixes = {
      "android", "androidx", "java",     "javax", "kotlin",
      "kotlinx", "dalvik",   "org.json", "junit",
  };
  return kPrefixes;
}

bool is_app_code(std::string_view fqn, const AdLibraryCatalog& catalog,
                 const std::vector<std::string>& extra_third_party) {
  if (catalog.is_ad_library_class(fqn)) return false;
  if (catalog.is_analytics_class(fqn)) return false;
  for (const auto& p : extra_third_party)
    if (under_prefix(fqn, p)) return false;
  return true;
}

std::set<std::string> candidate_ad_classes(const AppUpdate& update) {
  std::set<std::string> out;
  for (const auto& [fqn, cls] : update.classes)
    if (matches_ad_pattern(fqn)) out.insert(fqn);
  return out;
}

std::set<std::string> integrated_libraries(const AppUpdate& update,
                                           const AdLibraryCatalog& catalog) {
  std::set<std::string> out;
  for (const auto& [fqn, cls] : update.classes)
    if (auto owner = catalog.owner_of(fqn)) out.insert(*owner);
  return out;
}

std::set<std::string> ad_screens(const AppUpdate& update,
                                 const AdLibraryCatalog& catalog) {
  std::set<std::string> integrated = integrated_libraries(update, catalog);
  std::set<std::string> out;
  for (const auto& activity : update.activities) {
    auto it = update.classes.find(activity);
    if (it == update.classes.end()) continue;
    for (const auto& cs : it->second.call_sites)
      if (show_ad_target(cs, catalog, integrated)) {
        out.insert(activity);
        break;
      }
  }
  return out;
}

AppRole classify_role(const AppUpdate& update,
                      const AdLibraryCatalog& catalog) {
  return build_profile(update, catalog).role;
}

AdIntegrationProfile build_profile(const AppUpdate& update,
                                   const AdLibraryCatalog& catalog) {
  AdIntegrationProfile profile;
  profile.integrated = integrated_libraries(update, catalog);
  if (profile.integrated.empty()) {
    profile.role = AppRole::NonIntegrating;
    return profile;
  }
  profile.accessed = accessed_libraries(update, catalog);
  profile.ad_screens = ad_screens(update, catalog);

  const auto& third_party = default_third_party_prefixes();
  bool show_ad_from_app_code = false;
  bool identifier_from_analytics = false;
  bool ad_call_from_outside = false;
  for (const auto& [fqn, cls] : update.classes) {
    bool app_code = is_app_code(fqn, catalog, third_party);
    bool analytics = catalog.is_analytics_class(fqn);
    bool inside_ad_lib = catalog.is_ad_library_class(fqn);
    for (const auto& cs : cls.call_sites) {
      if (app_code && show_ad_target(cs, catalog, profile.integrated))
        show_ad_from_app_code = true;
      if (!inside_ad_lib && catalog.is_ad_library_class(cs.callee.owner_class))
        ad_call_from_outside = true;
      if (analytics) {
        for (const auto& entry : catalog.entries)
          for (const auto& idp : entry.identifier_prefixes)
            if (under_prefix(cs.callee.owner_class, idp))
              identifier_from_analytics = true;
      }
    }
  }

  if (show_ad_from_app_code || !profile.ad_screens.empty()) {
    profile.role = AppRole::AdDisplaying;
  } else if (identifier_from_analytics) {
    profile.role = AppRole::AnalyticsOnly;
  } else {
    profile.role = AppRole::InertAdCode;
    if (ad_call_from_outside)
      profile.diagnostics.push_back(
          "non-show calls into ad libraries without identifier use; "
          "reported as InertAdCode");
  }
  return profile;
}

}  // namespace adlens
