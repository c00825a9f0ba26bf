#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace adlens {

// Show-method pattern: owner prefix plus method name; param_count -1 matches
// any arity (some libraries changed the show method's parameters across
// versions but kept the name).
struct ShowAdPattern {
  std::string owner_prefix;
  std::string method_name;
  int param_count = -1;

  bool matches(const MethodRef& callee) const {
    if (!under_prefix(callee.owner_class, owner_prefix)) return false;
    if (callee.method_name != method_name) return false;
    return param_count < 0 || callee.param_count == param_count;
  }

  bool operator==(const ShowAdPattern&) const = default;
};

struct AdLibraryEntry {
  std::string name;
  std::vector<std::string> package_prefixes;
  std::vector<std::string> mediator_prefixes;    // may be empty
  std::vector<std::string> identifier_prefixes;  // may be empty
  std::vector<ShowAdPattern> show_ad_methods;

  bool owns(std::string_view fqn) const {
    for (const auto& p : package_prefixes)
      if (under_prefix(fqn, p)) return true;
    return false;
  }

  bool operator==(const AdLibraryEntry&) const = default;
};

// Curated library registry, schema "catalog v1": one JSON object per line,
// either an ad-library entry or {"analytics_prefix":..., "library":...}.
struct AdLibraryCatalog {
  std::vector<AdLibraryEntry> entries;
  // (dotted prefix, library name) of known analytics libraries
  std::vector<std::pair<std::string, std::string>> analytics_prefixes;

  const AdLibraryEntry* entry(const std::string& name) const;
  // Library owning this class, if any.
  std::optional<std::string> owner_of(std::string_view fqn) const;
  bool is_ad_library_class(std::string_view fqn) const {
    return owner_of(fqn).has_value();
  }
  bool is_analytics_class(std::string_view fqn) const;

  // Enforces: unique names, disjoint package prefixes across entries, and
  // mediator/identifier prefixes nested under a package prefix of the same
  // entry. Throws Error("InvalidCatalog") on violation.
  void validate() const;
};

AdLibraryCatalog load_catalog(const std::filesystem::path& path);
AdLibraryCatalog load_catalog(std::istream& in, const std::string& origin);
void store_catalog(const AdLibraryCatalog& catalog, std::ostream& out);

// The shipped seed: the era's most widespread libraries with prefixes and show
// methods taken from public SDK documentation. Users extend via file.
AdLibraryCatalog seed_catalog();

}  // namespace adlens
