#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/model.hpp"
#include "adlens/strategy.hpp"

namespace adlens {

// Identifier recorded in reports so digests are reproducible across tools.
inline constexpr const char* kSignatureAlgorithm = "fnv64x2-v1";

// Stable digest over the ordered multiset of app-code call-site tuples
// (caller fqn, callee fqn, callee method name, param count) into one library.
// Canonical sort before hashing makes it independent of input order.
// Obfuscated caller classes are excluded.
struct CallSiteSignature {
  std::string library;
  std::array<std::uint64_t, 2> digest{};

  bool operator==(const CallSiteSignature&) const = default;
};

struct ChangeEvent {
  enum class Kind {
    AdCallSiteModified,
    LibraryAdded,
    LibraryRemoved,
    LibraryVersionChanged,
  };
  std::string app_id;
  std::int64_t from_version = 0;
  std::int64_t to_version = 0;
  std::string library;
  Kind kind;
};

std::string to_string(ChangeEvent::Kind kind);

struct LineageMetrics {
  std::string app_id;
  IntegrationStrategy strategy = IntegrationStrategy::NotAdDisplaying;
  double modification_probability = 0;  // in [0,1]
  double add_remove_ratio = 0;          // in [0,1]
  double modified_pct_when_lib_updated = 0;
  double modified_pct_when_lib_not_updated = 0;
};

// Simple identifier-mangling heuristic: a name is obfuscated when at most two
// characters remain after stripping digits.
bool is_obfuscated_name(std::string_view name);
bool is_obfuscated_class(std::string_view fqn);

CallSiteSignature signature(const AppUpdate& update, const std::string& library,
                            const AdLibraryCatalog& catalog);

// True iff the app-code call-site signatures into `library` differ.
bool call_site_modified(const AppUpdate& prev, const AppUpdate& next,
                        const std::string& library,
                        const AdLibraryCatalog& catalog);

// True iff the library's own class set (fqns and declared method names under
// its prefixes) differs; proxy for a library version bump in stripped
// binaries.
bool library_version_changed(const AppUpdate& prev, const AppUpdate& next,
                             const std::string& library,
                             const AdLibraryCatalog& catalog);

// (# consecutive pairs with any integrated library's call sites modified) /
// (# consecutive pairs). Throws Error("TooShortLineage") when < 2 updates.
double modification_probability(const AppLineage& lineage,
                                const AdLibraryCatalog& catalog);

// (# updates whose integrated set differs from the previous update) /
// (total # updates). The first update never counts, but stays in the
// denominator.
double add_remove_ratio(const AppLineage& lineage,
                        const AdLibraryCatalog& catalog);

// Percentage of (library, transition) pairs with a call-site modification,
// split by whether the library's own classes changed in that transition.
std::pair<double, double> modified_proportion_split(
    const AppLineage& lineage, const AdLibraryCatalog& catalog);

std::vector<ChangeEvent> change_events(const AppLineage& lineage,
                                       const AdLibraryCatalog& catalog);

LineageMetrics lineage_metrics(const AppLineage& lineage,
                               const AdLibraryCatalog& catalog);

// (% obfuscated packages, % obfuscated method names) over the update's
// classes.
std::pair<double, double> obfuscation_stats(const AppUpdate& update);

}  // namespace adlens
