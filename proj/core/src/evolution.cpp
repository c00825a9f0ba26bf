#include "adlens/evolution.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "adlens/detect.hpp"
#include "adlens/errors.hpp"

namespace adlens {
namespace {

struct Fnv64 {
  std::uint64_t state;
  explicit Fnv64(std::uint64_t basis) : state(basis) {}
  void update(std::string_view bytes) {
    for (unsigned char c : bytes) {
      state ^= c;
      state *= 0x100000001b3ull;
    }
  }
  void update_u32(std::uint32_t v) {
    char buf[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                   static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    update(std::string_view(buf, 4));
  }
  void update_field(std::string_view s) {
    update_u32(static_cast<std::uint32_t>(s.size()));
    update(s);
  }
};

// Two FNV-1a streams with distinct offset bases give the 128-bit digest.
std::array<std::uint64_t, 2> digest_tuples(
    const std::vector<std::tuple<std::string, std::string, std::string, int>>&
        sorted_tuples) {
  Fnv64 h1(0xcbf29ce484222325ull);
  Fnv64 h2(0x9e3779b97f4a7c15ull);
  for (const auto& [caller, callee_class, callee_method, params] :
       sorted_tuples) {
    for (Fnv64* h : {&h1, &h2}) {
      h->update_field(caller);
      h->update_field(callee_class);
      h->update_field(callee_method);
      h->update_u32(static_cast<std::uint32_t>(params));
    }
  }
  return {h1.state, h2.state};
}

std::array<std::uint64_t, 2> library_class_set_digest(
    const AppUpdate& update, const AdLibraryEntry& entry) {
  Fnv64 h1(0xcbf29ce484222325ull);
  Fnv64 h2(0x9e3779b97f4a7c15ull);
  for (const auto& [fqn, cls] : update.classes) {  // map order: sorted fqn
    if (!entry.owns(fqn)) continue;
    std::vector<std::pair<std::string, int>> methods;
    for (const auto& m : cls.declared_methods)
      methods.emplace_back(m.method_name, m.param_count);
    std::sort(methods.begin(), methods.end());
    for (Fnv64* h : {&h1, &h2}) {
      h->update_field(fqn);
      for (const auto& [name, params] : methods) {
        h->update_field(name);
        h->update_u32(static_cast<std::uint32_t>(params));
      }
    }
  }
  return {h1.state, h2.state};
}

std::string strip_digits(std::string_view name) {
  std::string out;
  for (char c : name)
    if (c < '0' || c > '9') out.push_back(c);
  return out;
}

}  // namespace

std::string to_string(ChangeEvent::Kind kind) {
  switch (kind) {
    case ChangeEvent::Kind::AdCallSiteModified: return "AdCallSiteModified";
    case ChangeEvent::Kind::LibraryAdded: return "LibraryAdded";
    case ChangeEvent::Kind::LibraryRemoved: return "LibraryRemoved";
    case ChangeEvent::Kind::LibraryVersionChanged:
      return "LibraryVersionChanged";
  }
  return "?";
}

bool is_obfuscated_name(std::string_view name) {
  return strip_digits(name).size() <= 2;
}

bool is_obfuscated_class(std::string_view fqn) {
  return is_obfuscated_name(simple_name_of(fqn));
}

CallSiteSignature signature(const AppUpdate& update, const std::string& library,
                            const AdLibraryCatalog& catalog) {
  const AdLibraryEntry* entry = catalog.entry(library);
  if (entry == nullptr || !integrated_libraries(update, catalog).count(library))
    throw Error("LibraryNotIntegrated",
                "library '" + library + "' not integrated in " +
                    update.app_id + " v" +
                    std::to_string(update.version_code));
  const auto& third_party = default_third_party_prefixes();
  std::vector<std::tuple<std::string, std::string, std::string, int>> tuples;
  for (const auto& [fqn, cls] : update.classes) {
    if (!is_app_code(fqn, catalog, third_party)) continue;
    if (is_obfuscated_class(fqn)) continue;
    for (const auto& cs : cls.call_sites)
      if (entry->owns(cs.callee.owner_class))
        tuples.emplace_back(fqn, cs.callee.owner_class, cs.callee.method_name,
                            cs.callee.param_count);
  }
  std::sort(tuples.begin(), tuples.end());
  CallSiteSignature sig;
  sig.library = library;
  sig.digest = digest_tuples(tuples);
  return sig;
}

bool call_site_modified(const AppUpdate& prev, const AppUpdate& next,
                        const std::string& library,
                        const AdLibraryCatalog& catalog) {
  return signature(prev, library, catalog) != signature(next, library, catalog);
}

bool library_version_changed(const AppUpdate& prev, const AppUpdate& next,
                             const std::string& library,
                             const AdLibraryCatalog& catalog) {
  const AdLibraryEntry* entry = catalog.entry(library);
  if (entry == nullptr)
    throw Error("LibraryNotIntegrated", "unknown library '" + library + "'");
  return library_class_set_digest(prev, *entry) !=
         library_class_set_digest(next, *entry);
}

double modification_probability(const AppLineage& lineage,
                                const AdLibraryCatalog& catalog) {
  if (lineage.updates.size() < 2)
    throw Error("TooShortLineage",
                "app '" + lineage.app_id + "' has fewer than 2 updates");
  int modified = 0;
  int pairs = static_cast<int>(lineage.updates.size()) - 1;
  for (size_t i = 1; i < lineage.updates.size(); ++i) {
    const AppUpdate& prev = lineage.updates[i - 1];
    const AppUpdate& next = lineage.updates[i];
    std::set<std::string> both = integrated_libraries(prev, catalog);
    std::set<std::string> next_libs = integrated_libraries(next, catalog);
    bool any = false;
    for (const auto& lib : both)
      if (next_libs.count(lib) && call_site_modified(prev, next, lib, catalog))
        any = true;
    if (any) ++modified;
  }
  return static_cast<double>(modified) / pairs;
}

double add_remove_ratio(const AppLineage& lineage,
                        const AdLibraryCatalog& catalog) {
  int changed = 0;
  for (size_t i = 1; i < lineage.updates.size(); ++i)
    if (integrated_libraries(lineage.updates[i], catalog) !=
        integrated_libraries(lineage.updates[i - 1], catalog))
      ++changed;
  return static_cast<double>(changed) /
         static_cast<double>(lineage.updates.size());
}

std::pair<double, double> modified_proportion_split(
    const AppLineage& lineage, const AdLibraryCatalog& catalog) {
  int updated_total = 0, updated_modified = 0;
  int stable_total = 0, stable_modified = 0;
  for (size_t i = 1; i < lineage.updates.size(); ++i) {
    const AppUpdate& prev = lineage.updates[i - 1];
    const AppUpdate& next = lineage.updates[i];
    std::set<std::string> prev_libs = integrated_libraries(prev, catalog);
    std::set<std::string> next_libs = integrated_libraries(next, catalog);
    for (const auto& lib : prev_libs) {
      if (!next_libs.count(lib)) continue;
      bool modified = call_site_modified(prev, next, lib, catalog);
      if (library_version_changed(prev, next, lib, catalog)) {
        ++updated_total;
        if (modified) ++updated_modified;
      } else {
        ++stable_total;
        if (modified) ++stable_modified;
      }
    }
  }
  auto pct = [](int num, int den) {
    return den == 0 ? 0.0 : 100.0 * num / den;
  };
  return {pct(updated_modified, updated_total),
          pct(stable_modified, stable_total)};
}

std::vector<ChangeEvent> change_events(const AppLineage& lineage,
                                       const AdLibraryCatalog& catalog) {
  std::vector<ChangeEvent> events;
  for (size_t i = 1; i < lineage.updates.size(); ++i) {
    const AppUpdate& prev = lineage.updates[i - 1];
    const AppUpdate& next = lineage.updates[i];
    std::set<std::string> prev_libs = integrated_libraries(prev, catalog);
    std::set<std::string> next_libs = integrated_libraries(next, catalog);
    auto emit = [&](const std::string& lib, ChangeEvent::Kind kind) {
      events.push_back({lineage.app_id, prev.version_code, next.version_code,
                        lib, kind});
    };
    for (const auto& lib : next_libs)
      if (!prev_libs.count(lib)) emit(lib, ChangeEvent::Kind::LibraryAdded);
    for (const auto& lib : prev_libs) {
      if (!next_libs.count(lib)) {
        emit(lib, ChangeEvent::Kind::LibraryRemoved);
        continue;
      }
      if (library_version_changed(prev, next, lib, catalog))
        emit(lib, ChangeEvent::Kind::LibraryVersionChanged);
      if (call_site_modified(prev, next, lib, catalog))
        emit(lib, ChangeEvent::Kind::AdCallSiteModified);
    }
  }
  return events;
}

LineageMetrics lineage_metrics(const AppLineage& lineage,
                               const AdLibraryCatalog& catalog) {
  LineageMetrics m;
  m.app_id = lineage.app_id;
  m.strategy = classify_strategy(lineage.latest(), catalog).strategy;
  m.add_remove_ratio = add_remove_ratio(lineage, catalog);
  if (lineage.updates.size() >= 2) {
    m.modification_probability = modification_probability(lineage, catalog);
    auto [when_updated, when_stable] =
        modified_proportion_split(lineage, catalog);
    m.modified_pct_when_lib_updated = when_updated;
    m.modified_pct_when_lib_not_updated = when_stable;
  }
  return m;
}

std::pair<double, double> obfuscation_stats(const AppUpdate& update) {
  std::set<std::string> packages;
  int obf_packages = 0;
  std::int64_t methods = 0, obf_methods = 0;
  for (const auto& [fqn, cls] : update.classes) {
    if (packages.insert(cls.package_path).second) {
      bool obf = false;
      std::string seg;
      for (char c : cls.package_path) {
        if (c == '.') {
          if (is_obfuscated_name(seg)) obf = true;
          seg.clear();
        } else {
          seg.push_back(c);
        }
      }
      if (!seg.empty() && is_obfuscated_name(seg)) obf = true;
      if (obf) ++obf_packages;
    }
    for (const auto& m : cls.declared_methods) {
      ++methods;
      if (is_obfuscated_name(m.method_name)) ++obf_methods;
    }
  }
  auto pct = [](std::int64_t num, std::int64_t den) {
    return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) /
                                static_cast<double>(den);
  };
  return {pct(obf_packages, static_cast<std::int64_t>(packages.size())),
          pct(obf_methods, methods)};
}

}  // namespace adlens
