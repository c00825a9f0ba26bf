#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace adlens {

// A reference to a method by owner class, name and parameter count.
// Owner classes use the dotted canonical form (com.foo.Bar); DEX descriptor
// form is converted at the frontend boundary. Inner classes keep the `$` in
// the simple name (a.b.C$D lives in package a.b).
struct MethodRef {
  std::string owner_class;
  std::string method_name;
  int param_count = 0;

  auto operator<=>(const MethodRef&) const = default;
};

// One invoke instruction: the containing method, the resolved target, and the
// position of the invoke within the caller's instruction stream. Ordinals are
// unique per caller within a ClassRecord.
struct CallSite {
  MethodRef caller;
  MethodRef callee;
  int ordinal = 0;

  auto operator<=>(const CallSite&) const = default;
};

// One bytecode class: fully qualified dotted name, declared methods, and all
// outgoing call sites found in its method bodies.
struct ClassRecord {
  std::string fqn;
  std::string package_path;
  std::vector<MethodRef> declared_methods;
  std::vector<CallSite> call_sites;

  bool operator==(const ClassRecord&) const = default;
};

// One deployed version of an app. Classes are keyed by fqn so iteration order
// is deterministic. Activities may reference classes absent from `classes`;
// loaders flag that but tolerate it.
struct AppUpdate {
  std::string app_id;
  std::int64_t version_code = 0;
  std::int64_t observed_at = 0;  // UTC seconds; metadata only
  std::string category;
  std::int64_t download_count = 0;
  std::map<std::string, ClassRecord> classes;
  std::set<std::string> activities;
  bool has_native_code = false;

  bool operator==(const AppUpdate&) const = default;
};

// All observed updates of one app, strictly ordered by version_code.
struct AppLineage {
  std::string app_id;
  std::vector<AppUpdate> updates;

  const AppUpdate& latest() const { return updates.back(); }

  bool operator==(const AppLineage&) const = default;
};

struct Corpus {
  std::map<std::string, AppLineage> lineages;

  bool operator==(const Corpus&) const = default;
};

// Everything before the last dot; single-segment names yield "".
std::string package_of(std::string_view fqn);

// Everything after the last dot (the whole name if there is no dot).
std::string simple_name_of(std::string_view fqn);

// True when fqn lies under the dotted prefix: fqn == prefix or fqn starts
// with prefix + ".".
bool under_prefix(std::string_view fqn, std::string_view prefix);

}  // namespace adlens
