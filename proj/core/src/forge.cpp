#include "adlens/forge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "adlens/corpus_io.hpp"
#include "adlens/errors.hpp"
#include "adlens/rng.hpp"

namespace adlens {
namespace {

using nlohmann::json;

class InfeasibleSpec : public Error {
 public:
  explicit InfeasibleSpec(const std::string& what)
      : Error("InfeasibleSpec", what) {}
};

const std::vector<std::string> kCategories = {
    "Tools",  "Game",    "Weather", "Photography",
    "Sports", "Finance", "Music",   "Travel",
};

// Includes deliberate regex traps ("ImageLoad", "Gradient", "ThreadPool") so
// catalog filtering gets exercised.
const std::vector<std::string> kAppWords = {
    "orbit", "pixel", "mango", "river", "falcon", "ember", "quartz", "nimbus",
};
const std::vector<std::string> kTrapClasses = {
    "ImageLoad", "GradientView", "ThreadPool", "BreadCrumb", "ShadowLayer",
};

struct LibParts {
  const AdLibraryEntry* entry = nullptr;
  std::string main_class;     // declares the show method
  std::string show_method;
  int show_params = 0;
  std::string internal_class;  // never called from outside the library
};

LibParts lib_parts(const AdLibraryEntry& entry) {
  LibParts p;
  p.entry = &entry;
  const std::string& prefix = entry.package_prefixes.front();
  const ShowAdPattern& pat = entry.show_ad_methods.front();
  // The show class must live under the show pattern's owner prefix, which can
  // be deeper than the package prefix (com.mopub vs com.mopub.mobileads).
  p.main_class = pat.owner_prefix + ".Interstitial";
  p.show_method = pat.method_name;
  p.show_params = pat.param_count < 0 ? 0 : pat.param_count;
  p.internal_class = prefix + ".internal.Core";
  return p;
}

ClassRecord& ensure_class(AppUpdate& u, const std::string& fqn) {
  auto it = u.classes.find(fqn);
  if (it == u.classes.end()) {
    ClassRecord c;
    c.fqn = fqn;
    c.package_path = package_of(fqn);
    it = u.classes.emplace(fqn, std::move(c)).first;
  }
  return it->second;
}

void declare_method(AppUpdate& u, const std::string& fqn,
                    const std::string& name, int params) {
  ClassRecord& c = ensure_class(u, fqn);
  MethodRef m{fqn, name, params};
  if (std::find(c.declared_methods.begin(), c.declared_methods.end(), m) ==
      c.declared_methods.end())
    c.declared_methods.push_back(m);
}

void add_call(AppUpdate& u, const std::string& caller_fqn,
              const std::string& caller_method, int caller_params,
              const std::string& callee_fqn, const std::string& callee_method,
              int callee_params) {
  declare_method(u, caller_fqn, caller_method, caller_params);
  ClassRecord& c = u.classes.at(caller_fqn);
  CallSite cs;
  cs.caller = {caller_fqn, caller_method, caller_params};
  cs.callee = {callee_fqn, callee_method, callee_params};
  cs.ordinal = static_cast<int>(c.call_sites.size());
  c.call_sites.push_back(std::move(cs));
}

void add_library_classes(AppUpdate& u, const LibParts& lib) {
  declare_method(u, lib.main_class, lib.show_method, lib.show_params);
  declare_method(u, lib.main_class, "load", 1);
  declare_method(u, lib.internal_class, "init", 0);
  declare_method(u, lib.internal_class, "render", 1);
}

void remove_library(AppUpdate& u, const AdLibraryEntry& entry) {
  for (auto it = u.classes.begin(); it != u.classes.end();) {
    if (entry.owns(it->first)) {
      it = u.classes.erase(it);
      continue;
    }
    auto& sites = it->second.call_sites;
    sites.erase(std::remove_if(sites.begin(), sites.end(),
                               [&entry](const CallSite& cs) {
                                 return entry.owns(cs.callee.owner_class);
                               }),
                sites.end());
    ++it;
  }
}

// largest-remainder apportionment; keys in input order
template <typename Key>
std::vector<std::pair<Key, int>> apportion(
    const std::vector<std::pair<Key, double>>& mix, int total) {
  std::vector<std::pair<Key, int>> counts;
  std::vector<std::pair<double, size_t>> remainders;
  int assigned = 0;
  for (size_t i = 0; i < mix.size(); ++i) {
    double exact = mix[i].second * total;
    int base = static_cast<int>(std::floor(exact));
    counts.emplace_back(mix[i].first, base);
    remainders.emplace_back(exact - base, i);
    assigned += base;
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int i = 0; i < total - assigned && i < static_cast<int>(mix.size()); ++i)
    ++counts[remainders[static_cast<size_t>(i)].second].second;
  return counts;
}

std::string role_name(AppRole r) { return to_string(r); }

AppRole role_from_name(const std::string& s) {
  for (AppRole r : {AppRole::AdDisplaying, AppRole::NonIntegrating,
                    AppRole::AnalyticsOnly, AppRole::InertAdCode})
    if (to_string(r) == s) return r;
  throw Error("BadArgument", "unknown role '" + s + "'");
}

IntegrationStrategy strategy_from_name(const std::string& s) {
  for (IntegrationStrategy st :
       {IntegrationStrategy::ExternalMediation, IntegrationStrategy::SelfMediation,
        IntegrationStrategy::Scattered, IntegrationStrategy::Mixed,
        IntegrationStrategy::SingleLibrary, IntegrationStrategy::NotAdDisplaying,
        IntegrationStrategy::Unclassifiable})
    if (to_string(st) == s) return st;
  throw Error("BadArgument", "unknown strategy '" + s + "'");
}

struct AppPlan {
  std::string app_id;
  AppRole role;
  IntegrationStrategy strategy;  // meaningful when role == AdDisplaying
};

// Per-app construction state shared between the base build and transitions.
struct AppBuilder {
  const AdLibraryCatalog* catalog = nullptr;
  std::string base_pkg;
  std::vector<std::string> activities;
  std::vector<LibParts> base_libs;        // always present
  const AdLibraryEntry* toggle_lib = nullptr;
  const AdLibraryEntry* evo_target = nullptr;  // modification/version target
  IntegrationStrategy strategy = IntegrationStrategy::NotAdDisplaying;
  AppRole role = AppRole::NonIntegrating;
  std::string self_mediator_class;  // SelfMediation only
  int next_mod_seq = 0;
  int next_ver_seq = 0;

  std::string mod_caller() const {
    if (strategy == IntegrationStrategy::SelfMediation)
      return self_mediator_class;
    return activities.front();
  }

  void apply_modification(AppUpdate& u) {
    // one new app-code call-site tuple into the target library
    add_call(u, mod_caller(), "onAdEvent", 1,
             lib_parts(*evo_target).main_class, "extra", next_mod_seq++);
  }

  void apply_version_change(AppUpdate& u) {
    declare_method(u, lib_parts(*evo_target).internal_class,
                   "v" + std::to_string(next_ver_seq++), 0);
  }

  void apply_toggle(AppUpdate& u, bool now_present) {
    if (!now_present) {
      remove_library(u, *toggle_lib);
      return;
    }
    LibParts t = lib_parts(*toggle_lib);
    add_library_classes(u, t);
    // keep accessed == integrated for strategies that require it
    if (strategy == IntegrationStrategy::SelfMediation) {
      add_call(u, self_mediator_class, "serve", 0, t.main_class,
               t.show_method, t.show_params);
    } else if (strategy == IntegrationStrategy::Scattered) {
      add_call(u, activities[0], "onCreate", 1, t.main_class, t.show_method,
               t.show_params);
      add_call(u, activities[1], "onResume", 0, t.main_class, t.show_method,
               t.show_params);
    }
  }
};

}  // namespace

void FixtureSpec::validate(const AdLibraryCatalog& catalog) const {
  if (app_count <= 0) throw InfeasibleSpec("app_count must be positive");
  if (updates_min < 1 || updates_max < updates_min)
    throw InfeasibleSpec("bad updates_per_app range");
  for (double rate : {seeded_modification_rate, seeded_add_remove_rate,
                      seeded_version_change_rate})
    if (rate < 0 || rate > 1) throw InfeasibleSpec("rates must be in [0,1]");
  auto check_sum = [](double sum, const char* what) {
    if (std::fabs(sum - 1.0) > 1e-9)
      throw InfeasibleSpec(std::string(what) + " must sum to 1");
  };
  if (!role_mix.empty()) {
    double s = 0;
    for (const auto& [k, v] : role_mix) s += v;
    check_sum(s, "role_mix");
  }
  if (!strategy_mix.empty()) {
    double s = 0;
    for (const auto& [k, v] : strategy_mix) {
      s += v;
      if (k == IntegrationStrategy::NotAdDisplaying ||
          k == IntegrationStrategy::Unclassifiable)
        throw InfeasibleSpec("strategy_mix keys must be realizable strategies");
    }
    check_sum(s, "strategy_mix");
  }
  std::vector<const AdLibraryEntry*> pool;
  for (const auto& name : library_pool) {
    const AdLibraryEntry* e = catalog.entry(name);
    if (!e) throw InfeasibleSpec("library_pool entry '" + name +
                                 "' not in catalog");
    pool.push_back(e);
  }
  if (pool.empty())
    for (const auto& e : catalog.entries) pool.push_back(&e);
  bool has_mediator = false;
  for (const auto* e : pool)
    if (!e->mediator_prefixes.empty()) has_mediator = true;
  bool needs_mediator =
      strategy_mix.count(IntegrationStrategy::ExternalMediation) ||
      strategy_mix.count(IntegrationStrategy::Mixed);
  if (needs_mediator && !has_mediator)
    throw InfeasibleSpec(
        "external/mixed strategies need a mediator-bearing library in the pool");
  if (pool.size() < 2 && !strategy_mix.empty() &&
      !(strategy_mix.size() == 1 &&
        strategy_mix.count(IntegrationStrategy::SingleLibrary)))
    throw InfeasibleSpec("multi-library strategies need a pool of >= 2");
  for (const auto* e : pool)
    if (e->show_ad_methods.empty())
      throw InfeasibleSpec("pool library '" + e->name +
                           "' has no show-ad method");
}

ForgeResult generate(const FixtureSpec& spec, const AdLibraryCatalog& catalog) {
  spec.validate(catalog);

  std::vector<const AdLibraryEntry*> pool;
  for (const auto& name : spec.library_pool) pool.push_back(catalog.entry(name));
  if (pool.empty())
    for (const auto& e : catalog.entries) pool.push_back(&e);
  std::vector<const AdLibraryEntry*> mediator_pool;
  for (const auto* e : pool)
    if (!e->mediator_prefixes.empty()) mediator_pool.push_back(e);

  // role and strategy allocation
  std::vector<std::pair<AppRole, double>> role_mix;
  if (spec.role_mix.empty()) {
    role_mix = {{AppRole::AdDisplaying, 1.0}};
  } else {
    for (const auto& [k, v] : spec.role_mix) role_mix.emplace_back(k, v);
  }
  std::vector<AppRole> roles;
  for (const auto& [role, count] : apportion(role_mix, spec.app_count))
    roles.insert(roles.end(), static_cast<size_t>(count), role);

  int ad_displaying =
      static_cast<int>(std::count(roles.begin(), roles.end(),
                                  AppRole::AdDisplaying));
  std::vector<std::pair<IntegrationStrategy, double>> strategy_mix;
  if (spec.strategy_mix.empty()) {
    strategy_mix = {{IntegrationStrategy::SingleLibrary, 1.0}};
  } else {
    for (const auto& [k, v] : spec.strategy_mix) strategy_mix.emplace_back(k, v);
  }
  std::vector<IntegrationStrategy> strategies;
  for (const auto& [s, count] : apportion(strategy_mix, ad_displaying))
    strategies.insert(strategies.end(), static_cast<size_t>(count), s);

  ForgeResult result;
  size_t strategy_i = 0;
  for (int i = 0; i < spec.app_count; ++i) {
    Rng rng(spec.seed ^ (0x517cc1b727220a95ull * (static_cast<std::uint64_t>(i) + 1)));
    AppPlan plan;
    char id[64];
    std::snprintf(id, sizeof(id), "app.fixture.%04d", i);
    plan.app_id = id;
    plan.role = roles[static_cast<size_t>(i)];
    plan.strategy = plan.role == AppRole::AdDisplaying
                        ? strategies[strategy_i++]
                        : IntegrationStrategy::NotAdDisplaying;

    AppBuilder b;
    b.catalog = &catalog;
    b.role = plan.role;
    b.strategy = plan.strategy;
    b.base_pkg = "com." + rng.pick(kAppWords) + rng.pick(kAppWords);

    AppUpdate state;
    state.app_id = plan.app_id;
    state.version_code = 100;
    state.observed_at = 1500000000 + i * 86400;
    state.category = kCategories[rng.below(kCategories.size())];
    state.download_count = static_cast<std::int64_t>(
        std::pow(10.0, rng.range(2, 8)) * rng.range(1, 9));

    // screens + trap classes
    for (const char* name : {"MainActivity", "GalleryActivity", "PlayerActivity"}) {
      std::string fqn = b.base_pkg + ".ui." + name;
      b.activities.push_back(fqn);
      declare_method(state, fqn, "onCreate", 1);
      state.activities.insert(fqn);
    }
    for (size_t k = 0; k < 2; ++k) {
      std::string fqn = b.base_pkg + ".util." + rng.pick(kTrapClasses);
      declare_method(state, fqn, "run", 0);
    }
    add_call(state, b.activities[0], "onCreate", 1,
             b.base_pkg + ".util." + kTrapClasses[0], "run", 0);

    auto pick_libs = [&](int count, bool need_mediator,
                         const AdLibraryEntry* exclude =
                             nullptr) -> std::vector<const AdLibraryEntry*> {
      std::vector<const AdLibraryEntry*> from;
      for (const auto* e : need_mediator ? mediator_pool : pool)
        if (e != exclude) from.push_back(e);
      if (from.empty()) throw InfeasibleSpec("library pool exhausted");
      std::vector<const AdLibraryEntry*> chosen;
      std::vector<size_t> idx =
          rng.sample_indices(from.size(),
                             static_cast<size_t>(std::min<int>(
                                 count, static_cast<int>(from.size()))));
      for (size_t k : idx) chosen.push_back(from[k]);
      return chosen;
    };

    switch (plan.role) {
      case AppRole::NonIntegrating:
        break;
      case AppRole::AnalyticsOnly: {
        const AdLibraryEntry* admob = catalog.entry("Google AdMob");
        if (!admob || admob->identifier_prefixes.empty())
          throw InfeasibleSpec("AnalyticsOnly apps need the AdMob entry");
        LibParts p = lib_parts(*admob);
        add_library_classes(state, p);
        b.base_libs.push_back(p);
        b.evo_target = admob;
        std::string id_class =
            admob->identifier_prefixes.front() + ".AdvertisingIdClient";
        declare_method(state, id_class, "getAdvertisingIdInfo", 1);
        std::string tracker = "com.google.android.gms.analytics.Tracker";
        add_call(state, tracker, "collect", 0, id_class,
                 "getAdvertisingIdInfo", 1);
        break;
      }
      case AppRole::InertAdCode: {
        for (const auto* e : pick_libs(rng.range(1, 2), false)) {
          LibParts p = lib_parts(*e);
          add_library_classes(state, p);
          b.base_libs.push_back(p);
        }
        b.evo_target = b.base_libs.front().entry;
        break;
      }
      case AppRole::AdDisplaying: {
        auto show_call = [&](const std::string& caller,
                             const std::string& method, int params,
                             const LibParts& lib) {
          add_call(state, caller, method, params, lib.main_class,
                   lib.show_method, lib.show_params);
        };
        switch (plan.strategy) {
          case IntegrationStrategy::SingleLibrary: {
            LibParts lib = lib_parts(*pick_libs(1, false).front());
            add_library_classes(state, lib);
            b.base_libs.push_back(lib);
            show_call(b.activities[0], "onCreate", 1, lib);
            b.evo_target = lib.entry;
            break;
          }
          case IntegrationStrategy::ExternalMediation:
          case IntegrationStrategy::Mixed: {
            const AdLibraryEntry* primary = pick_libs(1, true).front();
            LibParts plib = lib_parts(*primary);
            add_library_classes(state, plib);
            b.base_libs.push_back(plib);
            std::string mediator_class =
                primary->mediator_prefixes.front() + ".Adapter";
            declare_method(state, mediator_class, "route", 0);
            int covered_n = rng.range(1, 2);
            for (const auto* e : pick_libs(covered_n, false, primary)) {
              LibParts c = lib_parts(*e);
              add_library_classes(state, c);
              b.base_libs.push_back(c);
              add_call(state, mediator_class, "route", 0, c.main_class,
                       "load", 1);
            }
            show_call(b.activities[0], "onCreate", 1, plib);
            add_call(state, b.activities[0], "onCreate", 1, mediator_class,
                     "route", 0);
            if (plan.strategy == IntegrationStrategy::Mixed) {
              // one extra library wired directly from a second screen
              std::vector<const AdLibraryEntry*> taken;
              for (const auto& lp : b.base_libs) taken.push_back(lp.entry);
              const AdLibraryEntry* direct = nullptr;
              for (const auto* e : pool)
                if (std::find(taken.begin(), taken.end(), e) == taken.end()) {
                  direct = e;
                  break;
                }
              if (!direct)
                throw InfeasibleSpec("mixed strategy needs a spare library");
              LibParts d = lib_parts(*direct);
              add_library_classes(state, d);
              b.base_libs.push_back(d);
              show_call(b.activities[1], "onResume", 0, d);
            }
            b.evo_target = primary;
            break;
          }
          case IntegrationStrategy::SelfMediation: {
            b.self_mediator_class = b.base_pkg + ".adsupport.AdBridge";
            declare_method(state, b.self_mediator_class, "serve", 0);
            for (const auto* e : pick_libs(rng.range(2, 4), false)) {
              LibParts lib = lib_parts(*e);
              add_library_classes(state, lib);
              b.base_libs.push_back(lib);
              show_call(b.self_mediator_class, "serve", 0, lib);
            }
            for (const auto& a : b.activities)
              add_call(state, a, "onCreate", 1, b.self_mediator_class,
                       "serve", 0);
            b.evo_target = b.base_libs.front().entry;
            break;
          }
          case IntegrationStrategy::Scattered: {
            for (const auto* e : pick_libs(rng.range(2, 3), false)) {
              LibParts lib = lib_parts(*e);
              add_library_classes(state, lib);
              b.base_libs.push_back(lib);
              show_call(b.activities[0], "onCreate", 1, lib);
              show_call(b.activities[1], "onResume", 0, lib);
            }
            b.evo_target = b.base_libs.front().entry;
            break;
          }
          default:
            throw InfeasibleSpec("unrealizable strategy in mix");
        }
        break;
      }
    }

    // transition planning: events are enumerated, never sampled post hoc
    int updates = rng.range(spec.updates_min, spec.updates_max);
    int transitions = updates - 1;
    auto exact_count = [transitions](double rate) {
      return static_cast<int>(std::llround(rate * transitions));
    };
    bool can_modify =
        plan.role == AppRole::AdDisplaying && b.evo_target != nullptr;
    bool can_version = b.evo_target != nullptr;
    bool can_toggle =
        plan.role == AppRole::AdDisplaying &&
        plan.strategy != IntegrationStrategy::SingleLibrary &&
        b.base_libs.size() < pool.size();
    std::vector<size_t> mod_idx, ver_idx, tog_idx;
    if (transitions > 0) {
      if (can_modify)
        mod_idx = rng.sample_indices(
            static_cast<size_t>(transitions),
            static_cast<size_t>(exact_count(spec.seeded_modification_rate)));
      if (can_version)
        ver_idx = rng.sample_indices(
            static_cast<size_t>(transitions),
            static_cast<size_t>(exact_count(spec.seeded_version_change_rate)));
      if (can_toggle) {
        int want = static_cast<int>(
            std::llround(spec.seeded_add_remove_rate * updates));
        tog_idx = rng.sample_indices(static_cast<size_t>(transitions),
                                     static_cast<size_t>(
                                         std::min(want, transitions)));
      }
    }
    if (can_toggle && !tog_idx.empty()) {
      std::vector<const AdLibraryEntry*> taken;
      for (const auto& lp : b.base_libs) taken.push_back(lp.entry);
      for (const auto* e : pool)
        if (std::find(taken.begin(), taken.end(), e) == taken.end()) {
          b.toggle_lib = e;
          break;
        }
      if (!b.toggle_lib) tog_idx.clear();
    }

    GroundTruthLabel label;
    label.app_id = plan.app_id;
    label.role = plan.role;
    label.strategy = plan.strategy;
    label.update_count = updates;
    label.transitions.resize(static_cast<size_t>(std::max(0, transitions)));

    AppLineage lineage;
    lineage.app_id = plan.app_id;
    lineage.updates.push_back(state);

    bool toggle_present = false;
    int base_lib_count = static_cast<int>(b.base_libs.size());
    for (int t = 0; t < transitions; ++t) {
      bool modified =
          std::binary_search(mod_idx.begin(), mod_idx.end(),
                             static_cast<size_t>(t));
      bool versioned =
          std::binary_search(ver_idx.begin(), ver_idx.end(),
                             static_cast<size_t>(t));
      bool toggled =
          std::binary_search(tog_idx.begin(), tog_idx.end(),
                             static_cast<size_t>(t));
      bool toggle_was_present = toggle_present;

      if (modified) b.apply_modification(state);
      if (versioned) b.apply_version_change(state);
      if (toggled) {
        toggle_present = !toggle_present;
        b.apply_toggle(state, toggle_present);
      }
      state.version_code = 100 + t + 1;
      state.observed_at += 604800;
      lineage.updates.push_back(state);

      TransitionEvents& ev = label.transitions[static_cast<size_t>(t)];
      ev.call_site_modified = modified;
      ev.library_version_changed = versioned;
      ev.library_added = toggled && toggle_present;
      ev.library_removed = toggled && !toggle_present;

      if (modified) ++label.modified_transitions;
      if (toggled) ++label.add_remove_updates;
      // (library, transition) pairs: libraries present at both endpoints
      int libs_in_both =
          base_lib_count + ((toggle_was_present && toggle_present) ? 1 : 0);
      for (int l = 0; l < libs_in_both; ++l) {
        bool is_target = l == 0 && b.evo_target != nullptr;
        bool lib_versioned = is_target && versioned;
        bool lib_modified = is_target && modified;
        if (lib_versioned) {
          ++label.pairs_when_updated;
          if (lib_modified) ++label.modified_pairs_when_updated;
        } else {
          ++label.pairs_when_not_updated;
          if (lib_modified) ++label.modified_pairs_when_not_updated;
        }
      }
    }

    result.corpus.lineages.emplace(plan.app_id, std::move(lineage));
    result.labels.push_back(std::move(label));
  }
  return result;
}

void write_forge_output(const ForgeResult& result,
                        const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  for (const auto& [app_id, lineage] : result.corpus.lineages) {
    fs::path app_dir = root / app_id;
    fs::create_directories(app_dir);
    {
      std::ofstream meta(app_dir / "app.meta", std::ios::binary);
      if (!meta) throw IoError("cannot write app.meta for " + app_id);
      const AppUpdate& latest = lineage.updates.back();
      meta << "category=" << latest.category << "\n";
      meta << "download_count=" << latest.download_count << "\n";
    }
    for (const auto& u : lineage.updates) {
      fs::path dir = app_dir / std::to_string(u.version_code);
      fs::create_directories(dir);
      store_ir(u, dir / "update.ir.jsonl");
    }
  }
  std::ofstream gt(root / "groundtruth.jsonl", std::ios::binary);
  if (!gt) throw IoError("cannot write groundtruth.jsonl");
  for (const auto& label : result.labels) {
    json transitions = json::array();
    for (const auto& t : label.transitions)
      transitions.push_back(json{{"modified", t.call_site_modified},
                                 {"added", t.library_added},
                                 {"removed", t.library_removed},
                                 {"version_changed",
                                  t.library_version_changed}});
    gt << json{{"app_id", label.app_id},
               {"role", role_name(label.role)},
               {"strategy", to_string(label.strategy)},
               {"update_count", label.update_count},
               {"modified_transitions", label.modified_transitions},
               {"add_remove_updates", label.add_remove_updates},
               {"pairs_when_updated", label.pairs_when_updated},
               {"modified_pairs_when_updated",
                label.modified_pairs_when_updated},
               {"pairs_when_not_updated", label.pairs_when_not_updated},
               {"modified_pairs_when_not_updated",
                label.modified_pairs_when_not_updated},
               {"transitions", transitions}}
              .dump()
       << '\n';
  }
}

std::vector<GroundTruthLabel> load_ground_truth(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::vector<GroundTruthLabel> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    GroundTruthLabel label;
    label.app_id = j.at("app_id").get<std::string>();
    label.role = role_from_name(j.at("role").get<std::string>());
    label.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    label.update_count = j.at("update_count").get<int>();
    label.modified_transitions = j.at("modified_transitions").get<int>();
    label.add_remove_updates = j.at("add_remove_updates").get<int>();
    label.pairs_when_updated = j.at("pairs_when_updated").get<int>();
    label.modified_pairs_when_updated =
        j.at("modified_pairs_when_updated").get<int>();
    label.pairs_when_not_updated = j.at("pairs_when_not_updated").get<int>();
    label.modified_pairs_when_not_updated =
        j.at("modified_pairs_when_not_updated").get<int>();
    for (const auto& t : j.at("transitions")) {
      TransitionEvents ev;
      ev.call_site_modified = t.at("modified").get<bool>();
      ev.library_added = t.at("added").get<bool>();
      ev.library_removed = t.at("removed").get<bool>();
      ev.library_version_changed = t.at("version_changed").get<bool>();
      label.transitions.push_back(ev);
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

FixtureSpec parse_fixture_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fixture spec: " + path.string());
  FixtureSpec spec;
  std::string line;
  bool versioned = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto strip = [](std::string s) {
      auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      auto e = s.find_last_not_of(" \t\r");
      return s.substr(b, e - b + 1);
    };
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("BadFixtureSpec", "line " + std::to_string(lineno) +
                                        " has no '='");
    std::string key = strip(line.substr(0, eq));
    std::string value = strip(line.substr(eq + 1));
    try {
      if (key == "fixture") {
        if (value != "v1")
          throw Error("BadFixtureSpec", "unsupported fixture schema");
        versioned = true;
      } else if (key == "seed") {
        spec.seed = std::stoull(value);
      } else if (key == "app_count") {
        spec.app_count = std::stoi(value);
      } else if (key == "updates_min") {
        spec.updates_min = std::stoi(value);
      } else if (key == "updates_max") {
        spec.updates_max = std::stoi(value);
      } else if (key == "modification_rate") {
        spec.seeded_modification_rate = std::stod(value);
      } else if (key == "add_remove_rate") {
        spec.seeded_add_remove_rate = std::stod(value);
      } else if (key == "version_change_rate") {
        spec.seeded_version_change_rate = std::stod(value);
      } else if (key == "strategy_mix") {
        json j = json::parse(value);
        for (const auto& [k, v] : j.items())
          spec.strategy_mix[strategy_from_name(k)] = v.get<double>();
      } else if (key == "role_mix") {
        json j = json::parse(value);
        for (const auto& [k, v] : j.items())
          spec.role_mix[role_from_name(k)] = v.get<double>();
      } else if (key == "library_pool") {
        for (const auto& v : json::parse(value))
          spec.library_pool.push_back(v.get<std::string>());
      } else {
        throw Error("BadFixtureSpec", "unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument&) {
      throw Error("BadFixtureSpec", "bad value for '" + key + "'");
    } catch (const json::exception& e) {
      throw Error("BadFixtureSpec",
                  "bad json for '" + key + "': " + e.what());
    }
  }
  if (!versioned)
    throw Error("BadFixtureSpec", "missing 'fixture=v1' line");
  return spec;
}

AppUpdate mutate_update(const AppUpdate& update, Mutation mutation,
                        std::uint64_t seed, const AdLibraryCatalog& catalog) {
  Rng rng(seed);
  AppUpdate out = update;
  const auto& third_party = default_third_party_prefixes();
  switch (mutation) {
    case Mutation::AddCallSite: {
      std::vector<std::string> app_classes;
      for (const auto& [fqn, cls] : out.classes)
        if (is_app_code(fqn, catalog, third_party)) app_classes.push_back(fqn);
      std::set<std::string> libs = integrated_libraries(out, catalog);
      if (app_classes.empty() || libs.empty())
        throw Error("NotApplicable", "no app class or integrated library");
      std::vector<std::string> lib_names(libs.begin(), libs.end());
      const AdLibraryEntry* entry = catalog.entry(rng.pick(lib_names));
      std::string caller = rng.pick(app_classes);
      add_call(out, caller, "mutAdded", 0,
               entry->package_prefixes.front() + ".Interstitial", "mutCall",
               static_cast<int>(rng.below(1000)));
      return out;
    }
    case Mutation::RemoveCallSite: {
      std::vector<std::pair<std::string, size_t>> sites;
      for (const auto& [fqn, cls] : out.classes) {
        if (!is_app_code(fqn, catalog, third_party)) continue;
        for (size_t k = 0; k < cls.call_sites.size(); ++k)
          if (catalog.is_ad_library_class(
                  cls.call_sites[k].callee.owner_class))
            sites.emplace_back(fqn, k);
      }
      if (sites.empty())
        throw Error("NotApplicable", "no app-code ad call sites");
      auto [fqn, k] = sites[rng.below(sites.size())];
      auto& v = out.classes.at(fqn).call_sites;
      v.erase(v.begin() + static_cast<std::ptrdiff_t>(k));
      return out;
    }
    case Mutation::RenameLibraryInternal: {
      std::set<std::string> callees;
      for (const auto& [fqn, cls] : out.classes)
        for (const auto& cs : cls.call_sites)
          callees.insert(cs.callee.owner_class);
      std::vector<std::string> candidates;
      for (const auto& [fqn, cls] : out.classes)
        if (catalog.is_ad_library_class(fqn) && !callees.count(fqn))
          candidates.push_back(fqn);
      if (candidates.empty())
        throw Error("NotApplicable", "no uncalled library-internal class");
      std::string victim = rng.pick(candidates);
      ClassRecord c = out.classes.at(victim);
      out.classes.erase(victim);
      c.fqn = victim + "X";
      for (auto& m : c.declared_methods) m.owner_class = c.fqn;
      for (auto& cs : c.call_sites) cs.caller.owner_class = c.fqn;
      out.classes.emplace(c.fqn, std::move(c));
      return out;
    }
    case Mutation::AddLibrary: {
      std::set<std::string> libs = integrated_libraries(out, catalog);
      std::vector<const AdLibraryEntry*> absent;
      for (const auto& e : catalog.entries)
        if (!libs.count(e.name) && !e.show_ad_methods.empty())
          absent.push_back(&e);
      if (absent.empty())
        throw Error("NotApplicable", "every catalog library already present");
      LibParts p = lib_parts(*absent[rng.below(absent.size())]);
      add_library_classes(out, p);
      return out;
    }
    case Mutation::RemoveLibrary: {
      std::set<std::string> libs = integrated_libraries(out, catalog);
      if (libs.empty())
        throw Error("NotApplicable", "no integrated library to remove");
      std::vector<std::string> names(libs.begin(), libs.end());
      remove_library(out, *catalog.entry(rng.pick(names)));
      return out;
    }
  }
  throw Error("NotApplicable", "unknown mutation");
}

}  // namespace adlens
