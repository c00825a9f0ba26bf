#include "adlens/corpus_io.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"

namespace adlens {
namespace {

using nlohmann::json;

json header_json(const AppUpdate& u) {
  json activities = json::array();
  for (const auto& a : u.activities) activities.push_back(a);
  return json{{"ir", "v1"},
              {"app_id", u.app_id},
              {"version_code", u.version_code},
              {"observed_at", u.observed_at},
              {"category", u.category},
              {"download_count", u.download_count},
              {"activities", activities},
              {"has_native_code", u.has_native_code}};
}

json class_json(const ClassRecord& c) {
  json methods = json::array();
  for (const auto& m : c.declared_methods)
    methods.push_back(json::array({m.method_name, m.param_count}));
  json calls = json::array();
  for (const auto& s : c.call_sites)
    calls.push_back(json::array({s.caller.method_name, s.caller.param_count,
                                 s.callee.owner_class, s.callee.method_name,
                                 s.callee.param_count, s.ordinal}));
  return json{{"fqn", c.fqn}, {"methods", methods}, {"calls", calls}};
}

ClassRecord class_from_json(const json& j, const std::string& origin) {
  ClassRecord c;
  c.fqn = j.at("fqn").get<std::string>();
  c.package_path = package_of(c.fqn);
  for (const auto& m : j.at("methods"))
    c.declared_methods.push_back(
        {c.fqn, m.at(0).get<std::string>(), m.at(1).get<int>()});
  for (const auto& s : j.at("calls")) {
    CallSite cs;
    cs.caller = {c.fqn, s.at(0).get<std::string>(), s.at(1).get<int>()};
    cs.callee = {s.at(2).get<std::string>(), s.at(3).get<std::string>(),
                 s.at(4).get<int>()};
    cs.ordinal = s.at(5).get<int>();
    c.call_sites.push_back(std::move(cs));
  }
  (void)origin;
  return c;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// app.meta: key=value lines. Plain keys give app-wide defaults, keys suffixed
// with ".<version_code>" override per update.
struct AppMeta {
  std::map<std::string, std::string> values;

  std::string get(const std::string& key, std::int64_t version,
                  const std::string& fallback) const {
    auto it = values.find(key + "." + std::to_string(version));
    if (it != values.end()) return it->second;
    it = values.find(key);
    if (it != values.end()) return it->second;
    return fallback;
  }
};

AppMeta parse_app_meta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MalformedLayout("missing metadata file: " + path.string());
  AppMeta meta;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw MalformedLayout("bad app.meta line in " + path.string() + ": " +
                            line);
    meta.values[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return meta;
}

std::int64_t to_i64(const std::string& s, const std::string& context) {
  try {
    size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw MalformedLayout("expected integer for " + context + ", got '" + s +
                          "'");
  }
}

struct UpdateTask {
  std::string app_id;
  std::filesystem::path dir;
  std::int64_t dir_version;
  bool is_ir;
};

AppUpdate run_task(const UpdateTask& t, const AppMeta& meta,
                   const LoadOptions& options,
                   std::vector<std::string>* warnings) {
  if (t.is_ir) {
    AppUpdate u = load_ir(t.dir / "update.ir.jsonl");
    if (u.app_id != t.app_id && warnings)
      warnings->push_back("ir header app_id '" + u.app_id +
                          "' differs from directory app '" + t.app_id + "'");
    u.app_id = t.app_id;
    return u;
  }
  UpdateDirMeta m;
  m.app_id = t.app_id;
  m.version_code = t.dir_version;
  m.category = meta.get("category", t.dir_version, "unknown");
  std::string dl = meta.get("download_count", t.dir_version, "0");
  m.download_count = to_i64(dl, t.app_id + " download_count");
  std::string obs = meta.get("observed_at", t.dir_version, "0");
  m.observed_at = to_i64(obs, t.app_id + " observed_at");
  DexOptions dex_opts;
  dex_opts.verify_checksum = options.verify_checksum;
  return parse_update_dir(t.dir, m, dex_opts, warnings);
}

}  // namespace

void store_ir(const AppUpdate& update, std::ostream& out) {
  out << header_json(update).dump() << '\n';
  for (const auto& [fqn, cls] : update.classes)
    out << class_json(cls).dump() << '\n';
}

void store_ir(const AppUpdate& update, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for write: " + path.string());
  store_ir(update, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

AppUpdate load_ir(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line))
    throw MalformedLayout("empty ir file: " + origin);
  AppUpdate u;
  try {
    json h = json::parse(line);
    if (h.at("ir").get<std::string>() != "v1")
      throw MalformedLayout("unsupported ir schema in " + origin);
    u.app_id = h.at("app_id").get<std::string>();
    u.version_code = h.at("version_code").get<std::int64_t>();
    u.observed_at = h.at("observed_at").get<std::int64_t>();
    u.category = h.at("category").get<std::string>();
    u.download_count = h.at("download_count").get<std::int64_t>();
    for (const auto& a : h.at("activities"))
      u.activities.insert(a.get<std::string>());
    u.has_native_code = h.at("has_native_code").get<bool>();
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      ClassRecord c = class_from_json(json::parse(line), origin);
      std::string fqn = c.fqn;
      if (!u.classes.emplace(fqn, std::move(c)).second)
        throw MalformedLayout("duplicate class '" + fqn + "' in " + origin);
    }
  } catch (const json::exception& e) {
    throw MalformedLayout("bad ir json in " + origin + ": " + e.what());
  }
  return u;
}

AppUpdate load_ir(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return load_ir(in, path.string());
}

Corpus load_corpus(const std::filesystem::path& root,
                   const LoadOptions& options,
                   std::vector<std::string>* warnings) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root))
    throw MalformedLayout("corpus root is not a directory: " + root.string());

  struct AppEntry {
    std::string app_id;
    AppMeta meta;
    std::vector<UpdateTask> tasks;
  };
  std::vector<AppEntry> apps;
  std::vector<fs::path> app_dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) app_dirs.push_back(e.path());
  std::sort(app_dirs.begin(), app_dirs.end());

  for (const auto& app_dir : app_dirs) {
    AppEntry app;
    app.app_id = app_dir.filename().string();
    app.meta = parse_app_meta(app_dir / "app.meta");
    std::vector<fs::path> update_dirs;
    for (const auto& e : fs::directory_iterator(app_dir))
      if (e.is_directory()) update_dirs.push_back(e.path());
    std::sort(update_dirs.begin(), update_dirs.end());
    for (const auto& d : update_dirs) {
      UpdateTask t;
      t.app_id = app.app_id;
      t.dir = d;
      t.dir_version = to_i64(d.filename().string(),
                             app.app_id + " update directory name");
      t.is_ir = fs::exists(d / "update.ir.jsonl");
      app.tasks.push_back(std::move(t));
    }
    if (app.tasks.empty())
      throw MalformedLayout("app '" + app.app_id + "' has no update dirs");
    apps.push_back(std::move(app));
  }

  // Flatten for the parallel pass; results land in fixed slots so the merge
  // below is order-independent.
  struct Slot {
    AppUpdate update;
    std::vector<std::string> warnings;
  };
  std::vector<const UpdateTask*> flat;
  std::vector<const AppMeta*> flat_meta;
  for (const auto& app : apps)
    for (const auto& t : app.tasks) {
      flat.push_back(&t);
      flat_meta.push_back(&app.meta);
    }
  std::vector<Slot> slots(flat.size());

  auto worker = [&](size_t i) {
    slots[i].update =
        run_task(*flat[i], *flat_meta[i], options, &slots[i].warnings);
  };
  int par = std::max(1, options.parallelism);
  if (par == 1 || flat.size() < 2) {
    for (size_t i = 0; i < flat.size(); ++i) worker(i);
  } else {
    std::atomic<size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mu;
    auto loop = [&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= flat.size()) return;
        try {
          worker(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    for (int t = 0; t < par; ++t) threads.emplace_back(loop);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  Corpus corpus;
  size_t slot = 0;
  for (const auto& app : apps) {
    AppLineage lineage;
    lineage.app_id = app.app_id;
    for (size_t k = 0; k < app.tasks.size(); ++k, ++slot) {
      if (warnings)
        warnings->insert(warnings->end(), slots[slot].warnings.begin(),
                         slots[slot].warnings.end());
      lineage.updates.push_back(std::move(slots[slot].update));
    }
    std::sort(lineage.updates.begin(), lineage.updates.end(),
              [](const AppUpdate& a, const AppUpdate& b) {
                return a.version_code < b.version_code;
              });
    for (size_t k = 1; k < lineage.updates.size(); ++k)
      if (lineage.updates[k].version_code ==
          lineage.updates[k - 1].version_code)
        throw DuplicateVersion(
            "app '" + app.app_id + "' has two updates with version_code " +
            std::to_string(lineage.updates[k].version_code));
    if (warnings) {
      for (const auto& u : lineage.updates)
        for (const auto& a : u.activities)
          if (!u.classes.count(a))
            warnings->push_back("app '" + app.app_id + "' v" +
                                std::to_string(u.version_code) +
                                ": activity '" + a + "' has no class record");
    }
    corpus.lineages.emplace(app.app_id, std::move(lineage));
  }
  return corpus;
}

}  // namespace adlens
