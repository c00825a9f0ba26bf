#include <algorithm>
#include <fstream>
#include <vector>

#include "adlens/errors.hpp"
#include "adlens/frontend.hpp"

namespace adlens {
namespace {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

bool is_dex_name(const std::string& name) {
  return name.size() >= 11 && name.rfind("classes", 0) == 0 &&
         name.size() - name.rfind(".dex") == 4;
}

// classes.dex first, then classes2.dex, classes3.dex, ... numerically
int dex_order(const std::string& name) {
  std::string mid = name.substr(7, name.size() - 11);
  if (mid.empty()) return 1;
  try {
    return std::stoi(mid);
  } catch (const std::exception&) {
    return 1 << 30;
  }
}

bool dir_has_native_libs(const fs::path& dir) {
  fs::path lib = dir / "lib";
  if (!fs::is_directory(lib)) return false;
  for (const auto& e : fs::recursive_directory_iterator(lib))
    if (e.is_regular_file() && e.path().extension() == ".so") return true;
  return false;
}

}  // namespace

AppUpdate parse_update_dir(const fs::path& dir, const UpdateDirMeta& meta,
                           const DexOptions& options,
                           std::vector<std::string>* warnings) {
  AppUpdate update;
  update.app_id = meta.app_id;
  update.version_code = meta.version_code;
  update.observed_at = meta.observed_at;
  update.category = meta.category;
  update.download_count = meta.download_count;

  std::vector<fs::path> dex_files;
  fs::path manifest_path;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string name = e.path().filename().string();
    if (is_dex_name(name)) dex_files.push_back(e.path());
    if (name == "AndroidManifest.xml") manifest_path = e.path();
  }
  if (dex_files.empty())
    throw NoDexFound("no classes*.dex in " + dir.string());
  std::sort(dex_files.begin(), dex_files.end(),
            [](const fs::path& a, const fs::path& b) {
              int oa = dex_order(a.filename().string());
              int ob = dex_order(b.filename().string());
              return oa != ob ? oa < ob : a < b;
            });

  for (const auto& dex : dex_files) {
    std::vector<std::uint8_t> bytes = read_file(dex);
    for (ClassRecord& c : parse_dex(bytes, options)) {
      std::string fqn = c.fqn;
      if (!update.classes.emplace(fqn, std::move(c)).second && warnings)
        warnings->push_back("duplicate class '" + fqn + "' in " +
                            dex.filename().string() + " (first wins)");
    }
  }

  if (!manifest_path.empty()) {
    std::vector<std::uint8_t> bytes = read_file(manifest_path);
    ManifestInfo info = parse_manifest(bytes);
    update.activities.insert(info.activities.begin(), info.activities.end());
  } else if (warnings) {
    warnings->push_back("no AndroidManifest.xml in " + dir.string());
  }

  update.has_native_code = dir_has_native_libs(dir);
  return update;
}

}  // namespace adlens
