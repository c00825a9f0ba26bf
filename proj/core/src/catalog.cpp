#include "adlens/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adlens/errors.hpp"

namespace adlens {
namespace {

using nlohmann::json;

class InvalidCatalog : public Error {
 public:
  explicit InvalidCatalog(const std::string& what)
      : Error("InvalidCatalog", what) {}
};

}  // namespace

const AdLibraryEntry* AdLibraryCatalog::entry(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::optional<std::string> AdLibraryCatalog::owner_of(
    std::string_view fqn) const {
  for (const auto& e : entries)
    if (e.owns(fqn)) return e.name;
  return std::nullopt;
}

bool AdLibraryCatalog::is_analytics_class(std::string_view fqn) const {
  for (const auto& [prefix, name] : analytics_prefixes)
    if (under_prefix(fqn, prefix)) return true;
  return false;
}

void AdLibraryCatalog::validate() const {
  std::set<std::string> names;
  for (const auto& e : entries) {
    if (e.name.empty()) throw InvalidCatalog("entry with empty name");
    if (!names.insert(e.name).second)
      throw InvalidCatalog("duplicate entry name '" + e.name + "'");
    if (e.package_prefixes.empty())
      throw InvalidCatalog("entry '" + e.name + "' has no package prefixes");
    auto nested = [&e](const std::string& p) {
      for (const auto& pkg : e.package_prefixes)
        if (under_prefix(p, pkg)) return true;
      return false;
    };
    for (const auto& m : e.mediator_prefixes)
      if (!nested(m))
        throw InvalidCatalog("mediator prefix '" + m +
                             "' not nested under a package prefix of '" +
                             e.name + "'");
    for (const auto& i : e.identifier_prefixes)
      if (!nested(i))
        throw InvalidCatalog("identifier prefix '" + i +
                             "' not nested under a package prefix of '" +
                             e.name + "'");
  }
  for (const auto& a : entries)
    for (const auto& b : entries) {
      if (a.name == b.name) continue;
      for (const auto& pa : a.package_prefixes)
        for (const auto& pb : b.package_prefixes)
          if (under_prefix(pb, pa))
            throw InvalidCatalog("prefix '" + pa + "' of '" + a.name +
                                 "' overlaps prefix '" + pb + "' of '" +
                                 b.name + "'");
    }
}

AdLibraryCatalog load_catalog(std::istream& in, const std::string& origin) {
  AdLibraryCatalog catalog;
  std::string line;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json j = json::parse(line);
      if (j.contains("analytics_prefix")) {
        catalog.analytics_prefixes.emplace_back(
            j.at("analytics_prefix").get<std::string>(),
            j.at("library").get<std::string>());
        continue;
      }
      AdLibraryEntry e;
      e.name = j.at("name").get<std::string>();
      for (const auto& p : j.at("package_prefixes"))
        e.package_prefixes.push_back(p.get<std::string>());
      for (const auto& p : j.value("mediator_prefixes", json::array()))
        e.mediator_prefixes.push_back(p.get<std::string>());
      for (const auto& p : j.value("identifier_prefixes", json::array()))
        e.identifier_prefixes.push_back(p.get<std::string>());
      for (const auto& m : j.value("show_ad_methods", json::array())) {
        ShowAdPattern pat;
        pat.owner_prefix = m.at("owner_prefix").get<std::string>();
        pat.method_name = m.at("name").get<std::string>();
        pat.param_count = m.value("param_count", -1);
        e.show_ad_methods.push_back(std::move(pat));
      }
      catalog.entries.push_back(std::move(e));
    }
  } catch (const json::exception& ex) {
    throw Error("InvalidCatalog", "bad catalog line " + std::to_string(lineno) +
                                      " in " + origin + ": " + ex.what());
  }
  catalog.validate();
  return catalog;
}

AdLibraryCatalog load_catalog(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open catalog: " + path.string());
  return load_catalog(in, path.string());
}

void store_catalog(const AdLibraryCatalog& catalog, std::ostream& out) {
  for (const auto& e : catalog.entries) {
    json methods = json::array();
    for (const auto& m : e.show_ad_methods)
      methods.push_back(json{{"owner_prefix", m.owner_prefix},
                             {"name", m.method_name},
                             {"param_count", m.param_count}});
    out << json{{"name", e.name},
                {"package_prefixes", e.package_prefixes},
                {"mediator_prefixes", e.mediator_prefixes},
                {"identifier_prefixes", e.identifier_prefixes},
                {"show_ad_methods", methods}}
               .dump()
        << '\n';
  }
  for (const auto& [prefix, name] : catalog.analytics_prefixes)
    out << json{{"analytics_prefix", prefix}, {"library", name}}.dump() << '\n';
}

AdLibraryCatalog seed_catalog() {
  AdLibraryCatalog c;
  auto lib = [&c](std::string name, std::vector<std::string> pkgs,
                  std::vector<std::string> mediators,
                  std::vector<std::string> identifiers,
                  std::vector<ShowAdPattern> shows) {
    AdLibraryEntry e;
    e.name = std::move(name);
    e.package_prefixes = std::move(pkgs);
    e.mediator_prefixes = std::move(mediators);
    e.identifier_prefixes = std::move(identifiers);
    e.show_ad_methods = std::move(shows);
    c.entries.push_back(std::move(e));
  };
  lib("Google AdMob", {"com.google.android.gms.ads"},
      {"com.google.android.gms.ads.mediation"},
      {"com.google.android.gms.ads.identifier"},
      {{"com.google.android.gms.ads", "show", -1}});
  lib("Facebook Audience Network", {"com.facebook.ads"}, {}, {},
      {{"com.facebook.ads", "show", -1}});
  lib("MoPub", {"com.mopub"}, {"com.mopub.mobileads.mediation"}, {},
      {{"com.mopub.mobileads", "show", -1}});
  lib("Amazon Mobile Ad", {"com.amazon.device.ads"}, {}, {},
      {{"com.amazon.device.ads", "showAd", -1}});
  lib("Flurry", {"com.flurry.android"}, {}, {},
      {{"com.flurry.android", "displayAd", -1}});
  lib("InMobi", {"com.inmobi"}, {}, {}, {{"com.inmobi", "show", -1}});
  lib("MillennialMedia", {"com.millennialmedia"}, {}, {},
      {{"com.millennialmedia", "show", -1}});
  lib("AdColony", {"com.adcolony.sdk"}, {}, {},
      {{"com.adcolony.sdk", "show", -1}});
  lib("AppLovin", {"com.applovin"}, {}, {}, {{"com.applovin", "show", -1}});
  lib("Unity Ads", {"com.unity3d.ads"}, {}, {},
      {{"com.unity3d.ads", "show", -1}});
  lib("AerServ", {"com.aerserv.sdk"}, {"com.aerserv.sdk.mediation"}, {},
      {{"com.aerserv.sdk", "show", -1}});
  c.analytics_prefixes = {
      {"com.google.android.gms.analytics", "Google Analytics"},
      {"com.appsflyer", "AppsFlyer Analytics"},
      {"com.flurry.sdk", "Flurry Analytics"},
      {"com.kochava.android.tracker", "Kochava Analytics"},
      {"com.localytics.android", "Localytics"},
      {"com.quantcast.measurement.service", "Quantcast Measure"},
      {"com.urbanairship.analytics", "Urban Airship Analytics"},
      {"com.moat.analytics.mobile", "Moat Analytics"},
  };
  c.validate();
  return c;
}

}  // namespace adlens
