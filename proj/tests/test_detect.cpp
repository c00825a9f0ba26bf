#include <doctest.h>

#include <string>

#include "adlens/catalog.hpp"
#include "adlens/detect.hpp"
#include "adlens/rng.hpp"
#include "test_helpers.hpp"

using namespace adlens;
using testutil::call;
using testutil::declare;

namespace {
const AdLibraryCatalog& cat() {
  static const AdLibraryCatalog c = seed_catalog();
  return c;
}
}  // namespace

TEST_CASE("candidate filter equals a brute-force character scan") {
  // independent oracle: lowercase the name, look for literal "ad"
  auto oracle = [](const std::string& name) {
    std::string low = name;
    for (char& c : low) c = static_cast<char>(std::tolower(c));
    return low.find("ad") != std::string::npos;
  };
  Rng rng(99);
  const std::string alphabet = "adADxyzXYZ._0$";
  AppUpdate u = testutil::base_update("app.re", 1);
  std::vector<std::string> names;
  for (int i = 0; i < 10000; ++i) {
    std::string n;
    size_t len = rng.below(12) + 1;
    for (size_t k = 0; k < len; ++k)
      n.push_back(alphabet[rng.below(alphabet.size())]);
    n += std::to_string(i);  // keep names unique so the map holds them all
    names.push_back(n);
    testutil::cls(u, n);
  }
  std::set<std::string> got = candidate_ad_classes(u);
  for (const auto& n : names) CHECK(got.count(n) == (oracle(n) ? 1u : 0u));
}

TEST_CASE("known false positive from the naive filter is not a library") {
  AppUpdate u = testutil::base_update("app.fp", 1);
  testutil::cls(u, "com.fbox.load.ImageLoad");  // contains "ad" twice
  CHECK(candidate_ad_classes(u).count("com.fbox.load.ImageLoad") == 1);
  CHECK(integrated_libraries(u, cat()).empty());
  CHECK(classify_role(u, cat()) == AppRole::NonIntegrating);
}

TEST_CASE("is_app_code carves out catalog and platform prefixes") {
  const auto& tp = default_third_party_prefixes();
  CHECK(is_app_code("com.example.Main", cat(), tp));
  CHECK_FALSE(is_app_code("com.google.android.gms.ads.AdView", cat(), tp));
  CHECK_FALSE(is_app_code("com.google.android.gms.analytics.Tracker", cat(), tp));
  CHECK_FALSE(is_app_code("android.app.Activity", cat(), tp));
  CHECK_FALSE(is_app_code("androidx.fragment.app.Fragment", cat(), tp));
  CHECK(is_app_code("androidy.custom.Thing", cat(), tp));  // boundary check
}

TEST_CASE("role: NonIntegrating without any catalog classes") {
  AppUpdate u = testutil::base_update("app.n", 1);
  declare(u, "com.example.Main", "onCreate", 1);
  CHECK(classify_role(u, cat()) == AppRole::NonIntegrating);
}

TEST_CASE("role: AdDisplaying via show-ad call from app code") {
  AppUpdate u = testutil::base_update("app.a", 1);
  declare(u, "com.facebook.ads.InterstitialAd", "show", 0);
  u.activities.insert("com.example.Main");
  declare(u, "com.example.Main", "onCreate", 1);
  call(u, "com.example.Main", "onCreate", 1, "com.facebook.ads.InterstitialAd",
       "show", 0);
  AdIntegrationProfile p = build_profile(u, cat());
  CHECK(p.role == AppRole::AdDisplaying);
  CHECK(p.integrated == std::set<std::string>{"Facebook Audience Network"});
  CHECK(p.accessed == std::set<std::string>{"Facebook Audience Network"});
  CHECK(p.ad_screens == std::set<std::string>{"com.example.Main"});
}

TEST_CASE("role: show call from a helper class is AdDisplaying, not a screen") {
  AppUpdate u = testutil::base_update("app.h", 1);
  declare(u, "com.facebook.ads.InterstitialAd", "show", 0);
  u.activities.insert("com.example.Main");
  declare(u, "com.example.Main", "onCreate", 1);
  call(u, "com.example.util.Ads", "display", 0,
       "com.facebook.ads.InterstitialAd", "show", 0);
  AdIntegrationProfile p = build_profile(u, cat());
  CHECK(p.role == AppRole::AdDisplaying);
  CHECK(p.ad_screens.empty());  // one-hop rule: only direct activity calls
}

TEST_CASE("role: AnalyticsOnly via advertising-identifier access") {
  AppUpdate u = testutil::base_update("app.an", 1);
  declare(u, "com.google.android.gms.ads.identifier.AdvertisingIdClient",
          "getAdvertisingIdInfo", 1);
  call(u, "com.google.android.gms.analytics.Tracker", "collect", 0,
       "com.google.android.gms.ads.identifier.AdvertisingIdClient",
       "getAdvertisingIdInfo", 1);
  CHECK(classify_role(u, cat()) == AppRole::AnalyticsOnly);
}

TEST_CASE("role: InertAdCode when library classes sit unused") {
  AppUpdate u = testutil::base_update("app.i", 1);
  declare(u, "com.mopub.mobileads.MoPubView", "loadAd", 0);
  declare(u, "com.example.Main", "onCreate", 1);
  AdIntegrationProfile p = build_profile(u, cat());
  CHECK(p.role == AppRole::InertAdCode);
  CHECK(p.integrated == std::set<std::string>{"MoPub"});
  CHECK(p.accessed.empty());
}

TEST_CASE("role: non-show calls into an ad library still count as inert") {
  AppUpdate u = testutil::base_update("app.i2", 1);
  declare(u, "com.mopub.common.MoPub", "initializeSdk", 2);
  call(u, "com.example.Main", "onCreate", 1, "com.mopub.common.MoPub",
       "initializeSdk", 2);
  AdIntegrationProfile p = build_profile(u, cat());
  CHECK(p.role == AppRole::InertAdCode);
  CHECK(p.accessed == std::set<std::string>{"MoPub"});
  CHECK(!p.diagnostics.empty());
}

TEST_CASE("one-hop rule: show call made inside the library is no screen") {
  AppUpdate u = testutil::base_update("app.l", 1);
  u.activities.insert("com.example.Main");
  declare(u, "com.example.Main", "onCreate", 1);
  // the library calls its own show; the app never does
  call(u, "com.facebook.ads.internal.Dispatcher", "fire", 0,
       "com.facebook.ads.InterstitialAd", "show", 0);
  AdIntegrationProfile p = build_profile(u, cat());
  CHECK(p.ad_screens.empty());
  CHECK(p.role != AppRole::AdDisplaying);
}
