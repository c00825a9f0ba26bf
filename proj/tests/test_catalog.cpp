#include <doctest.h>

#include <fstream>
#include <sstream>

#include "adlens/catalog.hpp"
#include "adlens/errors.hpp"

using namespace adlens;

#ifndef ADLENS_CATALOG_PATH
#error "ADLENS_CATALOG_PATH must be defined by the build"
#endif

TEST_CASE("seed catalog is valid and covers the expected libraries") {
  AdLibraryCatalog cat = seed_catalog();
  CHECK_NOTHROW(cat.validate());
  for (const char* name :
       {"Google AdMob", "Facebook Audience Network", "MoPub",
        "Amazon Mobile Ad", "Flurry", "InMobi", "MillennialMedia", "AdColony",
        "AppLovin", "Unity Ads", "AerServ"})
    CHECK(cat.entry(name) != nullptr);
  CHECK(cat.entry("Nonexistent") == nullptr);
  CHECK(!cat.analytics_prefixes.empty());
}

TEST_CASE("shipped catalog file equals the built-in seed") {
  AdLibraryCatalog file = load_catalog(ADLENS_CATALOG_PATH);
  AdLibraryCatalog seed = seed_catalog();
  CHECK(file.entries == seed.entries);
  CHECK(file.analytics_prefixes == seed.analytics_prefixes);
}

TEST_CASE("store/load round trip") {
  AdLibraryCatalog seed = seed_catalog();
  std::stringstream ss;
  store_catalog(seed, ss);
  AdLibraryCatalog back = load_catalog(ss, "mem");
  CHECK(back.entries == seed.entries);
  CHECK(back.analytics_prefixes == seed.analytics_prefixes);
}

TEST_CASE("ownership and class queries") {
  AdLibraryCatalog cat = seed_catalog();
  CHECK(cat.owner_of("com.google.android.gms.ads.InterstitialAd") ==
        "Google AdMob");
  CHECK(cat.owner_of("com.google.android.gms.maps.MapView") == std::nullopt);
  CHECK(cat.is_ad_library_class("com.facebook.ads.AdView"));
  CHECK_FALSE(cat.is_ad_library_class("com.facebook.internal.Utility"));
  CHECK(cat.is_analytics_class("com.google.android.gms.analytics.Tracker"));
  CHECK_FALSE(cat.is_analytics_class("com.example.Tracker"));
}

TEST_CASE("show-ad pattern matching") {
  AdLibraryCatalog cat = seed_catalog();
  const AdLibraryEntry* admob = cat.entry("Google AdMob");
  REQUIRE(admob != nullptr);
  bool any = false;
  for (const auto& p : admob->show_ad_methods)
    any = any ||
          p.matches({"com.google.android.gms.ads.InterstitialAd", "show", 0});
  CHECK(any);
  for (const auto& p : admob->show_ad_methods) {
    CHECK_FALSE(p.matches({"com.facebook.ads.InterstitialAd", "show", 0}));
    CHECK_FALSE(
        p.matches({"com.google.android.gms.ads.InterstitialAd", "load", 0}));
  }
}

TEST_CASE("validation rejects duplicate names") {
  AdLibraryCatalog cat = seed_catalog();
  cat.entries.push_back(cat.entries.front());
  cat.entries.back().package_prefixes = {"zz.unique"};
  CHECK_THROWS_AS(cat.validate(), Error);
}

TEST_CASE("validation rejects overlapping package prefixes") {
  AdLibraryCatalog cat = seed_catalog();
  AdLibraryEntry e;
  e.name = "Overlapper";
  e.package_prefixes = {"com.facebook.ads.internal"};
  e.show_ad_methods = {{"com.facebook.ads.internal", "show", -1}};
  cat.entries.push_back(e);
  CHECK_THROWS_AS(cat.validate(), Error);
}

TEST_CASE("validation rejects mediator prefix outside the library") {
  AdLibraryCatalog cat = seed_catalog();
  AdLibraryEntry e;
  e.name = "Stray";
  e.package_prefixes = {"net.stray"};
  e.mediator_prefixes = {"net.elsewhere.mediation"};
  e.show_ad_methods = {{"net.stray", "show", -1}};
  cat.entries.push_back(e);
  CHECK_THROWS_AS(cat.validate(), Error);
}

TEST_CASE("load rejects malformed catalog lines") {
  std::stringstream ss("not json\n");
  CHECK_THROWS_AS(load_catalog(ss, "mem"), Error);
}
