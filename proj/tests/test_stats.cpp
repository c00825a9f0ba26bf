#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "adlens/catalog.hpp"
#include "adlens/errors.hpp"
#include "adlens/numerics.hpp"
#include "adlens/rng.hpp"
#include "adlens/stats.hpp"
#include "test_helpers.hpp"

using namespace adlens;

namespace oracle {

// brute-force ranks: average the 1-based positions of equal values
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (size_t j = 0; j < v.size(); ++j) {
      if (v[j] < v[i]) ++less;
      if (v[j] == v[i]) ++equal;
    }
    out[i] = less + (equal + 1.0) / 2.0;
  }
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

double spearman_rho(const std::vector<double>& x,
                    const std::vector<double>& y) {
  return pearson(ranks(x), ranks(y));
}

// definitional H with tie correction, computed independently
double kw_h(const std::vector<std::vector<double>>& groups) {
  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  std::vector<double> r = ranks(pooled);
  double n = static_cast<double>(pooled.size());
  double h = 0;
  size_t off = 0;
  for (const auto& g : groups) {
    double s = 0;
    for (size_t i = 0; i < g.size(); ++i) s += r[off + i];
    off += g.size();
    double mean_rank = s / static_cast<double>(g.size());
    h += static_cast<double>(g.size()) * (mean_rank - (n + 1) / 2) *
         (mean_rank - (n + 1) / 2);
  }
  h *= 12.0 / (n * (n + 1));
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_sum = 0;
  size_t i = 0;
  while (i < sorted.size()) {
    size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    double t = static_cast<double>(j - i + 1);
    tie_sum += t * t * t - t;
    i = j + 1;
  }
  return h / (1.0 - tie_sum / (n * n * n - n));
}

}  // namespace oracle

namespace {
std::vector<double> random_sample(Rng& rng, size_t n, int distinct) {
  std::vector<double> v(n);
  for (auto& x : v) x = static_cast<double>(rng.below(distinct));
  return v;
}
}  // namespace

TEST_CASE("midranks match the brute-force rank oracle") {
  Rng rng(31);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = random_sample(rng, rng.below(40) + 2, 8);
    auto got = midranks(v);
    auto want = oracle::ranks(v);
    REQUIRE(got.size() == want.size());
    for (size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("spearman rho matches rank-then-pearson to 1e-9") {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = rng.below(48) + 3;
    auto x = random_sample(rng, n, 10);
    auto y = random_sample(rng, n, 10);
    // skip degenerate draws (all-equal): the library throws on those
    auto degenerate = [](const std::vector<double>& v) {
      return std::adjacent_find(v.begin(), v.end(), std::not_equal_to<>()) ==
             v.end();
    };
    if (degenerate(x) || degenerate(y)) {
      CHECK_THROWS_AS(spearman(x, y), Error);
      continue;
    }
    CorrelationResult r = spearman(x, y);
    CHECK(std::fabs(r.rho - oracle::spearman_rho(x, y)) < 1e-9);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
  }
}

TEST_CASE("spearman is invariant under monotone transforms") {
  Rng rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    size_t n = rng.below(30) + 5;
    std::vector<double> x(n), y(n);
    for (size_t i = 0; i < n; ++i) {
      x[i] = rng.unit() * 100;
      y[i] = rng.unit() * 100;
    }
    CorrelationResult base = spearman(x, y);
    // random strictly-increasing transform: a*exp(b*v) + c*v^3 + d
    double a = rng.unit() + 0.1, b = rng.unit() * 0.05 + 0.001;
    double c = rng.unit() + 0.1, d = rng.unit() * 10 - 5;
    std::vector<double> tx(n);
    for (size_t i = 0; i < n; ++i)
      tx[i] = a * std::exp(b * x[i]) + c * x[i] * x[i] * x[i] + d;
    CorrelationResult t = spearman(tx, y);
    CHECK(t.rho == doctest::Approx(base.rho).epsilon(1e-12));
    CHECK(t.p_value == doctest::Approx(base.p_value).epsilon(1e-12));
  }
}

TEST_CASE("spearman rejects bad input") {
  CHECK_THROWS_AS(spearman({1, 2, 3}, {1, 2}), Error);
  CHECK_THROWS_AS(spearman({1, 2}, {1, 2}), Error);
  CHECK_THROWS_AS(spearman({1, 1, 1}, {1, 2, 3}), Error);
}

TEST_CASE("exact permutation p-value for tiny samples") {
  std::vector<double> x = {1, 2, 3, 4, 5};
  std::vector<double> y = {1, 2, 3, 4, 5};
  SpearmanOptions opt;
  opt.exact_permutation = true;
  CorrelationResult r = spearman(x, y, opt);
  CHECK(r.rho == doctest::Approx(1.0));
  // perfectly concordant and discordant orders are the only |rho| = 1 cases
  CHECK(r.p_value == doctest::Approx(2.0 / 120.0));
}

TEST_CASE("kruskal-wallis H matches the definitional oracle to 1e-9") {
  Rng rng(41);
  for (int trial = 0; trial < 100; ++trial) {
    size_t k = rng.below(4) + 2;
    std::vector<std::vector<double>> groups(k);
    bool all_same = true;
    for (auto& g : groups) {
      g = random_sample(rng, rng.below(15) + 2, 6);
      for (double v : g)
        if (v != groups[0][0]) all_same = false;
    }
    if (all_same) continue;
    KWResult r = kruskal_wallis(groups);
    CHECK(std::fabs(r.h_statistic - oracle::kw_h(groups)) < 1e-9);
    CHECK(r.degrees_of_freedom == static_cast<int>(k) - 1);
    CHECK(r.p_value >= 0.0);
    CHECK(r.p_value <= 1.0);
  }
}

TEST_CASE("kruskal-wallis degenerate and error cases") {
  KWResult same = kruskal_wallis({{2, 2}, {2, 2, 2}});
  CHECK(same.h_statistic == 0.0);
  CHECK(same.p_value == 1.0);
  CHECK_THROWS_AS(kruskal_wallis({{1.0, 2.0}}), Error);
  CHECK_THROWS_AS(kruskal_wallis({{1.0}, {}}), Error);
}

TEST_CASE("chi-square survival function against closed forms") {
  // df=2: sf(x) = exp(-x/2); df=4: sf(x) = (1 + x/2) exp(-x/2)
  for (double x : {0.5, 1.0, 2.0, 5.0, 10.0, 25.0}) {
    CHECK(chi_square_sf(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-10));
    CHECK(chi_square_sf(x, 4) ==
          doctest::Approx((1 + x / 2) * std::exp(-x / 2)).epsilon(1e-10));
  }
  CHECK(chi_square_sf(0.0, 3) == doctest::Approx(1.0));
}

TEST_CASE("student t two-sided sf against the df=1 closed form") {
  // df=1 (Cauchy): p = 1 - (2/pi) atan(|t|)
  for (double t : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    double want = 1.0 - 2.0 / M_PI * std::atan(t);
    CHECK(student_t_two_sided_sf(t, 1) == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("download buckets and the multiple-ads ratio") {
  const AdLibraryCatalog cat = seed_catalog();
  Corpus corpus;
  auto add_app = [&corpus, &cat](const std::string& id, std::int64_t downloads,
                                 int libraries) {
    AppUpdate u = testutil::base_update(id, 1);
    u.download_count = downloads;
    u.activities.insert("com.x.Main");
    testutil::declare(u, "com.x.Main", "onCreate", 1);
    const char* lib_classes[] = {"com.google.android.gms.ads.InterstitialAd",
                                 "com.facebook.ads.InterstitialAd",
                                 "com.mopub.mobileads.MoPubInterstitial"};
    for (int i = 0; i < libraries; ++i) {
      testutil::declare(u, lib_classes[i], "show", 0);
      testutil::call(u, "com.x.Main", "onCreate", 1, lib_classes[i], "show",
                     0);
    }
    AppLineage lin;
    lin.app_id = id;
    lin.updates.push_back(std::move(u));
    corpus.lineages.emplace(id, std::move(lin));
  };
  add_app("app.a", 150, 1);     // bucket [100, 1000): single
  add_app("app.b", 500, 2);     // bucket [100, 1000): multi
  add_app("app.c", 500, 3);     // bucket [100, 1000): multi
  add_app("app.d", 50000, 2);   // bucket [10^4, 10^5): multi, no single
  add_app("app.e", 70, 0);      // not ad-displaying, ignored

  BucketSeries s = multiple_ads_ratio(corpus, cat, default_bucket_edges());
  REQUIRE(s.buckets.size() == default_bucket_edges().size());
  const Bucket& b100 = s.buckets[1];
  CHECK(b100.lower_bound_downloads == 100);
  CHECK(b100.multi_count == 2);
  CHECK(b100.single_count == 1);
  CHECK(b100.defined);
  CHECK(b100.ratio == doctest::Approx(2.0));
  const Bucket& b10k = s.buckets[3];
  CHECK(b10k.multi_count == 1);
  CHECK_FALSE(b10k.defined);

  CHECK_THROWS_AS(multiple_ads_ratio(corpus, cat, {5, 5, 10}), Error);
  CHECK_THROWS_AS(multiple_ads_ratio(corpus, cat, {}), Error);
}

TEST_CASE("category table ranks libraries by integration share") {
  const AdLibraryCatalog cat = seed_catalog();
  Corpus corpus;
  auto add_app = [&corpus](const std::string& id, const std::string& category,
                           std::vector<const char*> lib_classes) {
    AppUpdate u = testutil::base_update(id, 1);
    u.category = category;
    u.activities.insert("com.x.Main");
    testutil::declare(u, "com.x.Main", "onCreate", 1);
    for (const char* c : lib_classes) {
      testutil::declare(u, c, "show", 0);
      testutil::call(u, "com.x.Main", "onCreate", 1, c, "show", 0);
    }
    AppLineage lin;
    lin.app_id = id;
    lin.updates.push_back(std::move(u));
    corpus.lineages.emplace(id, std::move(lin));
  };
  add_app("app.g1", "Game", {"com.google.android.gms.ads.InterstitialAd",
                             "com.facebook.ads.InterstitialAd"});
  add_app("app.g2", "Game", {"com.google.android.gms.ads.InterstitialAd"});
  add_app("app.g3", "Game", {});  // studied but not ad-displaying
  add_app("app.t1", "Tools", {"com.mopub.mobileads.MoPubInterstitial"});

  CategoryTable t = category_table(corpus, cat, 2);
  REQUIRE(t.rows.size() == 2);
  const CategoryRow& game = t.rows[0];
  CHECK(game.category == "Game");
  CHECK(game.studied_count == 3);
  CHECK(game.ad_displaying_count == 2);
  CHECK(game.pct == doctest::Approx(100.0 * 2 / 3));
  CHECK(game.median_integrated == doctest::Approx(1.5));
  CHECK(game.max_integrated == 2);
  REQUIRE(game.top_libraries.size() == 2);
  CHECK(game.top_libraries[0].first == "Google AdMob");  // 100%
  CHECK(game.top_libraries[0].second == doctest::Approx(100.0));
  CHECK(game.top_libraries[1].first == "Facebook Audience Network");  // 50%
  CHECK_THROWS_AS(category_table(corpus, cat, 0), Error);
}
