#include "adlens/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "adlens/detect.hpp"
#include "adlens/errors.hpp"
#include "adlens/numerics.hpp"
#include "adlens/strategy.hpp"

namespace adlens {
namespace {

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0)
    throw Error("DegenerateInput", "zero rank variance");
  return sxy / std::sqrt(sxx * syy);
}

double spearman_rho_of(const std::vector<double>& rx,
                       const std::vector<double>& ry) {
  return pearson(rx, ry);
}

}  // namespace

std::vector<double> midranks(const std::vector<double>& values) {
  size_t n = values.size();
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&values](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
    double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
    for (size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::int64_t> default_bucket_edges() {
  std::vector<std::int64_t> edges = {0};
  for (std::int64_t e = 100; e <= 1000000000; e *= 10) edges.push_back(e);
  return edges;
}

BucketSeries multiple_ads_ratio(const Corpus& corpus,
                                const AdLibraryCatalog& catalog,
                                const std::vector<std::int64_t>& edges) {
  if (edges.empty() || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end())
    throw Error("BadBucketEdges", "bucket edges must be strictly increasing");
  BucketSeries series;
  series.edges = edges;
  series.buckets.resize(edges.size());
  for (size_t i = 0; i < edges.size(); ++i)
    series.buckets[i].lower_bound_downloads = edges[i];

  for (const auto& [app_id, lineage] : corpus.lineages) {
    const AppUpdate& u = lineage.latest();
    AdIntegrationProfile p = build_profile(u, catalog);
    if (p.role != AppRole::AdDisplaying) continue;
    size_t b = 0;
    for (size_t i = 0; i < edges.size(); ++i)
      if (u.download_count >= edges[i]) b = i;
    if (u.download_count < edges.front()) continue;  // below the series
    if (p.integrated.size() > 1)
      ++series.buckets[b].multi_count;
    else
      ++series.buckets[b].single_count;
  }
  for (auto& bucket : series.buckets) {
    bucket.defined = bucket.single_count > 0;
    if (bucket.defined)
      bucket.ratio = static_cast<double>(bucket.multi_count) /
                     static_cast<double>(bucket.single_count);
  }
  return series;
}

CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const SpearmanOptions& options) {
  if (x.size() != y.size())
    throw Error("LengthMismatch", "spearman inputs differ in length");
  if (x.size() < 3)
    throw Error("LengthMismatch", "spearman needs at least 3 observations");
  std::vector<double> rx = midranks(x);
  std::vector<double> ry = midranks(y);
  CorrelationResult result;
  result.n = static_cast<int>(x.size());
  result.rho = spearman_rho_of(rx, ry);

  if (options.exact_permutation && x.size() <= 9) {
    std::vector<size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> py(x.size());
    long total = 0, at_least = 0;
    double target = std::fabs(result.rho) - 1e-12;
    do {
      for (size_t i = 0; i < perm.size(); ++i) py[i] = ry[perm[i]];
      if (std::fabs(spearman_rho_of(rx, py)) >= target) ++at_least;
      ++total;
    } while (std::next_permutation(perm.begin(), perm.end()));
    result.p_value = static_cast<double>(at_least) / static_cast<double>(total);
    return result;
  }

  double df = static_cast<double>(result.n - 2);
  double denom = 1.0 - result.rho * result.rho;
  if (denom <= 0) {
    result.p_value = 0.0;
  } else {
    double t = result.rho * std::sqrt(df / denom);
    result.p_value = student_t_two_sided_sf(t, df);
  }
  return result;
}

KWResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2)
    throw Error("TooFewGroups", "kruskal-wallis needs at least 2 groups");
  for (const auto& g : groups)
    if (g.empty()) throw Error("TooFewGroups", "empty group");

  std::vector<double> pooled;
  for (const auto& g : groups) pooled.insert(pooled.end(), g.begin(), g.end());
  std::vector<double> ranks = midranks(pooled);
  double n = static_cast<double>(pooled.size());

  KWResult result;
  result.degrees_of_freedom = static_cast<int>(groups.size()) - 1;

  double h = 0;
  size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0;
    for (size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    offset += g.size();
    h += rank_sum * rank_sum / static_cast<double>(g.size());
  }
  h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0);

  // tie correction
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
  double correction = 1.0 - tie_sum / (n * n * n - n);
  if (correction <= 0) {
    // every observation identical: no between-group variation by definition
    result.h_statistic = 0.0;
    result.p_value = 1.0;
    return result;
  }
  h /= correction;
  result.h_statistic = std::max(0.0, h);
  result.p_value = chi_square_sf(result.h_statistic,
                                 result.degrees_of_freedom);
  return result;
}

CategoryTable category_table(const Corpus& corpus,
                             const AdLibraryCatalog& catalog, int top_n) {
  if (top_n < 1) throw Error("BadArgument", "top_n must be >= 1");
  struct Acc {
    int studied = 0;
    int ad_displaying = 0;
    std::vector<double> integrated_counts;
    std::map<std::string, int> library_apps;
  };
  std::map<std::string, Acc> by_category;
  for (const auto& [app_id, lineage] : corpus.lineages) {
    const AppUpdate& u = lineage.latest();
    Acc& acc = by_category[u.category];
    ++acc.studied;
    AdIntegrationProfile p = build_profile(u, catalog);
    if (p.role != AppRole::AdDisplaying) continue;
    ++acc.ad_displaying;
    acc.integrated_counts.push_back(static_cast<double>(p.integrated.size()));
    for (const auto& lib : p.integrated) ++acc.library_apps[lib];
  }

  CategoryTable table;
  for (const auto& [category, acc] : by_category) {
    CategoryRow row;
    row.category = category;
    row.studied_count = acc.studied;
    row.ad_displaying_count = acc.ad_displaying;
    row.pct = acc.studied == 0
                  ? 0.0
                  : 100.0 * acc.ad_displaying / acc.studied;
    if (!acc.integrated_counts.empty()) {
      FiveNumberSummary s = five_number_summary(acc.integrated_counts);
      row.median_integrated = s.median;
      row.max_integrated = static_cast<int>(s.max);
    }
    std::vector<std::pair<std::string, double>> ranked;
    for (const auto& [lib, apps] : acc.library_apps)
      ranked.emplace_back(lib, acc.ad_displaying == 0
                                   ? 0.0
                                   : 100.0 * apps / acc.ad_displaying);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) {
                if (a.second != b.second) return a.second > b.second;
                return a.first < b.first;
              });
    if (ranked.size() > static_cast<size_t>(top_n))
      ranked.resize(static_cast<size_t>(top_n));
    row.top_libraries = std::move(ranked);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace adlens
