#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/model.hpp"

namespace adlens {

struct Bucket {
  std::int64_t lower_bound_downloads = 0;
  int multi_count = 0;
  int single_count = 0;
  double ratio = 0.0;   // multi / single; meaningless when undefined
  bool defined = false;  // single_count > 0
};

struct BucketSeries {
  std::vector<std::int64_t> edges;
  std::vector<Bucket> buckets;
};

struct CorrelationResult {
  double rho = 0;
  double p_value = 1;
  int n = 0;
};

struct KWResult {
  double h_statistic = 0;
  int degrees_of_freedom = 0;
  double p_value = 1;
};

struct CategoryRow {
  std::string category;
  int studied_count = 0;
  int ad_displaying_count = 0;
  double pct = 0;  // ad_displaying / studied
  double median_integrated = 0;
  int max_integrated = 0;
  // (library, % of ad-displaying apps in the category integrating it),
  // descending by percentage, ties broken by name; at most N entries
  std::vector<std::pair<std::string, double>> top_libraries;
};

struct CategoryTable {
  std::vector<CategoryRow> rows;
};

// Log10 edges {0, 10^2, ..., 10^9}; the bucket scheme is declared in report
// metadata since results depend on it.
std::vector<std::int64_t> default_bucket_edges();

// Multi-vs-single ad-library ratio per download bucket, over ad-displaying
// apps; each app contributes its latest update.
BucketSeries multiple_ads_ratio(const Corpus& corpus,
                                const AdLibraryCatalog& catalog,
                                const std::vector<std::int64_t>& edges);

struct SpearmanOptions {
  bool exact_permutation = false;  // only honored for n <= 9
};

// Midrank ties, Pearson on ranks; p-value from the t-approximation with
// n-2 df (or exact permutation for tiny n when requested).
CorrelationResult spearman(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const SpearmanOptions& options = {});

// H with tie correction; p-value from the chi-square survival function.
KWResult kruskal_wallis(const std::vector<std::vector<double>>& groups);

// Per-category ad-displaying stats and top-n library rankings.
CategoryTable category_table(const Corpus& corpus,
                             const AdLibraryCatalog& catalog, int top_n);

// Midranks (1-based, average over ties).
std::vector<double> midranks(const std::vector<double>& values);

}  // namespace adlens
