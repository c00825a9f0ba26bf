// adlens: batch pipeline over app-update corpora.
//
// Subcommands: ingest, detect, classify, evolve, report, forge.
// Exit codes: 0 success, 1 analysis error, 2 usage error.
// Warnings go to <out>/warnings.jsonl, never into data outputs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "adlens/catalog.hpp"
#include "adlens/corpus_io.hpp"
#include "adlens/detect.hpp"
#include "adlens/errors.hpp"
#include "adlens/evolution.hpp"
#include "adlens/forge.hpp"
#include "adlens/report.hpp"
#include "adlens/stats.hpp"
#include "adlens/strategy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
  std::string corpus_root;
  std::string catalog_path;
  std::string output_dir = ".";
  std::string format = "csv";
  int parallelism = 1;
  bool verify_checksum = false;
  int top_n = 10;
  std::uint64_t seed = 1;
  std::string spec_path;  // forge only
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

adlens::AdLibraryCatalog open_catalog(const RunConfig& cfg) {
  if (cfg.catalog_path.empty())
    throw UsageError("--catalog is required (path to a catalog v1 file)");
  if (!fs::exists(cfg.catalog_path))
    throw UsageError("catalog file not found: " + cfg.catalog_path);
  adlens::AdLibraryCatalog cat = adlens::load_catalog(cfg.catalog_path);
  cat.validate();
  return cat;
}

adlens::ReportFormat format_of(const RunConfig& cfg) {
  try {
    return adlens::parse_report_format(cfg.format);
  } catch (const adlens::Error& e) {
    throw UsageError(e.what());
  }
}

std::string ext_of(adlens::ReportFormat f) {
  return f == adlens::ReportFormat::Csv ? ".csv" : ".md";
}

void write_warnings(const RunConfig& cfg, const std::string& tool,
                    const std::vector<std::string>& warnings) {
  fs::create_directories(cfg.output_dir);
  std::ofstream out(fs::path(cfg.output_dir) / "warnings.jsonl",
                    std::ios::binary);
  for (const auto& w : warnings)
    out << json{{"tool", tool}, {"message", w}}.dump() << '\n';
}

adlens::Corpus load(const RunConfig& cfg, std::vector<std::string>& warnings) {
  if (cfg.corpus_root.empty() || !fs::is_directory(cfg.corpus_root))
    throw UsageError("corpus root is not a directory: " + cfg.corpus_root);
  adlens::LoadOptions opt;
  opt.verify_checksum = cfg.verify_checksum;
  opt.parallelism = cfg.parallelism;
  return adlens::load_corpus(cfg.corpus_root, opt, &warnings);
}

void emit(const adlens::Table& table, const RunConfig& cfg,
          const std::string& name, adlens::ReportFormat fmt) {
  fs::create_directories(cfg.output_dir);
  adlens::write_table(table, fmt,
                      fs::path(cfg.output_dir) / (name + ext_of(fmt)));
}

int cmd_ingest(const RunConfig& cfg) {
  std::vector<std::string> warnings;
  adlens::Corpus corpus = load(cfg, warnings);
  adlens::ReportFormat fmt = format_of(cfg);
  adlens::Table t;
  t.header = {"app_id", "updates", "first_version", "last_version"};
  for (const auto& [app_id, lin] : corpus.lineages)
    t.rows.push_back({app_id, std::to_string(lin.updates.size()),
                      std::to_string(lin.updates.front().version_code),
                      std::to_string(lin.latest().version_code)});
  emit(t, cfg, "ingest", fmt);
  write_warnings(cfg, "ingest", warnings);
  std::cout << "apps=" << corpus.lineages.size()
            << " warnings=" << warnings.size() << '\n';
  return 0;
}

int cmd_detect(const RunConfig& cfg) {
  adlens::AdLibraryCatalog catalog = open_catalog(cfg);
  std::vector<std::string> warnings;
  adlens::Corpus corpus = load(cfg, warnings);
  adlens::ReportFormat fmt = format_of(cfg);

  std::vector<adlens::ProfileRow> rows;
  std::map<adlens::AppRole, int> role_counts;
  for (const auto& [app_id, lin] : corpus.lineages) {
    for (const auto& u : lin.updates)
      rows.push_back({app_id, u.version_code,
                      adlens::build_profile(u, catalog)});
    role_counts[adlens::classify_role(lin.latest(), catalog)]++;
  }
  emit(adlens::profiles_table(rows), cfg, "profiles", fmt);

  adlens::Table roles;
  roles.header = {"role", "apps", "pct"};
  int total = static_cast<int>(corpus.lineages.size());
  for (adlens::AppRole r :
       {adlens::AppRole::AdDisplaying, adlens::AppRole::NonIntegrating,
        adlens::AppRole::AnalyticsOnly, adlens::AppRole::InertAdCode}) {
    int n = role_counts.count(r) ? role_counts[r] : 0;
    roles.rows.push_back({adlens::to_string(r), std::to_string(n),
                          adlens::fmt_pct(total ? 100.0 * n / total : 0.0)});
  }
  emit(roles, cfg, "roles", fmt);
  write_warnings(cfg, "detect", warnings);
  return 0;
}

int cmd_classify(const RunConfig& cfg) {
  adlens::AdLibraryCatalog catalog = open_catalog(cfg);
  std::vector<std::string> warnings;
  adlens::Corpus corpus = load(cfg, warnings);
  adlens::ReportFormat fmt = format_of(cfg);

  std::vector<adlens::StrategyRow> rows;
  for (const auto& [app_id, lin] : corpus.lineages) {
    const adlens::AppUpdate& u = lin.latest();
    adlens::StrategyResult r = adlens::classify_strategy(u, catalog);
    if (r.strategy == adlens::IntegrationStrategy::Unclassifiable)
      warnings.push_back("UnclassifiableUpdate app_id=" + app_id +
                         " version=" + std::to_string(u.version_code) + ": " +
                         r.diagnostic);
    rows.push_back({app_id, u.version_code, std::move(r)});
  }
  emit(adlens::strategy_table(rows), cfg, "strategies", fmt);
  emit(adlens::distribution_table(
           adlens::strategy_distribution(corpus, catalog)),
       cfg, "distribution", fmt);
  emit(adlens::count_summary_table(
           adlens::integrated_count_summary(corpus, catalog)),
       cfg, "count_summary", fmt);
  write_warnings(cfg, "classify", warnings);
  return 0;
}

int cmd_evolve(const RunConfig& cfg) {
  adlens::AdLibraryCatalog catalog = open_catalog(cfg);
  std::vector<std::string> warnings;
  adlens::Corpus corpus = load(cfg, warnings);
  adlens::ReportFormat fmt = format_of(cfg);

  std::vector<adlens::LineageMetrics> metrics;
  std::vector<adlens::ChangeEvent> events;
  for (const auto& [app_id, lin] : corpus.lineages) {
    if (lin.updates.size() < 2) {
      warnings.push_back("SkippedShortLineage app_id=" + app_id);
      continue;
    }
    metrics.push_back(adlens::lineage_metrics(lin, catalog));
    for (auto& e : adlens::change_events(lin, catalog))
      events.push_back(std::move(e));
  }
  emit(adlens::evolution_table(metrics), cfg, "evolution", fmt);
  emit(adlens::change_event_table(events), cfg, "events", fmt);
  write_warnings(cfg, "evolve", warnings);
  return 0;
}

int cmd_report(const RunConfig& cfg) {
  adlens::AdLibraryCatalog catalog = open_catalog(cfg);
  std::vector<std::string> warnings;
  adlens::Corpus corpus = load(cfg, warnings);
  adlens::ReportFormat fmt = format_of(cfg);

  emit(adlens::category_report_table(
           adlens::category_table(corpus, catalog, cfg.top_n)),
       cfg, "categories", fmt);

  adlens::BucketSeries buckets = adlens::multiple_ads_ratio(
      corpus, catalog, adlens::default_bucket_edges());
  for (const auto& b : buckets.buckets)
    if (!b.defined)
      warnings.push_back("UndefinedBucketRatio lower_bound=" +
                         std::to_string(b.lower_bound_downloads));
  emit(adlens::bucket_table(buckets), cfg, "buckets", fmt);

  // rank correlation between audience size and breadth of ad integration,
  // over ad-displaying apps (latest update each)
  std::vector<double> downloads, breadth;
  for (const auto& [app_id, lin] : corpus.lineages) {
    const adlens::AppUpdate& u = lin.latest();
    if (adlens::classify_role(u, catalog) != adlens::AppRole::AdDisplaying)
      continue;
    downloads.push_back(static_cast<double>(u.download_count));
    breadth.push_back(static_cast<double>(
        adlens::integrated_libraries(u, catalog).size()));
  }
  adlens::Table corr;
  if (downloads.size() >= 3) {
    corr = adlens::correlation_table(adlens::spearman(downloads, breadth),
                                     "downloads_vs_integrated");
  } else {
    corr.header = {"label", "rho", "p_value", "n"};
    warnings.push_back("CorrelationSkipped too few ad-displaying apps");
  }
  emit(corr, cfg, "correlation", fmt);
  write_warnings(cfg, "report", warnings);
  return 0;
}

int cmd_forge(const RunConfig& cfg) {
  adlens::FixtureSpec spec = adlens::parse_fixture_spec(cfg.spec_path);
  spec.seed = cfg.seed;  // CLI seed wins; no wall-clock seeding anywhere
  adlens::AdLibraryCatalog catalog = cfg.catalog_path.empty()
                                         ? adlens::seed_catalog()
                                         : open_catalog(cfg);
  adlens::ForgeResult result = adlens::generate(spec, catalog);
  adlens::write_forge_output(result, cfg.output_dir);
  std::cout << "apps=" << result.labels.size() << " root=" << cfg.output_dir
            << '\n';
  return 0;
}

void add_common(CLI::App* cmd, RunConfig& cfg, bool with_corpus) {
  if (with_corpus)
    cmd->add_option("corpus", cfg.corpus_root, "corpus root directory")
        ->required();
  cmd->add_option("--catalog", cfg.catalog_path, "ad-library catalog file")
      ->envname("ADLENS_CATALOG");
  cmd->add_option("--out", cfg.output_dir, "output directory")
      ->envname("ADLENS_OUT");
  cmd->add_option("--format", cfg.format, "csv|markdown")
      ->envname("ADLENS_FORMAT");
  cmd->add_option("--parallelism", cfg.parallelism, "worker threads")
      ->check(CLI::PositiveNumber)
      ->envname("ADLENS_PARALLELISM");
  cmd->add_flag("--verify-checksum", cfg.verify_checksum,
                "verify DEX Adler32 checksums");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"static analysis of ad-library integration across app updates"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* ingest = app.add_subcommand("ingest", "validate and load a corpus");
  add_common(ingest, cfg, true);
  CLI::App* detect =
      app.add_subcommand("detect", "per-update ad integration profiles");
  add_common(detect, cfg, true);
  CLI::App* classify =
      app.add_subcommand("classify", "integration strategy report");
  add_common(classify, cfg, true);
  CLI::App* evolve =
      app.add_subcommand("evolve", "lineage evolution metrics and events");
  add_common(evolve, cfg, true);
  CLI::App* report =
      app.add_subcommand("report", "category, bucket and correlation tables");
  add_common(report, cfg, true);
  report->add_option("--top-n", cfg.top_n, "libraries listed per category")
      ->check(CLI::PositiveNumber);
  CLI::App* forge =
      app.add_subcommand("forge", "generate a fixture corpus from a spec");
  forge->add_option("spec", cfg.spec_path, "fixture spec file")->required();
  add_common(forge, cfg, false);
  forge->add_option("--seed", cfg.seed, "generator seed (mandatory)")
      ->required()
      ->envname("ADLENS_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*ingest) return cmd_ingest(cfg);
    if (*detect) return cmd_detect(cfg);
    if (*classify) return cmd_classify(cfg);
    if (*evolve) return cmd_evolve(cfg);
    if (*report) return cmd_report(cfg);
    if (*forge) return cmd_forge(cfg);
  } catch (const UsageError& e) {
    std::cerr << json{{"error", "Usage"}, {"message", e.what()}}.dump()
              << '\n';
    return 2;
  } catch (const adlens::Error& e) {
    std::cerr << json{{"error", e.code()}, {"message", e.what()}}.dump()
              << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "Internal"}, {"message", e.what()}}.dump()
              << '\n';
    return 1;
  }
  return 2;
}
