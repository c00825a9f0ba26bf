#include "adlens/strategy.hpp"

#include <algorithm>
#include <cmath>

#include "adlens/detect.hpp"
#include "adlens/errors.hpp"

namespace adlens {
namespace {

std::vector<std::string> split_packages(std::string_view pkg) {
  std::vector<std::string> out;
  size_t start = 0;
  while (start <= pkg.size()) {
    size_t dot = pkg.find('.', start);
    if (dot == std::string_view::npos) {
      if (start < pkg.size()) out.emplace_back(pkg.substr(start));
      break;
    }
    out.emplace_back(pkg.substr(start, dot - start));
    start = dot + 1;
  }
  return out;
}

std::string join_packages(const std::vector<std::string>& segs, size_t n) {
  std::string out;
  for (size_t i = 0; i < n; ++i) {
    if (i) out += '.';
    out += segs[i];
  }
  return out;
}

}  // namespace

std::string to_string(IntegrationStrategy s) {
  switch (s) {
    case IntegrationStrategy::ExternalMediation: return "ExternalMediation";
    case IntegrationStrategy::SelfMediation: return "SelfMediation";
    case IntegrationStrategy::Scattered: return "Scattered";
    case IntegrationStrategy::Mixed: return "Mixed";
    case IntegrationStrategy::SingleLibrary: return "SingleLibrary";
    case IntegrationStrategy::NotAdDisplaying: return "NotAdDisplaying";
    case IntegrationStrategy::Unclassifiable: return "Unclassifiable";
  }
  return "?";
}

std::set<std::string> app_code_classes(
    const AppUpdate& update, const AdLibraryCatalog& catalog,
    const std::vector<std::string>& extra_third_party) {
  std::set<std::string> out;
  for (const auto& [fqn, cls] : update.classes)
    if (is_app_code(fqn, catalog, extra_third_party)) out.insert(fqn);
  return out;
}

std::set<std::string> accessed_libraries(const AppUpdate& update,
                                         const AdLibraryCatalog& catalog) {
  std::set<std::string> integrated = integrated_libraries(update, catalog);
  const auto& third_party = default_third_party_prefixes();
  std::set<std::string> out;
  for (const auto& [fqn, cls] : update.classes) {
    if (!is_app_code(fqn, catalog, third_party)) continue;
    for (const auto& cs : cls.call_sites)
      if (auto owner = catalog.owner_of(cs.callee.owner_class))
        if (integrated.count(*owner)) out.insert(*owner);
  }
  return out;
}

MediatorFinding detect_external_mediator(const AppUpdate& update,
                                         const AdLibraryCatalog& catalog) {
  const auto& third_party = default_third_party_prefixes();
  std::set<std::string> integrated = integrated_libraries(update, catalog);

  // mediator prefix called from app code
  const AdLibraryEntry* mediator_entry = nullptr;
  std::string mediator_prefix;
  for (const auto& [fqn, cls] : update.classes) {
    if (!is_app_code(fqn, catalog, third_party)) continue;
    for (const auto& cs : cls.call_sites)
      for (const auto& entry : catalog.entries)
        for (const auto& mp : entry.mediator_prefixes)
          if (under_prefix(cs.callee.owner_class, mp) &&
              mediator_entry == nullptr) {
            mediator_entry = &entry;
            mediator_prefix = mp;
          }
    if (mediator_entry) break;
  }
  MediatorFinding finding;
  if (!mediator_entry) return finding;

  finding.kind = MediatorFinding::Kind::External;
  finding.package = mediator_prefix;
  for (const auto& [fqn, cls] : update.classes) {
    if (!under_prefix(fqn, mediator_prefix)) continue;
    for (const auto& cs : cls.call_sites)
      if (auto owner = catalog.owner_of(cs.callee.owner_class))
        if (integrated.count(*owner))
          finding.covered_libraries.insert(*owner);
  }
  return finding;
}

MediatorFinding detect_self_mediator(const AppUpdate& update,
                                     const AdLibraryCatalog& catalog) {
  const auto& third_party = default_third_party_prefixes();
  MediatorFinding finding;

  std::vector<std::string> caller_packages;
  std::set<std::string> covered;
  for (const auto& [fqn, cls] : update.classes) {
    if (!is_app_code(fqn, catalog, third_party)) continue;
    for (const auto& cs : cls.call_sites)
      if (auto owner = catalog.owner_of(cs.callee.owner_class)) {
        caller_packages.push_back(cls.package_path);
        covered.insert(*owner);
      }
  }
  if (caller_packages.empty()) return finding;

  // deepest package containing every ad-call-site caller
  std::vector<std::string> common = split_packages(caller_packages.front());
  for (const auto& pkg : caller_packages) {
    std::vector<std::string> segs = split_packages(pkg);
    size_t n = std::min(common.size(), segs.size());
    size_t k = 0;
    while (k < n && common[k] == segs[k]) ++k;
    common.resize(k);
  }
  if (common.empty()) return finding;  // root/default package
  std::string package = join_packages(common, common.size());

  for (const auto& activity : update.activities)
    if (under_prefix(activity, package)) return finding;  // screens inside

  finding.kind = MediatorFinding::Kind::Self;
  finding.package = package;
  finding.covered_libraries = std::move(covered);
  return finding;
}

StrategyResult classify_strategy(const AppUpdate& update,
                                 const AdLibraryCatalog& catalog) {
  StrategyResult result;
  AdIntegrationProfile profile = build_profile(update, catalog);
  result.integrated = profile.integrated;
  result.accessed = profile.accessed;
  if (profile.role != AppRole::AdDisplaying) {
    result.strategy = IntegrationStrategy::NotAdDisplaying;
    return result;
  }
  if (result.integrated.size() == 1) {
    result.strategy = IntegrationStrategy::SingleLibrary;
    return result;
  }

  MediatorFinding external = detect_external_mediator(update, catalog);
  if (result.accessed.size() == 1 &&
      external.kind == MediatorFinding::Kind::External) {
    result.strategy = IntegrationStrategy::ExternalMediation;
    result.mediator = std::move(external);
    return result;
  }
  if (result.accessed.size() == result.integrated.size()) {
    MediatorFinding self = detect_self_mediator(update, catalog);
    if (self.kind == MediatorFinding::Kind::Self) {
      result.strategy = IntegrationStrategy::SelfMediation;
      result.mediator = std::move(self);
    } else {
      result.strategy = IntegrationStrategy::Scattered;
    }
    return result;
  }
  if (result.accessed.size() < result.integrated.size() &&
      external.kind == MediatorFinding::Kind::External &&
      !external.covered_libraries.empty()) {
    result.strategy = IntegrationStrategy::Mixed;
    result.mediator = std::move(external);
    return result;
  }
  result.strategy = IntegrationStrategy::Unclassifiable;
  result.diagnostic =
      "accessed (" + std::to_string(result.accessed.size()) +
      ") < integrated (" + std::to_string(result.integrated.size()) +
      ") with no mediator in reach";
  return result;
}

std::vector<StrategyDistributionRow> strategy_distribution(
    const Corpus& corpus, const AdLibraryCatalog& catalog) {
  std::map<IntegrationStrategy, int> counts;
  int total = 0;
  for (const auto& [app_id, lineage] : corpus.lineages) {
    StrategyResult r = classify_strategy(lineage.latest(), catalog);
    if (r.strategy == IntegrationStrategy::NotAdDisplaying ||
        r.strategy == IntegrationStrategy::SingleLibrary)
      continue;
    ++counts[r.strategy];
    ++total;
  }
  std::vector<StrategyDistributionRow> rows;
  if (total == 0) return rows;
  for (IntegrationStrategy s :
       {IntegrationStrategy::ExternalMediation,
        IntegrationStrategy::SelfMediation, IntegrationStrategy::Scattered,
        IntegrationStrategy::Mixed, IntegrationStrategy::Unclassifiable}) {
    auto it = counts.find(s);
    int n = it == counts.end() ? 0 : it->second;
    if (s == IntegrationStrategy::Unclassifiable && n == 0) continue;
    rows.push_back({s, n, 100.0 * n / total});
  }
  return rows;
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
  if (values.empty()) throw Error("EmptySample", "five-number summary of []");
  std::sort(values.begin(), values.end());
  auto quantile = [&values](double p) {
    double h = (static_cast<double>(values.size()) - 1) * p;
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, values.size() - 1);
    double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  FiveNumberSummary s;
  s.n = static_cast<int>(values.size());
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(0.25);
  s.median = quantile(0.5);
  s.q3 = quantile(0.75);
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  return s;
}

std::vector<StrategyCountSummaryRow> integrated_count_summary(
    const Corpus& corpus, const AdLibraryCatalog& catalog) {
  std::map<IntegrationStrategy, std::vector<double>> samples;
  for (const auto& [app_id, lineage] : corpus.lineages) {
    StrategyResult r = classify_strategy(lineage.latest(), catalog);
    if (r.strategy == IntegrationStrategy::NotAdDisplaying ||
        r.strategy == IntegrationStrategy::SingleLibrary)
      continue;
    samples[r.strategy].push_back(static_cast<double>(r.integrated.size()));
  }
  std::vector<StrategyCountSummaryRow> rows;
  for (IntegrationStrategy s :
       {IntegrationStrategy::ExternalMediation,
        IntegrationStrategy::SelfMediation, IntegrationStrategy::Scattered,
        IntegrationStrategy::Mixed, IntegrationStrategy::Unclassifiable}) {
    auto it = samples.find(s);
    if (it == samples.end()) continue;
    rows.push_back({s, five_number_summary(it->second)});
  }
  return rows;
}

}  // namespace adlens
