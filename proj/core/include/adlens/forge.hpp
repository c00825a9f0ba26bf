#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "adlens/catalog.hpp"
#include "adlens/detect.hpp"
#include "adlens/model.hpp"
#include "adlens/strategy.hpp"

namespace adlens {

// Synthetic-corpus generator. Every emitted app structurally realizes its
// label, and every lineage transition's events are enumerated at generation
// time, so expected metrics are exact rationals rather than sampled
// estimates.

struct FixtureSpec {
  std::uint64_t seed = 1;
  int app_count = 10;
  std::map<IntegrationStrategy, double> strategy_mix;  // over ad-displaying
  std::map<AppRole, double> role_mix;
  int updates_min = 1;
  int updates_max = 1;
  double seeded_modification_rate = 0.0;
  double seeded_add_remove_rate = 0.0;
  double seeded_version_change_rate = 0.0;
  std::vector<std::string> library_pool;  // empty = whole catalog

  void validate(const AdLibraryCatalog& catalog) const;
};

struct TransitionEvents {
  bool call_site_modified = false;
  bool library_added = false;
  bool library_removed = false;
  bool library_version_changed = false;
};

struct GroundTruthLabel {
  std::string app_id;
  AppRole role = AppRole::NonIntegrating;
  IntegrationStrategy strategy = IntegrationStrategy::NotAdDisplaying;
  std::vector<TransitionEvents> transitions;  // size = update_count - 1
  int update_count = 0;

  // exact expected metric numerators/denominators
  int modified_transitions = 0;
  int add_remove_updates = 0;
  int pairs_when_updated = 0;
  int modified_pairs_when_updated = 0;
  int pairs_when_not_updated = 0;
  int modified_pairs_when_not_updated = 0;
};

struct ForgeResult {
  Corpus corpus;
  std::vector<GroundTruthLabel> labels;
};

ForgeResult generate(const FixtureSpec& spec, const AdLibraryCatalog& catalog);

// Writes the corpus in the standard layout plus groundtruth.jsonl at root.
void write_forge_output(const ForgeResult& result,
                        const std::filesystem::path& root);

std::vector<GroundTruthLabel> load_ground_truth(
    const std::filesystem::path& path);

// "fixture v1" spec file: key=value lines; strategy_mix / role_mix /
// library_pool values are inline JSON.
FixtureSpec parse_fixture_spec(const std::filesystem::path& path);

enum class Mutation {
  AddCallSite,
  RemoveCallSite,
  RenameLibraryInternal,
  AddLibrary,
  RemoveLibrary,
};

// Applies exactly one structural change of the requested kind; throws
// Error("NotApplicable") when the update offers no site for it.
AppUpdate mutate_update(const AppUpdate& update, Mutation mutation,
                        std::uint64_t seed, const AdLibraryCatalog& catalog);

}  // namespace adlens
