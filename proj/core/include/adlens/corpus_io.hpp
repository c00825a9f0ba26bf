#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace adlens {

// Textual IR, schema "ir v1" (see docs/ir-schema-v1.md). One JSON object per
// line: first the update header, then one line per class.

// Serializes one update. Output is deterministic: classes in fqn order,
// methods and call sites in stored order.
void store_ir(const AppUpdate& update, const std::filesystem::path& path);
void store_ir(const AppUpdate& update, std::ostream& out);

// Parses one update.ir.jsonl. app_id/version_code come from the header.
AppUpdate load_ir(const std::filesystem::path& path);
AppUpdate load_ir(std::istream& in, const std::string& origin);

struct LoadOptions {
  bool verify_checksum = false;  // DEX Adler32; off so truncated fixtures load
  int parallelism = 1;           // update directories parsed concurrently
};

// Loads a corpus laid out as <root>/<app_id>/app.meta plus one directory per
// update holding either update.ir.jsonl or classes*.dex + AndroidManifest.xml.
// Lineages come back ordered by version_code. Non-fatal oddities (duplicate
// classes across dex files, activities without a backing class) are appended
// to `warnings` when given.
Corpus load_corpus(const std::filesystem::path& root,
                   const LoadOptions& options = {},
                   std::vector<std::string>* warnings = nullptr);

}  // namespace adlens
