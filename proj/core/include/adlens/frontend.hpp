#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "adlens/model.hpp"

namespace adlens {

// --- DEX ---

struct DexOptions {
  bool verify_checksum = false;  // Adler32 over bytes [12, end)
};

// Parses a single DEX file (versions 035..039) into one ClassRecord per
// class_def. Call sites are taken from the invoke-family opcodes, including
// the /range forms and invoke-polymorphic; every other instruction is skipped
// by format-driven length tables. Arbitrary input bytes either parse or throw
// a FrontendError subtype; all counts and offsets are bounds-checked.
std::vector<ClassRecord> parse_dex(std::span<const std::uint8_t> bytes,
                                   const DexOptions& options = {});

// --- Manifest ---

struct ManifestInfo {
  std::string package_name;
  std::vector<std::string> activities;  // fully qualified, document order

  bool operator==(const ManifestInfo&) const = default;
};

// Parses AndroidManifest.xml, binary AXML (chunk type 0x0003) or plaintext
// UTF-8 XML as a fixture fallback. Relative activity names (".Foo") are
// resolved against the package attribute.
ManifestInfo parse_manifest(std::span<const std::uint8_t> bytes);

// --- Update directory ---

struct UpdateDirMeta {
  std::string app_id;
  std::int64_t version_code = 0;
  std::int64_t observed_at = 0;
  std::string category;
  std::int64_t download_count = 0;
};

// Parses a pre-extracted binary update: classes*.dex (>=1, multidex merged,
// duplicate fqns first-wins with a warning) plus AndroidManifest.xml.
// has_native_code is set when lib/ contains any .so entry.
AppUpdate parse_update_dir(const std::filesystem::path& dir,
                           const UpdateDirMeta& meta,
                           const DexOptions& options = {},
                           std::vector<std::string>* warnings = nullptr);

}  // namespace adlens
