// Versioned, checksummed JSON files for the synthetic constants and oracle.
//
// Layout:
//   { "kind": "<file kind>", "schema_version": 1,
//     "checksum": "fnv1a64:<16 hex digits>", "payload": { ... } }
// The checksum is FNV-1a (64-bit) over the compact serialization of
// "payload" (sorted keys, shortest round-trip doubles). Loaders reject a
// wrong kind, an unknown schema version, or a checksum mismatch.
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "cbol/synthetic_system.hpp"

namespace cbol {

inline constexpr int kAssetSchemaVersion = 1;
inline constexpr std::string_view kSystemAssetKind = "cbol.synthetic_system";
inline constexpr std::string_view kOracleAssetKind = "cbol.oracle";

std::uint64_t fnv1a64(std::string_view bytes);

/// Write `payload_json` (any JSON text) inside the checksummed envelope.
void write_versioned_json(const std::filesystem::path& path, std::string_view kind, std::string_view payload_json);
/// Verify the envelope and return the compact payload text.
std::string read_versioned_json(const std::filesystem::path& path, std::string_view kind);

void save_synthetic_constants(const SyntheticConstants& constants, const std::filesystem::path& path);
SyntheticConstants load_synthetic_constants(const std::filesystem::path& path);

/// $CBOL_ASSET_DIR if set, otherwise the repository's assets/ directory.
std::filesystem::path default_asset_dir();
std::filesystem::path default_system_asset();
std::filesystem::path default_oracle_asset();

std::shared_ptr<const SyntheticSystem> load_synthetic_system(const std::filesystem::path& path);

}  // namespace cbol
