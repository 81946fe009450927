#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "cefr/store.hpp"

namespace cefr {

inline constexpr int kStoreFormatVersion = 1;
inline constexpr std::string_view kStoreFileName = "store.json";

/// Versioned UTF-8 JSON document carrying a CRC-32 checksum of its own
/// canonical form (the document with the checksum key removed).
std::string serialize_store(const Store& store);

/// Throws CorruptStore on parse failure, version mismatch, checksum mismatch
/// or any referential inconsistency.
Store deserialize_store(std::string_view text, Clock clock = system_now);

/// Writes to a temporary sibling and renames it into place.
void save_store(const Store& store, const std::filesystem::path& path);

/// Throws IoError when the file cannot be read, CorruptStore as above.
Store load_store(const std::filesystem::path& path, Clock clock = system_now);

} // namespace cefr
