#pragma once

#include <string>
#include <string_view>
#include <vector>

// Minimal zip container: deflate (or stored) entries, no directories, no
// zip64, no encryption. Enough for the archive format; not a general tool.
namespace cefr::zip {

struct Entry {
    std::string name;
    std::string data;

    bool operator==(const Entry&) const = default;
};

/// Entries are written in the given order. Names must be unique.
std::string write(const std::vector<Entry>& entries);

/// Reads entries in central-directory order, verifying sizes and CRC-32.
/// Throws Error{CorruptArchive} on any structural problem.
std::vector<Entry> read(std::string_view bytes);

} // namespace cefr::zip
