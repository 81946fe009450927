#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cefr/core.hpp"

namespace cefr {

struct PlacementEntry {
    std::string test_name;
    double min_score = 0;
    double max_score = 0;
    CefrLevel level = CefrLevel::A1;

    bool operator==(const PlacementEntry&) const = default;
};

/// Maps external test scores onto CEFR levels. Ranges are inclusive at both
/// ends and must not overlap within one test; the constructor enforces this.
class PlacementTable {
public:
    PlacementTable() = default;
    explicit PlacementTable(std::vector<PlacementEntry> entries);

    /// CSV with header `test,min,max,level`.
    static PlacementTable from_csv(std::string_view text);
    static PlacementTable load(const std::filesystem::path& path);

    const std::vector<PlacementEntry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

private:
    std::vector<PlacementEntry> entries_;
};

/// Throws UnknownTest when the table has no row for test_name and
/// PlacementScoreOutOfRange when no row's range contains raw_score.
CefrLevel place_student(std::string_view test_name, double raw_score, const PlacementTable& table);

} // namespace cefr
