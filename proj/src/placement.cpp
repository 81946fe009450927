#include "cefr/placement.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cefr/csv.hpp"
#include "cefr/error.hpp"

namespace cefr {
namespace {

double parse_number(const std::string& text, std::size_t line)
{
    double value = 0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value)) {
        throw Error(ErrorCode::InvalidPlacementTable,
                    "line " + std::to_string(line) + ": not a number: '" + text + "'",
                    {{"line", std::to_string(line)}});
    }
    return value;
}

} // namespace

PlacementTable::PlacementTable(std::vector<PlacementEntry> entries) : entries_(std::move(entries))
{
    for (const auto& entry : entries_) {
        if (entry.test_name.empty()) {
            throw Error(ErrorCode::InvalidPlacementTable, "placement entry without a test name");
        }
        if (entry.min_score > entry.max_score) {
            throw Error(ErrorCode::InvalidPlacementTable,
                        "min > max for test " + entry.test_name,
                        {{"test", entry.test_name}});
        }
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        for (std::size_t j = i + 1; j < entries_.size(); ++j) {
            const auto& a = entries_[i];
            const auto& b = entries_[j];
            if (a.test_name == b.test_name && a.min_score <= b.max_score
                && b.min_score <= a.max_score) {
                throw Error(ErrorCode::InvalidPlacementTable,
                            "overlapping ranges for test " + a.test_name,
                            {{"test", a.test_name}});
            }
        }
    }
}

PlacementTable PlacementTable::from_csv(std::string_view text)
{
    const auto rows = csv::parse(text);
    if (rows.empty()) {
        throw Error(ErrorCode::InvalidPlacementTable, "placement table is empty");
    }
    if (rows.front() != csv::Row{"test", "min", "max", "level"}) {
        throw Error(ErrorCode::InvalidPlacementTable,
                    "placement table header must be test,min,max,level");
    }
    std::vector<PlacementEntry> entries;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto line = i + 1;
        if (row.size() != 4) {
            throw Error(ErrorCode::InvalidPlacementTable,
                        "line " + std::to_string(line) + ": expected 4 fields",
                        {{"line", std::to_string(line)}});
        }
        entries.push_back({row[0], parse_number(row[1], line), parse_number(row[2], line),
                           parse_level(row[3])});
    }
    return PlacementTable(std::move(entries));
}

PlacementTable PlacementTable::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read placement table " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return from_csv(buffer.str());
}

CefrLevel place_student(std::string_view test_name, double raw_score, const PlacementTable& table)
{
    bool known_test = false;
    for (const auto& entry : table.entries()) {
        if (entry.test_name != test_name) {
            continue;
        }
        known_test = true;
        if (entry.min_score <= raw_score && raw_score <= entry.max_score) {
            return entry.level;
        }
    }
    if (!known_test) {
        throw Error(ErrorCode::UnknownTest, "no placement entries for test " + std::string(test_name),
                    {{"test", std::string(test_name)}});
    }
    std::ostringstream score;
    score << raw_score;
    throw Error(ErrorCode::PlacementScoreOutOfRange,
                "score " + score.str() + " is outside every range for " + std::string(test_name),
                {{"test", std::string(test_name)}, {"score", score.str()}});
}

} // namespace cefr
