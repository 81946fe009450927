#include "cefr/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <tuple>

#include "cefr/error.hpp"

namespace cefr {
namespace {

std::string upper(std::string_view text)
{
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

// Howard Hinnant's civil calendar conversions.
constexpr long long days_from_civil(long long y, unsigned m, unsigned d) noexcept
{
    y -= m <= 2;
    const long long era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long long>(doe) - 719468;
}

constexpr std::tuple<long long, unsigned, unsigned> civil_from_days(long long z) noexcept
{
    z += 719468;
    const long long era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long long y = static_cast<long long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {y + (m <= 2), m, d};
}

int read_digits(std::string_view text, std::size_t pos, std::size_t count)
{
    if (pos + count > text.size()) {
        throw Error(ErrorCode::InvalidArgument, "truncated timestamp: " + std::string(text));
    }
    int value = 0;
    const auto* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + count, value);
    if (ec != std::errc{} || ptr != first + count) {
        throw Error(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
    }
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c)
{
    if (pos >= text.size() || text[pos] != c) {
        throw Error(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
    }
}

} // namespace

CefrLevel parse_level(std::string_view text)
{
    const auto token = upper(text);
    for (auto level : kAllLevels) {
        if (format_level(level) == token) {
            return level;
        }
    }
    throw Error(ErrorCode::UnknownLevel, "unknown CEFR level: " + std::string(text),
                {{"text", std::string(text)}});
}

std::string_view format_level(CefrLevel level) noexcept
{
    switch (level) {
    case CefrLevel::A1: return "A1";
    case CefrLevel::A2: return "A2";
    case CefrLevel::B1: return "B1";
    case CefrLevel::B2: return "B2";
    case CefrLevel::C1: return "C1";
    case CefrLevel::C2: return "C2";
    }
    return "A1";
}

std::optional<CefrLevel> next_level(CefrLevel level) noexcept
{
    if (level == CefrLevel::C2) {
        return std::nullopt;
    }
    return static_cast<CefrLevel>(static_cast<int>(level) + 1);
}

CompetencyKind parse_kind(std::string_view text)
{
    const auto token = upper(text);
    if (token == "GRAMMAR") {
        return CompetencyKind::Grammar;
    }
    if (token == "FUNCTION") {
        return CompetencyKind::Function;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown competency kind: " + std::string(text));
}

std::string_view format_kind(CompetencyKind kind) noexcept
{
    return kind == CompetencyKind::Grammar ? "grammar" : "function";
}

Score::Score(int value) : value_(value)
{
    if (value < kMin || value > kMax) {
        throw Error(ErrorCode::ScoreOutOfRange,
                    "score must be between 1 and 5, got " + std::to_string(value),
                    {{"score", std::to_string(value)}});
    }
}

std::string_view score_label(Score score) noexcept
{
    switch (score.value()) {
    case 5: return "mastery";
    case 4: return "acceptable performance";
    case 3: return "working performance";
    case 2: return "limited performance";
    default: return "minimal performance";
    }
}

std::string Rating::to_string() const
{
    return score_ ? std::to_string(score_->value()) : std::string("-");
}

void validate(const Competency& competency)
{
    if (competency.id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "competency id must not be empty");
    }
    if (competency.title.empty()) {
        throw Error(ErrorCode::InvalidArgument,
                    "competency title must not be empty: " + competency.id);
    }
}

void validate(const Student& student)
{
    if (student.id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "student id must not be empty");
    }
    if (student.email.find('@') == std::string::npos) {
        throw Error(ErrorCode::InvalidArgument,
                    "student email is not plausible: " + student.email,
                    {{"email", student.email}});
    }
}

bool roster_order(const Student& lhs, const Student& rhs)
{
    return std::tie(lhs.surname, lhs.first_name, lhs.id)
         < std::tie(rhs.surname, rhs.first_name, rhs.id);
}

std::string format_timestamp(Timestamp ts)
{
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const auto [y, m, d] = civil_from_days(day_point.time_since_epoch().count());
    auto rest = ts - day_point;
    const auto h = duration_cast<hours>(rest);
    rest -= h;
    const auto min = duration_cast<minutes>(rest);
    rest -= min;
    const auto s = duration_cast<seconds>(rest);
    rest -= s;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ", y, m, d,
                  static_cast<int>(h.count()), static_cast<int>(min.count()),
                  static_cast<int>(s.count()), static_cast<int>(rest.count()));
    return buf;
}

Timestamp parse_timestamp(std::string_view text)
{
    // YYYY-MM-DDTHH:MM:SS[.mmm](Z|+00:00)
    const int year = read_digits(text, 0, 4);
    expect_char(text, 4, '-');
    const int month = read_digits(text, 5, 2);
    expect_char(text, 7, '-');
    const int day = read_digits(text, 8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't')) {
        throw Error(ErrorCode::InvalidArgument, "bad timestamp: " + std::string(text));
    }
    const int hour = read_digits(text, 11, 2);
    expect_char(text, 13, ':');
    const int minute = read_digits(text, 14, 2);
    expect_char(text, 16, ':');
    const int second = read_digits(text, 17, 2);
    std::size_t pos = 19;
    int millis = 0;
    if (pos < text.size() && text[pos] == '.') {
        millis = read_digits(text, pos + 1, 3);
        pos += 4;
    }
    const auto zone = text.substr(pos);
    if (zone != "Z" && zone != "z" && zone != "+00:00") {
        throw Error(ErrorCode::InvalidArgument, "timestamp must be UTC: " + std::string(text));
    }
    if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59
        || second > 60) {
        throw Error(ErrorCode::InvalidArgument, "timestamp out of range: " + std::string(text));
    }
    using namespace std::chrono;
    const auto days_since_epoch =
        days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return Timestamp{milliseconds{((days_since_epoch * 24 + hour) * 60 + minute) * 60'000LL
                                  + second * 1000LL + millis}};
}

Timestamp system_now()
{
    return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

} // namespace cefr
