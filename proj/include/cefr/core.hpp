#pragma once

#include <array>
#include <chrono>
#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace cefr {

// ---------------------------------------------------------------------------
// Levels and kinds
// ---------------------------------------------------------------------------

/// The six CEFR proficiency levels, declared in their total order.
enum class CefrLevel { A1, A2, B1, B2, C1, C2 };

inline constexpr std::array kAllLevels{CefrLevel::A1, CefrLevel::A2, CefrLevel::B1,
                                       CefrLevel::B2, CefrLevel::C1, CefrLevel::C2};

/// Case-insensitive; throws Error{UnknownLevel} for anything but the six symbols.
CefrLevel parse_level(std::string_view text);
std::string_view format_level(CefrLevel level) noexcept;
std::optional<CefrLevel> next_level(CefrLevel level) noexcept;

enum class CompetencyKind { Grammar, Function };

CompetencyKind parse_kind(std::string_view text);
std::string_view format_kind(CompetencyKind kind) noexcept;

// ---------------------------------------------------------------------------
// Scale
// ---------------------------------------------------------------------------

/// A recorded rating on the 5-point scale. Construction validates the range.
class Score {
public:
    static constexpr int kMin = 1;
    static constexpr int kMax = 5;

    explicit Score(int value);

    int value() const noexcept { return value_; }
    auto operator<=>(const Score&) const = default;

private:
    int value_;
};

std::string_view score_label(Score score) noexcept;

/// Recorded(Score) or Unrecorded. Unrecorded compares unequal to every score.
class Rating {
public:
    Rating() = default;
    Rating(Score score) : score_(score) {}

    static Rating unrecorded() noexcept { return Rating{}; }

    bool recorded() const noexcept { return score_.has_value(); }
    Score score() const { return score_.value(); }
    const std::optional<Score>& optional_score() const noexcept { return score_; }

    /// "-" for Unrecorded, the digit otherwise.
    std::string to_string() const;

    bool operator==(const Rating&) const = default;

private:
    std::optional<Score> score_;
};

// ---------------------------------------------------------------------------
// Entities
// ---------------------------------------------------------------------------

struct Competency {
    std::string id;
    CefrLevel level = CefrLevel::A1;
    CompetencyKind kind = CompetencyKind::Grammar;
    std::string title;
    std::optional<std::string> description;

    bool operator==(const Competency&) const = default;
};

/// Throws InvalidArgument when id or title is empty.
void validate(const Competency& competency);

struct Student {
    std::string id;
    std::string surname;
    std::string first_name;
    std::string email;

    std::string full_name() const { return first_name + " " + surname; }
    bool operator==(const Student&) const = default;
};

/// Throws InvalidArgument when id is empty or email lacks an '@'.
void validate(const Student& student);

/// Surname, then first name, then id; the grader grid's "Surname ↑" order.
bool roster_order(const Student& lhs, const Student& rhs);

// ---------------------------------------------------------------------------
// Time
// ---------------------------------------------------------------------------

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// RFC 3339, UTC, millisecond precision: 2013-06-21T07:46:00.000Z
std::string format_timestamp(Timestamp ts);

/// Accepts the format produced by format_timestamp (a "Z" suffix or "+00:00").
Timestamp parse_timestamp(std::string_view text);

Timestamp system_now();

} // namespace cefr
