#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cefr/core.hpp"
#include "cefr/store.hpp"

namespace cefr {

/// Mean of the recorded scores rounded half-up and clamped to [1,5];
/// Unrecorded entries are ignored. Unrecorded when nothing is recorded.
Rating rounded_average(std::span<const Rating> ratings);

/// Mean of the recorded scores rounded to two decimals, or nullopt.
std::optional<double> raw_average(std::span<const Rating> ratings);

// ---------------------------------------------------------------------------

struct GraderRow {
    Student student;
    std::vector<Rating> cells;
    Rating course_total;
    std::optional<double> course_mean;

    bool operator==(const GraderRow&) const = default;
};

struct GraderColumn {
    std::string competency_id;
    std::string title;

    bool operator==(const GraderColumn&) const = default;
};

struct GraderReport {
    std::string course_id;
    std::string course_name;
    std::vector<GraderColumn> columns;
    std::vector<GraderRow> rows; ///< roster order
    std::vector<Rating> overall_average;
    std::vector<std::optional<double>> overall_mean;
    Rating overall_total; ///< rounded average of the row totals

    bool operator==(const GraderReport&) const = default;
};

/// Throws UnknownCourse.
GraderReport grader_report(const Store& store, std::string_view course_id);

// ---------------------------------------------------------------------------

inline constexpr std::string_view kScoreRange = "1-5";

struct UserReportRow {
    std::string competency_id;
    std::string title;
    Rating grade;
    std::string range{kScoreRange};
    std::string feedback;

    bool operator==(const UserReportRow&) const = default;
};

struct UserReport {
    Student student;
    std::string course_id;
    std::string course_name;
    Rating course_grade; ///< aggregate row, rounded mean on the 1-5 scale
    std::vector<UserReportRow> rows;

    bool operator==(const UserReport&) const = default;
};

/// Throws UnknownCourse, UnknownStudent or StudentNotEnrolled.
UserReport user_report(const Store& store, std::string_view student_id, std::string_view course_id);

// ---------------------------------------------------------------------------

struct GapPolicy {
    /// A topic is recommended for the curriculum when no studied rating
    /// exceeds this value (or nobody has studied it).
    int max_studied_score = 3;
};

struct GapAnalysis {
    std::string course_id;
    std::string competency_id;
    std::vector<std::string> studied;   ///< roster order
    std::vector<std::string> unstudied; ///< roster order
    std::vector<Rating> studied_ratings; ///< parallel to studied
    bool include_in_curriculum = false;

    bool operator==(const GapAnalysis&) const = default;
};

/// Throws UnknownCourse or CompetencyNotInCourse.
GapAnalysis gap_analysis(const Store& store, std::string_view course_id,
                         std::string_view competency_id, GapPolicy policy = {});

// ---------------------------------------------------------------------------

struct LevelChecklist {
    std::string student_id;
    CefrLevel level = CefrLevel::A1;
    Score threshold{4};
    std::vector<Competency> missing; ///< taxonomy order
    bool complete = false;

    bool operator==(const LevelChecklist&) const = default;
};

/// Throws UnknownStudent or EmptyLevel.
LevelChecklist level_checklist(const Store& store, std::string_view student_id, CefrLevel level,
                               Score threshold = Score{4});

// ---------------------------------------------------------------------------

enum class SheetFormat { Csv, Tsv };

/// "csv" or "tsv"; anything else throws UnsupportedFormat.
SheetFormat parse_sheet_format(std::string_view text);

/// Header: Surname, First name, Email address, one column per competency
/// title, Course total. A final "Overall average" row follows when the
/// roster is not empty. Unrecorded is "-".
std::string export_report(const GraderReport& report, SheetFormat format);

/// Header: Grade item, Grade, Range, Feedback. The first data row is the
/// course aggregate.
std::string export_report(const UserReport& report, SheetFormat format);

} // namespace cefr
