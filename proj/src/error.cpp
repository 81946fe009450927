#include "cefr/error.hpp"

#include <array>
#include <utility>

namespace cefr {
namespace {

struct CodeInfo {
    ErrorCode code;
    std::string_view name;
    int status;
};

constexpr std::array kCodes{
    CodeInfo{ErrorCode::UnknownLevel, "level.unknown", 400},
    CodeInfo{ErrorCode::ScoreOutOfRange, "score.out_of_range", 400},
    CodeInfo{ErrorCode::InvalidArgument, "request.invalid", 400},
    CodeInfo{ErrorCode::UnknownTest, "placement.unknown_test", 404},
    CodeInfo{ErrorCode::PlacementScoreOutOfRange, "placement.score_out_of_range", 400},
    CodeInfo{ErrorCode::InvalidPlacementTable, "placement.invalid_table", 400},
    CodeInfo{ErrorCode::UnknownStudent, "student.unknown", 404},
    CodeInfo{ErrorCode::UnknownCompetency, "competency.unknown", 404},
    CodeInfo{ErrorCode::UnknownCourse, "course.unknown", 404},
    CodeInfo{ErrorCode::StudentNotEnrolled, "student.not_enrolled", 409},
    CodeInfo{ErrorCode::CompetencyNotInCourse, "competency.not_in_course", 404},
    CodeInfo{ErrorCode::CompetencyLevelMismatch, "competency.level_mismatch", 422},
    CodeInfo{ErrorCode::DuplicateStudent, "student.duplicate_id", 409},
    CodeInfo{ErrorCode::DuplicateCourse, "course.duplicate_id", 409},
    CodeInfo{ErrorCode::DuplicateShortName, "course.duplicate_short_name", 409},
    CodeInfo{ErrorCode::DuplicateSlugConflict, "outcomes.duplicate_slug_conflict", 409},
    CodeInfo{ErrorCode::IdentityConflict, "student.identity_conflict", 409},
    CodeInfo{ErrorCode::EmptyLevel, "level.empty", 404},
    CodeInfo{ErrorCode::MalformedCsv, "outcomes.malformed_csv", 400},
    CodeInfo{ErrorCode::UnsupportedFormat, "report.unsupported_format", 400},
    CodeInfo{ErrorCode::CorruptArchive, "archive.corrupt", 422},
    CodeInfo{ErrorCode::UnsupportedVersion, "archive.unsupported_version", 422},
    CodeInfo{ErrorCode::LevelMismatch, "archive.level_mismatch", 422},
    CodeInfo{ErrorCode::CorruptStore, "store.corrupt", 500},
    CodeInfo{ErrorCode::IoError, "io.error", 500},
    CodeInfo{ErrorCode::ConfigError, "config.invalid", 500},
    CodeInfo{ErrorCode::PortInUse, "config.port_in_use", 500},
    CodeInfo{ErrorCode::Unauthorized, "auth.unauthorized", 401},
    CodeInfo{ErrorCode::NotFound, "route.not_found", 404},
};

const CodeInfo* find(ErrorCode code) noexcept
{
    for (const auto& info : kCodes) {
        if (info.code == code) {
            return &info;
        }
    }
    return nullptr;
}

} // namespace

std::string_view code_string(ErrorCode code) noexcept
{
    const auto* info = find(code);
    return info ? info->name : std::string_view{"internal"};
}

int http_status(ErrorCode code) noexcept
{
    const auto* info = find(code);
    return info ? info->status : 500;
}

ErrorCode code_from_string(std::string_view code) noexcept
{
    for (const auto& info : kCodes) {
        if (info.name == code) {
            return info.code;
        }
    }
    return ErrorCode::InvalidArgument;
}

} // namespace cefr
