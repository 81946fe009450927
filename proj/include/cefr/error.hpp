#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cefr {

/// Every failure the library reports. Each value owns exactly one stable
/// machine code (see code_string) and one HTTP status.
enum class ErrorCode {
    UnknownLevel,
    ScoreOutOfRange,
    InvalidArgument,
    UnknownTest,
    PlacementScoreOutOfRange,
    InvalidPlacementTable,
    UnknownStudent,
    UnknownCompetency,
    UnknownCourse,
    StudentNotEnrolled,
    CompetencyNotInCourse,
    CompetencyLevelMismatch,
    DuplicateStudent,
    DuplicateCourse,
    DuplicateShortName,
    DuplicateSlugConflict,
    IdentityConflict,
    EmptyLevel,
    MalformedCsv,
    UnsupportedFormat,
    CorruptArchive,
    UnsupportedVersion,
    LevelMismatch,
    CorruptStore,
    IoError,
    ConfigError,
    PortInUse,
    Unauthorized,
    NotFound,
};

std::string_view code_string(ErrorCode code) noexcept;
int http_status(ErrorCode code) noexcept;

/// Inverse of code_string; unknown strings map to InvalidArgument.
ErrorCode code_from_string(std::string_view code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message,
          std::map<std::string, std::string> detail = {})
        : std::runtime_error(message), code_(code), detail_(std::move(detail))
    {
    }

    ErrorCode code() const noexcept { return code_; }
    std::string_view code_string() const noexcept { return cefr::code_string(code_); }
    const std::map<std::string, std::string>& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    std::map<std::string, std::string> detail_;
};

} // namespace cefr
