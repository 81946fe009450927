#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cefr/core.hpp"
#include "cefr/store.hpp"

namespace cefr {

// ---------------------------------------------------------------------------
// Outcomes CSV
// ---------------------------------------------------------------------------

/// Standard outcomes join the installation-wide taxonomy; custom outcomes are
/// additionally attached to one course.
struct ImportScope {
    std::optional<std::string> course_id;

    static ImportScope standard() { return {}; }
    static ImportScope custom(std::string course) { return {std::move(course)}; }
    bool is_custom() const noexcept { return course_id.has_value(); }
};

struct OutcomesImport {
    std::vector<Competency> competencies; ///< every row of the file, in order
    std::vector<std::string> added;       ///< ids that were new to the taxonomy
    std::vector<std::string> attached;    ///< ids attached to the custom course
};

/// Header `title,slug,kind,description`; the level is the title's first token.
/// Throws MalformedCsv (with the line) or DuplicateSlugConflict.
std::vector<Competency> parse_outcomes_csv(std::string_view text);

/// Re-importing identical rows is a no-op. Custom scope attaches the rows whose
/// level matches the course; the remaining rows still join the taxonomy.
OutcomesImport import_outcomes_csv(Store& store, std::string_view text, const ImportScope& scope);

// ---------------------------------------------------------------------------
// Archives
// ---------------------------------------------------------------------------

inline constexpr int kArchiveFormatVersion = 1;
inline constexpr std::string_view kArchiveExtension = ".ctar";

enum class ArchiveKind { Course, Dossier };

struct ArchiveManifest {
    int format_version = kArchiveFormatVersion;
    ArchiveKind kind = ArchiveKind::Course;
    Timestamp created_at{};
    std::string producer;

    bool operator==(const ArchiveManifest&) const = default;
};

/// A course or single-student dossier detached from any installation.
/// course.roster always equals the set of student ids.
struct Archive {
    ArchiveManifest manifest;
    std::vector<Competency> taxonomy;
    Course course;
    std::vector<Student> students;
    std::vector<Assessment> assessments;

    bool operator==(const Archive&) const = default;
};

/// Referential integrity and shape checks. Throws CorruptArchive or
/// UnsupportedVersion.
void validate(const Archive& archive);

/// Zip container with manifest.json first.
std::string encode_archive(const Archive& archive);
/// Inverse of encode_archive; validates before returning.
Archive decode_archive(std::string_view bytes);

Archive export_archive(const Store& store, std::string_view course_id);
Archive export_dossier(const Store& store, std::string_view course_id, std::string_view student_id);

// ---------------------------------------------------------------------------
// Import destinations and merge
// ---------------------------------------------------------------------------

struct ImportDestination {
    enum class Kind { NewCourse, MergeInto, Replace };

    Kind kind = Kind::NewCourse;
    /// Course id for MergeInto/Replace; optional full name for NewCourse.
    std::string target;

    static ImportDestination new_course(std::string name = {}) { return {Kind::NewCourse, std::move(name)}; }
    static ImportDestination merge_into(std::string course) { return {Kind::MergeInto, std::move(course)}; }
    static ImportDestination replace(std::string course) { return {Kind::Replace, std::move(course)}; }

    /// "new", "new:<name>", "merge:<course>", "replace:<course>".
    static ImportDestination parse(std::string_view text);
    std::string to_string() const;

    bool operator==(const ImportDestination&) const = default;
};

struct MergeSummary {
    std::size_t students_added = 0;
    std::size_t assessments_added = 0;
    std::size_t assessments_skipped = 0;
    std::size_t competencies_added = 0;

    bool operator==(const MergeSummary&) const = default;
};

struct ImportResult {
    std::string course_id;
    MergeSummary summary;

    bool operator==(const ImportResult&) const = default;
};

/// Unions the archive into an existing course of the same level. Students
/// match by id, then by exact email; incoming assessments are appended as
/// imports unless an identical record exists. Throws LevelMismatch,
/// IdentityConflict, UnknownCourse. Leaves the store untouched on error.
MergeSummary merge_into(Store& store, std::string_view course_id, const Archive& archive);

ImportResult import_archive(Store& store, const Archive& archive, const ImportDestination& dest);
ImportResult import_archive(Store& store, std::string_view bytes, const ImportDestination& dest);

} // namespace cefr
