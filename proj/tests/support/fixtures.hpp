#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "cefr/core.hpp"
#include "cefr/store.hpp"

namespace cefr::test {

std::filesystem::path source_dir();
std::string read_text(const std::filesystem::path& path);
std::string bundled_outcomes_csv();

/// Deterministic clock: 2013-06-21T07:46:00Z, one second per call. Copies
/// share the counter.
Clock stepping_clock();

/// Fresh scratch directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// The writer cohort from the course screenshots

inline constexpr const char* kCourse = "b1-grammar";
inline constexpr const char* kDiscourseCourse = "b1-discourse";
inline constexpr const char* kGarcia = "ggarcia";
inline constexpr const char* kGoswami = "agoswami";
inline constexpr const char* kRilke = "rrilke";
inline constexpr const char* kOe = "koe";
inline constexpr const char* kSembene = "osembene";
inline constexpr const char* kShouldHave = "b1-should-have-might-have-etc";
inline constexpr const char* kConnecting = "b1-connecting-words-expressing-cause-and-effect-contrast-etc";

/// Cohort in the screenshot's row order (not roster order).
std::vector<Student> writers();

/// The 17 user-report titles, top to bottom.
std::vector<std::string> user_report_titles();
/// Garcia-Marquez's grade per title above; 0 stands for "-".
std::vector<int> garcia_grades();

/// Bundled taxonomy, five writers, the 17-column grammar course with every
/// grade from the user report and the grader column, plus a one-column
/// discourse course holding the "connecting words" ratings.
Store writer_store();

// ---------------------------------------------------------------------------
// Random data

struct Limits {
    int max_students = 10;
    int max_competencies = 40;
    int max_assessments = 200;
};

/// 1..n competencies at one level; titles sometimes carry commas and quotes.
std::vector<Competency> random_taxonomy(std::mt19937& rng, CefrLevel level, int max_count);

/// Student derived from (prefix, index) only, so two stores built with the
/// same prefix agree on identities.
Student numbered_student(const std::string& prefix, int index);

/// One course over `taxonomy`, 1..max_students students, up to
/// max_assessments assessments with clustered timestamps (ties included).
Store random_course_store(std::mt19937& rng, const std::vector<Competency>& taxonomy,
                          const std::string& course_id, const std::string& student_prefix,
                          const Limits& limits = {});

/// Several courses at different levels sharing students; used for persistence.
Store random_store(std::mt19937& rng);

} // namespace cefr::test
