#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cefr/core.hpp"

namespace cefr {

enum class Source { Import, Local };

std::string_view format_source(Source source) noexcept;
Source parse_source(std::string_view text);

/// One grading event. Unrecorded is the absence of assessments, never a row.
struct Assessment {
    std::string student_id;
    std::string competency_id;
    Score score{1};
    std::optional<std::string> feedback;
    std::string assessor;
    Timestamp timestamp{};
    Source source = Source::Local;

    bool operator==(const Assessment&) const = default;
};

/// Order in which assessments of one (student, competency) pair supersede each
/// other: later timestamp, then higher score, then local over import. Assessor
/// and feedback only make the order total.
bool superseded_by(const Assessment& older, const Assessment& newer);

/// Exact-record identity used to skip duplicates on merge.
bool same_record(const Assessment& lhs, const Assessment& rhs);

struct Dossier {
    Student student;
    std::vector<Assessment> history; ///< ordered by timestamp, then score

    bool operator==(const Dossier&) const = default;
};

struct Course {
    std::string id;
    std::string full_name;
    std::string short_name;
    CefrLevel level = CefrLevel::A1;
    std::vector<std::string> competency_ids;
    std::set<std::string> roster;

    bool contains(std::string_view competency_id) const;
    bool enrolled(std::string_view student_id) const;
    bool operator==(const Course&) const = default;
};

/// Competencies in insertion order, indexed by id.
class Taxonomy {
public:
    /// Returns false when an identical competency is already present.
    /// Throws DuplicateSlugConflict when the id exists with different content.
    bool add(Competency competency);

    const Competency* find(std::string_view id) const;
    const Competency& at(std::string_view id) const;
    bool contains(std::string_view id) const { return find(id) != nullptr; }

    const std::vector<Competency>& all() const noexcept { return items_; }
    std::vector<Competency> at_level(CefrLevel level) const;
    std::vector<Competency> at_level(CefrLevel level, CompetencyKind kind) const;
    std::size_t size() const noexcept { return items_.size(); }

    bool operator==(const Taxonomy& other) const { return items_ == other.items_; }

private:
    std::vector<Competency> items_;
    std::unordered_map<std::string, std::size_t> index_;
};

using Clock = std::function<Timestamp()>;

/// The single source of truth: taxonomy, students, courses and the
/// append-only assessment history. A value type; Repository hands out
/// immutable snapshots of it.
class Store {
public:
    explicit Store(Clock clock = system_now);

    // -- taxonomy ----------------------------------------------------------
    const Taxonomy& taxonomy() const noexcept { return taxonomy_; }
    bool add_competency(Competency competency);
    const Competency& competency(std::string_view id) const { return taxonomy_.at(id); }

    // -- students ----------------------------------------------------------
    void add_student(Student student);
    const Student& student(std::string_view id) const;
    const Student* find_student(std::string_view id) const;
    /// Students whose email equals `email` exactly.
    std::vector<const Student*> students_with_email(std::string_view email) const;
    /// All students in roster order.
    std::vector<Student> students() const;

    // -- courses -----------------------------------------------------------
    void create_course(Course course);
    const Course& course(std::string_view id) const;
    const Course* find_course(std::string_view id) const;
    const Course* find_course_by_short_name(std::string_view short_name) const;
    /// Ordered by course id.
    std::vector<Course> courses() const;

    void enroll(std::string_view course_id, std::string_view student_id);
    void unenroll(std::string_view course_id, std::string_view student_id);
    void rename_course(std::string_view course_id, std::string full_name, std::string short_name);
    /// Appends to the course column list; no-op when already present.
    void attach_competency(std::string_view course_id, std::string_view competency_id);
    /// Replaces level, column list and roster in one step. History is untouched.
    void reset_course(std::string_view course_id, CefrLevel level,
                      std::vector<std::string> competency_ids, std::set<std::string> roster);

    // -- assessments -------------------------------------------------------
    Assessment record_assessment(std::string_view student_id, std::string_view competency_id,
                                 Score score, std::optional<std::string> feedback,
                                 std::string assessor);

    /// Appends an externally produced assessment (persistence, merge). Returns
    /// false, changing nothing, when an identical record already exists.
    bool append_assessment(Assessment assessment);

    Rating current_rating(std::string_view student_id, std::string_view competency_id) const;
    std::span<const Assessment> history(std::string_view student_id,
                                        std::string_view competency_id) const;
    /// Feedback of the most recent assessment of the pair that carries any.
    std::optional<std::string> latest_feedback(std::string_view student_id,
                                               std::string_view competency_id) const;
    Dossier dossier(std::string_view student_id) const;
    /// Every stored assessment, grouped by (student, competency), each group in
    /// supersede order.
    std::vector<Assessment> assessments() const;
    std::size_t assessment_count() const noexcept { return assessment_count_; }

    // -- clock -------------------------------------------------------------
    Timestamp now() const { return clock_(); }
    void set_clock(Clock clock) { clock_ = std::move(clock); }

    /// Observable-state equality; the clock is not compared.
    bool operator==(const Store& other) const;

private:
    Course& mutable_course(std::string_view id);

    Taxonomy taxonomy_;
    std::map<std::string, Student, std::less<>> students_;
    std::map<std::string, Course, std::less<>> courses_;
    std::map<std::pair<std::string, std::string>, std::vector<Assessment>> history_;
    std::size_t assessment_count_ = 0;
    Clock clock_;
};

} // namespace cefr
