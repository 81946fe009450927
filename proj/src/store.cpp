#include "cefr/store.hpp"

#include <algorithm>
#include <tuple>

#include "cefr/error.hpp"

namespace cefr {
namespace {

auto supersede_key(const Assessment& a)
{
    return std::tie(a.timestamp, a.score, a.source, a.assessor, a.feedback);
}

const std::vector<Assessment>& empty_history()
{
    static const std::vector<Assessment> empty;
    return empty;
}

} // namespace

std::string_view format_source(Source source) noexcept
{
    return source == Source::Local ? "local" : "import";
}

Source parse_source(std::string_view text)
{
    if (text == "local") {
        return Source::Local;
    }
    if (text == "import") {
        return Source::Import;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown assessment source: " + std::string(text));
}

bool superseded_by(const Assessment& older, const Assessment& newer)
{
    return supersede_key(older) < supersede_key(newer);
}

bool same_record(const Assessment& lhs, const Assessment& rhs)
{
    return std::tie(lhs.student_id, lhs.competency_id, lhs.score, lhs.timestamp, lhs.assessor)
        == std::tie(rhs.student_id, rhs.competency_id, rhs.score, rhs.timestamp, rhs.assessor);
}

bool Course::contains(std::string_view competency_id) const
{
    return std::find(competency_ids.begin(), competency_ids.end(), competency_id)
        != competency_ids.end();
}

bool Course::enrolled(std::string_view student_id) const
{
    return roster.find(std::string(student_id)) != roster.end();
}

// ---------------------------------------------------------------------------

bool Taxonomy::add(Competency competency)
{
    validate(competency);
    if (const auto* existing = find(competency.id)) {
        if (*existing == competency) {
            return false;
        }
        throw Error(ErrorCode::DuplicateSlugConflict,
                    "competency '" + competency.id + "' already exists with different content",
                    {{"slug", competency.id}});
    }
    index_.emplace(competency.id, items_.size());
    items_.push_back(std::move(competency));
    return true;
}

const Competency* Taxonomy::find(std::string_view id) const
{
    const auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &items_[it->second];
}

const Competency& Taxonomy::at(std::string_view id) const
{
    if (const auto* c = find(id)) {
        return *c;
    }
    throw Error(ErrorCode::UnknownCompetency, "unknown competency: " + std::string(id),
                {{"competency", std::string(id)}});
}

std::vector<Competency> Taxonomy::at_level(CefrLevel level) const
{
    std::vector<Competency> out;
    std::copy_if(items_.begin(), items_.end(), std::back_inserter(out),
                 [level](const Competency& c) { return c.level == level; });
    return out;
}

std::vector<Competency> Taxonomy::at_level(CefrLevel level, CompetencyKind kind) const
{
    std::vector<Competency> out;
    std::copy_if(items_.begin(), items_.end(), std::back_inserter(out),
                 [=](const Competency& c) { return c.level == level && c.kind == kind; });
    return out;
}

// ---------------------------------------------------------------------------

Store::Store(Clock clock) : clock_(std::move(clock)) {}

bool Store::add_competency(Competency competency)
{
    return taxonomy_.add(std::move(competency));
}

void Store::add_student(Student student)
{
    validate(student);
    if (students_.contains(student.id)) {
        throw Error(ErrorCode::DuplicateStudent, "student id already exists: " + student.id,
                    {{"student", student.id}});
    }
    auto id = student.id;
    students_.emplace(std::move(id), std::move(student));
}

const Student* Store::find_student(std::string_view id) const
{
    const auto it = students_.find(id);
    return it == students_.end() ? nullptr : &it->second;
}

const Student& Store::student(std::string_view id) const
{
    if (const auto* s = find_student(id)) {
        return *s;
    }
    throw Error(ErrorCode::UnknownStudent, "unknown student: " + std::string(id),
                {{"student", std::string(id)}});
}

std::vector<const Student*> Store::students_with_email(std::string_view email) const
{
    std::vector<const Student*> out;
    for (const auto& [id, s] : students_) {
        if (s.email == email) {
            out.push_back(&s);
        }
    }
    return out;
}

std::vector<Student> Store::students() const
{
    std::vector<Student> out;
    out.reserve(students_.size());
    for (const auto& [id, s] : students_) {
        out.push_back(s);
    }
    std::sort(out.begin(), out.end(), roster_order);
    return out;
}

void Store::create_course(Course course)
{
    if (course.id.empty() || course.short_name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "course id and short name must not be empty");
    }
    if (courses_.contains(course.id)) {
        throw Error(ErrorCode::DuplicateCourse, "course id already exists: " + course.id,
                    {{"course", course.id}});
    }
    if (find_course_by_short_name(course.short_name)) {
        throw Error(ErrorCode::DuplicateShortName,
                    "course short name already taken: " + course.short_name,
                    {{"short_name", course.short_name}});
    }
    std::vector<std::string> columns;
    for (const auto& cid : course.competency_ids) {
        const auto& c = taxonomy_.at(cid);
        if (c.level != course.level) {
            throw Error(ErrorCode::CompetencyLevelMismatch,
                        "competency " + cid + " is " + std::string(format_level(c.level))
                            + ", course is " + std::string(format_level(course.level)),
                        {{"competency", cid}});
        }
        if (std::find(columns.begin(), columns.end(), cid) == columns.end()) {
            columns.push_back(cid);
        }
    }
    course.competency_ids = std::move(columns);
    for (const auto& sid : course.roster) {
        student(sid);
    }
    auto id = course.id;
    courses_.emplace(std::move(id), std::move(course));
}

const Course* Store::find_course(std::string_view id) const
{
    const auto it = courses_.find(id);
    return it == courses_.end() ? nullptr : &it->second;
}

const Course& Store::course(std::string_view id) const
{
    if (const auto* c = find_course(id)) {
        return *c;
    }
    throw Error(ErrorCode::UnknownCourse, "unknown course: " + std::string(id),
                {{"course", std::string(id)}});
}

Course& Store::mutable_course(std::string_view id)
{
    course(id);
    return courses_.find(id)->second;
}

const Course* Store::find_course_by_short_name(std::string_view short_name) const
{
    for (const auto& [id, c] : courses_) {
        if (c.short_name == short_name) {
            return &c;
        }
    }
    return nullptr;
}

std::vector<Course> Store::courses() const
{
    std::vector<Course> out;
    out.reserve(courses_.size());
    for (const auto& [id, c] : courses_) {
        out.push_back(c);
    }
    return out;
}

void Store::enroll(std::string_view course_id, std::string_view student_id)
{
    auto& c = mutable_course(course_id);
    student(student_id);
    c.roster.insert(std::string(student_id));
}

void Store::unenroll(std::string_view course_id, std::string_view student_id)
{
    auto& c = mutable_course(course_id);
    student(student_id);
    c.roster.erase(std::string(student_id));
}

void Store::rename_course(std::string_view course_id, std::string full_name, std::string short_name)
{
    auto& c = mutable_course(course_id);
    if (short_name.empty()) {
        throw Error(ErrorCode::InvalidArgument, "course short name must not be empty");
    }
    if (const auto* other = find_course_by_short_name(short_name); other && other->id != c.id) {
        throw Error(ErrorCode::DuplicateShortName, "course short name already taken: " + short_name,
                    {{"short_name", short_name}});
    }
    c.full_name = std::move(full_name);
    c.short_name = std::move(short_name);
}

void Store::attach_competency(std::string_view course_id, std::string_view competency_id)
{
    auto& c = mutable_course(course_id);
    const auto& comp = taxonomy_.at(competency_id);
    if (comp.level != c.level) {
        throw Error(ErrorCode::CompetencyLevelMismatch,
                    "competency " + comp.id + " does not match course level",
                    {{"competency", comp.id}});
    }
    if (!c.contains(competency_id)) {
        c.competency_ids.emplace_back(competency_id);
    }
}

void Store::reset_course(std::string_view course_id, CefrLevel level,
                         std::vector<std::string> competency_ids, std::set<std::string> roster)
{
    auto& c = mutable_course(course_id);
    for (const auto& cid : competency_ids) {
        if (taxonomy_.at(cid).level != level) {
            throw Error(ErrorCode::CompetencyLevelMismatch,
                        "competency " + cid + " does not match course level",
                        {{"competency", cid}});
        }
    }
    for (const auto& sid : roster) {
        student(sid);
    }
    c.level = level;
    c.competency_ids = std::move(competency_ids);
    c.roster = std::move(roster);
}

Assessment Store::record_assessment(std::string_view student_id, std::string_view competency_id,
                                    Score score, std::optional<std::string> feedback,
                                    std::string assessor)
{
    student(student_id);
    taxonomy_.at(competency_id);
    const bool enrolled = std::any_of(courses_.begin(), courses_.end(), [&](const auto& entry) {
        return entry.second.enrolled(student_id) && entry.second.contains(competency_id);
    });
    if (!enrolled) {
        throw Error(ErrorCode::StudentNotEnrolled,
                    "student " + std::string(student_id)
                        + " is not enrolled in a course containing " + std::string(competency_id),
                    {{"student", std::string(student_id)},
                     {"competency", std::string(competency_id)}});
    }

    auto stamp = clock_();
    const auto existing = history(student_id, competency_id);
    if (!existing.empty() && stamp <= existing.back().timestamp) {
        stamp = existing.back().timestamp + std::chrono::milliseconds{1};
    }

    Assessment a{std::string(student_id), std::string(competency_id), score,
                 std::move(feedback), std::move(assessor), stamp, Source::Local};
    append_assessment(a);
    return a;
}

bool Store::append_assessment(Assessment assessment)
{
    auto& list = history_[{assessment.student_id, assessment.competency_id}];
    if (std::any_of(list.begin(), list.end(),
                    [&](const Assessment& a) { return same_record(a, assessment); })) {
        return false;
    }
    const auto pos = std::upper_bound(list.begin(), list.end(), assessment, superseded_by);
    list.insert(pos, std::move(assessment));
    ++assessment_count_;
    return true;
}

std::span<const Assessment> Store::history(std::string_view student_id,
                                           std::string_view competency_id) const
{
    const auto it = history_.find({std::string(student_id), std::string(competency_id)});
    return it == history_.end() ? std::span<const Assessment>(empty_history())
                                : std::span<const Assessment>(it->second);
}

Rating Store::current_rating(std::string_view student_id, std::string_view competency_id) const
{
    student(student_id);
    const auto list = history(student_id, competency_id);
    return list.empty() ? Rating::unrecorded() : Rating(list.back().score);
}

std::optional<std::string> Store::latest_feedback(std::string_view student_id,
                                                  std::string_view competency_id) const
{
    const auto list = history(student_id, competency_id);
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
        if (it->feedback && !it->feedback->empty()) {
            return it->feedback;
        }
    }
    return std::nullopt;
}

Dossier Store::dossier(std::string_view student_id) const
{
    Dossier d{student(student_id), {}};
    for (const auto& [key, list] : history_) {
        if (key.first == student_id) {
            d.history.insert(d.history.end(), list.begin(), list.end());
        }
    }
    std::stable_sort(d.history.begin(), d.history.end(),
                     [](const Assessment& a, const Assessment& b) {
                         return std::tie(a.timestamp, a.score) < std::tie(b.timestamp, b.score);
                     });
    return d;
}

std::vector<Assessment> Store::assessments() const
{
    std::vector<Assessment> out;
    out.reserve(assessment_count_);
    for (const auto& [key, list] : history_) {
        out.insert(out.end(), list.begin(), list.end());
    }
    return out;
}

bool Store::operator==(const Store& other) const
{
    if (taxonomy_ != other.taxonomy_ || students_ != other.students_
        || courses_ != other.courses_ || assessment_count_ != other.assessment_count_) {
        return false;
    }
    return assessments() == other.assessments();
}

} // namespace cefr
