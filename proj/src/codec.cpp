#include "cefr/codec.hpp"

namespace cefr::codec {
namespace {

template <class T>
Json list_to_json(const std::vector<T>& items)
{
    auto out = Json::array();
    for (const auto& item : items) {
        out.push_back(to_json(item));
    }
    return out;
}

template <class F>
auto list_from_json(const Json& j, F&& decode)
{
    if (!j.is_array()) {
        throw Error(ErrorCode::InvalidArgument, "expected a JSON array");
    }
    std::vector<decltype(decode(j))> out;
    out.reserve(j.size());
    for (const auto& item : j) {
        out.push_back(decode(item));
    }
    return out;
}

Json optional_number(const std::optional<double>& v)
{
    return v ? Json(*v) : Json(nullptr);
}

std::optional<double> optional_number_from(const Json& j)
{
    if (j.is_null()) {
        return std::nullopt;
    }
    return j.get<double>();
}

std::vector<std::string> strings_from(const Json& j)
{
    return list_from_json(j, [](const Json& s) { return s.get<std::string>(); });
}

} // namespace

Json to_json(const Rating& rating)
{
    return rating.recorded() ? Json(rating.score().value()) : Json(nullptr);
}

Rating rating_from_json(const Json& j)
{
    if (j.is_null()) {
        return Rating::unrecorded();
    }
    if (!j.is_number_integer()) {
        throw Error(ErrorCode::InvalidArgument, "rating must be an integer or null");
    }
    return Score(j.get<int>());
}

Json to_json(const Competency& c)
{
    Json j{{"id", c.id},
           {"level", format_level(c.level)},
           {"kind", format_kind(c.kind)},
           {"title", c.title}};
    if (c.description) {
        j["description"] = *c.description;
    }
    return j;
}

Competency competency_from_json(const Json& j)
{
    return guarded([&] {
        Competency c;
        c.id = j.at("id").get<std::string>();
        c.level = parse_level(j.at("level").get<std::string>());
        c.kind = parse_kind(j.at("kind").get<std::string>());
        c.title = j.at("title").get<std::string>();
        if (j.contains("description") && !j.at("description").is_null()) {
            c.description = j.at("description").get<std::string>();
        }
        validate(c);
        return c;
    });
}

Json to_json(const Student& s)
{
    return {{"id", s.id}, {"surname", s.surname}, {"first_name", s.first_name}, {"email", s.email}};
}

Student student_from_json(const Json& j)
{
    return guarded([&] {
        return Student{j.at("id").get<std::string>(), j.at("surname").get<std::string>(),
                       j.at("first_name").get<std::string>(), j.at("email").get<std::string>()};
    });
}

Json to_json(const Course& c)
{
    return {{"id", c.id},
            {"full_name", c.full_name},
            {"short_name", c.short_name},
            {"level", format_level(c.level)},
            {"competency_ids", c.competency_ids},
            {"roster", c.roster}};
}

Course course_from_json(const Json& j)
{
    return guarded([&] {
        Course c;
        c.id = j.at("id").get<std::string>();
        c.full_name = j.at("full_name").get<std::string>();
        c.short_name = j.at("short_name").get<std::string>();
        c.level = parse_level(j.at("level").get<std::string>());
        c.competency_ids = strings_from(j.at("competency_ids"));
        for (auto& sid : strings_from(j.at("roster"))) {
            c.roster.insert(std::move(sid));
        }
        return c;
    });
}

Json to_json(const Assessment& a)
{
    Json j{{"student", a.student_id},
           {"competency", a.competency_id},
           {"score", a.score.value()}};
    if (a.feedback) {
        j["feedback"] = *a.feedback;
    }
    j["assessor"] = a.assessor;
    j["timestamp"] = format_timestamp(a.timestamp);
    j["source"] = format_source(a.source);
    return j;
}

Assessment assessment_from_json(const Json& j)
{
    return guarded([&] {
        Assessment a;
        a.student_id = j.at("student").get<std::string>();
        a.competency_id = j.at("competency").get<std::string>();
        a.score = Score(j.at("score").get<int>());
        if (j.contains("feedback") && !j.at("feedback").is_null()) {
            a.feedback = j.at("feedback").get<std::string>();
        }
        a.assessor = j.at("assessor").get<std::string>();
        a.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
        a.source = parse_source(j.at("source").get<std::string>());
        return a;
    });
}

Json to_json(const GraderReport& r)
{
    auto columns = Json::array();
    for (const auto& c : r.columns) {
        columns.push_back({{"competency_id", c.competency_id}, {"title", c.title}});
    }
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"student", to_json(row.student)},
                        {"cells", list_to_json(row.cells)},
                        {"course_total", to_json(row.course_total)},
                        {"course_mean", optional_number(row.course_mean)}});
    }
    auto means = Json::array();
    for (const auto& m : r.overall_mean) {
        means.push_back(optional_number(m));
    }
    return {{"course_id", r.course_id},
            {"course_name", r.course_name},
            {"columns", columns},
            {"rows", rows},
            {"overall_average", list_to_json(r.overall_average)},
            {"overall_mean", means},
            {"overall_total", to_json(r.overall_total)}};
}

GraderReport grader_report_from_json(const Json& j)
{
    return guarded([&] {
        GraderReport r;
        r.course_id = j.at("course_id").get<std::string>();
        r.course_name = j.at("course_name").get<std::string>();
        r.columns = list_from_json(j.at("columns"), [](const Json& c) {
            return GraderColumn{c.at("competency_id").get<std::string>(),
                                c.at("title").get<std::string>()};
        });
        r.rows = list_from_json(j.at("rows"), [](const Json& row) {
            return GraderRow{student_from_json(row.at("student")),
                             list_from_json(row.at("cells"), rating_from_json),
                             rating_from_json(row.at("course_total")),
                             optional_number_from(row.at("course_mean"))};
        });
        r.overall_average = list_from_json(j.at("overall_average"), rating_from_json);
        r.overall_mean = list_from_json(j.at("overall_mean"), optional_number_from);
        r.overall_total = rating_from_json(j.at("overall_total"));
        return r;
    });
}

Json to_json(const UserReport& r)
{
    auto rows = Json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"competency_id", row.competency_id},
                        {"title", row.title},
                        {"grade", to_json(row.grade)},
                        {"range", row.range},
                        {"feedback", row.feedback}});
    }
    return {{"student", to_json(r.student)},
            {"course_id", r.course_id},
            {"course_name", r.course_name},
            {"course_grade", to_json(r.course_grade)},
            {"rows", rows}};
}

UserReport user_report_from_json(const Json& j)
{
    return guarded([&] {
        UserReport r;
        r.student = student_from_json(j.at("student"));
        r.course_id = j.at("course_id").get<std::string>();
        r.course_name = j.at("course_name").get<std::string>();
        r.course_grade = rating_from_json(j.at("course_grade"));
        r.rows = list_from_json(j.at("rows"), [](const Json& row) {
            return UserReportRow{row.at("competency_id").get<std::string>(),
                                 row.at("title").get<std::string>(),
                                 rating_from_json(row.at("grade")),
                                 row.at("range").get<std::string>(),
                                 row.at("feedback").get<std::string>()};
        });
        return r;
    });
}

Json to_json(const GapAnalysis& g)
{
    return {{"course_id", g.course_id},
            {"competency_id", g.competency_id},
            {"studied", g.studied},
            {"unstudied", g.unstudied},
            {"studied_ratings", list_to_json(g.studied_ratings)},
            {"include_in_curriculum", g.include_in_curriculum}};
}

GapAnalysis gap_analysis_from_json(const Json& j)
{
    return guarded([&] {
        GapAnalysis g;
        g.course_id = j.at("course_id").get<std::string>();
        g.competency_id = j.at("competency_id").get<std::string>();
        g.studied = strings_from(j.at("studied"));
        g.unstudied = strings_from(j.at("unstudied"));
        g.studied_ratings = list_from_json(j.at("studied_ratings"), rating_from_json);
        g.include_in_curriculum = j.at("include_in_curriculum").get<bool>();
        return g;
    });
}

Json to_json(const LevelChecklist& c)
{
    return {{"student_id", c.student_id},
            {"level", format_level(c.level)},
            {"threshold", c.threshold.value()},
            {"missing", list_to_json(c.missing)},
            {"complete", c.complete}};
}

LevelChecklist level_checklist_from_json(const Json& j)
{
    return guarded([&] {
        LevelChecklist c;
        c.student_id = j.at("student_id").get<std::string>();
        c.level = parse_level(j.at("level").get<std::string>());
        c.threshold = Score(j.at("threshold").get<int>());
        c.missing = list_from_json(j.at("missing"), competency_from_json);
        c.complete = j.at("complete").get<bool>();
        return c;
    });
}

Json to_json(const MergeSummary& s)
{
    return {{"students_added", s.students_added},
            {"assessments_added", s.assessments_added},
            {"assessments_skipped", s.assessments_skipped},
            {"competencies_added", s.competencies_added}};
}

MergeSummary merge_summary_from_json(const Json& j)
{
    return guarded([&] {
        return MergeSummary{j.at("students_added").get<std::size_t>(),
                            j.at("assessments_added").get<std::size_t>(),
                            j.at("assessments_skipped").get<std::size_t>(),
                            j.at("competencies_added").get<std::size_t>()};
    });
}

Json to_json(const ImportResult& r)
{
    return {{"course_id", r.course_id}, {"summary", to_json(r.summary)}};
}

ImportResult import_result_from_json(const Json& j)
{
    return guarded([&] {
        return ImportResult{j.at("course_id").get<std::string>(),
                            merge_summary_from_json(j.at("summary"))};
    });
}

} // namespace cefr::codec
