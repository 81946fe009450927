#include "cefr/reporting.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "cefr/csv.hpp"
#include "cefr/error.hpp"

namespace cefr {
namespace {

std::vector<Student> roster_of(const Store& store, const Course& course)
{
    std::vector<Student> roster;
    roster.reserve(course.roster.size());
    for (const auto& sid : course.roster) {
        roster.push_back(store.student(sid));
    }
    std::sort(roster.begin(), roster.end(), roster_order);
    return roster;
}

class SheetWriter {
public:
    explicit SheetWriter(SheetFormat format) : format_(format) {}

    void row(const csv::Row& cells)
    {
        if (format_ == SheetFormat::Csv) {
            out_ += csv::format_row(cells, ',');
            return;
        }
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (cells[i].find_first_of("\t\r\n") != std::string::npos) {
                throw Error(ErrorCode::InvalidArgument,
                            "cell contains a tab or line break and cannot be written as TSV: "
                                + cells[i]);
            }
            if (i != 0) {
                out_.push_back('\t');
            }
            out_ += cells[i];
        }
        out_.push_back('\n');
    }

    std::string take() { return std::move(out_); }

private:
    SheetFormat format_;
    std::string out_;
};

} // namespace

Rating rounded_average(std::span<const Rating> ratings)
{
    long sum = 0;
    long count = 0;
    for (const auto& r : ratings) {
        if (r.recorded()) {
            sum += r.score().value();
            ++count;
        }
    }
    if (count == 0) {
        return Rating::unrecorded();
    }
    // floor(sum / count + 1/2) on exact integers
    const long rounded = (2 * sum + count) / (2 * count);
    return Score(static_cast<int>(std::clamp<long>(rounded, Score::kMin, Score::kMax)));
}

std::optional<double> raw_average(std::span<const Rating> ratings)
{
    long sum = 0;
    long count = 0;
    for (const auto& r : ratings) {
        if (r.recorded()) {
            sum += r.score().value();
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return std::round(100.0 * static_cast<double>(sum) / static_cast<double>(count)) / 100.0;
}

GraderReport grader_report(const Store& store, std::string_view course_id)
{
    const auto& course = store.course(course_id);
    GraderReport report;
    report.course_id = course.id;
    report.course_name = course.full_name;
    for (const auto& cid : course.competency_ids) {
        report.columns.push_back({cid, store.competency(cid).title});
    }

    for (auto& student : roster_of(store, course)) {
        GraderRow row;
        for (const auto& cid : course.competency_ids) {
            row.cells.push_back(store.current_rating(student.id, cid));
        }
        row.course_total = rounded_average(row.cells);
        row.course_mean = raw_average(row.cells);
        row.student = std::move(student);
        report.rows.push_back(std::move(row));
    }

    std::vector<Rating> column;
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
        column.clear();
        for (const auto& row : report.rows) {
            column.push_back(row.cells[c]);
        }
        report.overall_average.push_back(rounded_average(column));
        report.overall_mean.push_back(raw_average(column));
    }
    std::vector<Rating> totals;
    for (const auto& row : report.rows) {
        totals.push_back(row.course_total);
    }
    report.overall_total = rounded_average(totals);
    return report;
}

UserReport user_report(const Store& store, std::string_view student_id, std::string_view course_id)
{
    const auto& course = store.course(course_id);
    const auto& student = store.student(student_id);
    if (!course.enrolled(student_id)) {
        throw Error(ErrorCode::StudentNotEnrolled,
                    "student " + student.id + " is not enrolled in " + course.id,
                    {{"student", student.id}, {"course", course.id}});
    }

    UserReport report;
    report.student = student;
    report.course_id = course.id;
    report.course_name = course.full_name;
    std::vector<Rating> grades;
    for (const auto& cid : course.competency_ids) {
        UserReportRow row;
        row.competency_id = cid;
        row.title = store.competency(cid).title;
        row.grade = store.current_rating(student.id, cid);
        row.feedback = store.latest_feedback(student.id, cid).value_or("");
        grades.push_back(row.grade);
        report.rows.push_back(std::move(row));
    }
    report.course_grade = rounded_average(grades);
    return report;
}

GapAnalysis gap_analysis(const Store& store, std::string_view course_id,
                         std::string_view competency_id, GapPolicy policy)
{
    const auto& course = store.course(course_id);
    if (!course.contains(competency_id)) {
        throw Error(ErrorCode::CompetencyNotInCourse,
                    "competency " + std::string(competency_id) + " is not part of " + course.id,
                    {{"course", course.id}, {"competency", std::string(competency_id)}});
    }

    GapAnalysis gaps;
    gaps.course_id = course.id;
    gaps.competency_id = std::string(competency_id);
    bool all_low = true;
    for (const auto& student : roster_of(store, course)) {
        const auto rating = store.current_rating(student.id, competency_id);
        if (rating.recorded()) {
            gaps.studied.push_back(student.id);
            gaps.studied_ratings.push_back(rating);
            all_low = all_low && rating.score().value() <= policy.max_studied_score;
        } else {
            gaps.unstudied.push_back(student.id);
        }
    }
    gaps.include_in_curriculum = gaps.studied.empty() || all_low;
    return gaps;
}

LevelChecklist level_checklist(const Store& store, std::string_view student_id, CefrLevel level,
                               Score threshold)
{
    store.student(student_id);
    const auto competencies = store.taxonomy().at_level(level);
    if (competencies.empty()) {
        throw Error(ErrorCode::EmptyLevel,
                    "taxonomy has no competencies at level " + std::string(format_level(level)),
                    {{"level", std::string(format_level(level))}});
    }
    LevelChecklist checklist;
    checklist.student_id = std::string(student_id);
    checklist.level = level;
    checklist.threshold = threshold;
    for (const auto& c : competencies) {
        const auto rating = store.current_rating(student_id, c.id);
        if (!rating.recorded() || rating.score() < threshold) {
            checklist.missing.push_back(c);
        }
    }
    checklist.complete = checklist.missing.empty();
    return checklist;
}

SheetFormat parse_sheet_format(std::string_view text)
{
    std::string lower(text);
    for (auto& c : lower) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    if (lower == "csv") {
        return SheetFormat::Csv;
    }
    if (lower == "tsv") {
        return SheetFormat::Tsv;
    }
    throw Error(ErrorCode::UnsupportedFormat, "unsupported spreadsheet format: " + std::string(text),
                {{"format", std::string(text)}});
}

std::string export_report(const GraderReport& report, SheetFormat format)
{
    SheetWriter sheet(format);
    csv::Row header{"Surname", "First name", "Email address"};
    for (const auto& column : report.columns) {
        header.push_back(column.title);
    }
    header.emplace_back("Course total");
    sheet.row(header);

    for (const auto& row : report.rows) {
        csv::Row cells{row.student.surname, row.student.first_name, row.student.email};
        for (const auto& cell : row.cells) {
            cells.push_back(cell.to_string());
        }
        cells.push_back(row.course_total.to_string());
        sheet.row(cells);
    }

    if (!report.rows.empty()) {
        csv::Row footer{"Overall average", "", ""};
        for (const auto& avg : report.overall_average) {
            footer.push_back(avg.to_string());
        }
        footer.push_back(report.overall_total.to_string());
        sheet.row(footer);
    }
    return sheet.take();
}

std::string export_report(const UserReport& report, SheetFormat format)
{
    SheetWriter sheet(format);
    sheet.row({"Grade item", "Grade", "Range", "Feedback"});
    sheet.row({report.course_name, report.course_grade.to_string(), "", ""});
    for (const auto& row : report.rows) {
        sheet.row({row.title, row.grade.to_string(), row.range, row.feedback});
    }
    return sheet.take();
}

} // namespace cefr
