// cefrtrack: operator front end for the competency tracker.
//
// Every command runs either against a local store directory (default) or a
// running service (--server URL). Both paths go through the same operation
// adapters, so output is identical for the same snapshot.

#include <pthread.h>
#include <signal.h>
#include <sys/file.h>
#include <fcntl.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <thread>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include "cefr/codec.hpp"
#include "cefr/error.hpp"
#include "cefr/persistence.hpp"
#include "cefr/service.hpp"

namespace {

using cefr::Error;
using cefr::ErrorCode;
using cefr::codec::Json;

// ---------------------------------------------------------------------------
// Backends

class Backend {
public:
    virtual ~Backend() = default;

    virtual Json import_outcomes(const std::string& csv, const std::string& scope,
                                 const std::optional<std::string>& course) = 0;
    virtual Json competencies(const std::optional<std::string>& level) = 0;
    virtual Json students() = 0;
    virtual Json add_student(const Json& body) = 0;
    virtual Json courses() = 0;
    virtual Json create_course(const Json& body) = 0;
    virtual Json rename_course(const std::string& course, const Json& body) = 0;
    virtual Json enroll(const std::string& course, const std::string& student) = 0;
    virtual Json unenroll(const std::string& course, const std::string& student) = 0;
    virtual Json put_grade(const Json& body) = 0;
    virtual Json grader_report(const std::string& course) = 0;
    virtual std::string grader_sheet(const std::string& course, const std::string& format) = 0;
    virtual Json user_report(const std::string& course, const std::string& student) = 0;
    virtual std::string user_sheet(const std::string& course, const std::string& student,
                                   const std::string& format) = 0;
    virtual Json gaps(const std::string& course, const std::string& competency) = 0;
    virtual Json checklist(const std::string& student, const std::string& level,
                           std::optional<int> threshold) = 0;
    virtual Json placement(const std::string& test, double score) = 0;
    virtual std::string export_archive(const std::string& course,
                                       const std::optional<std::string>& student) = 0;
    virtual Json import_archive(const std::string& bytes, const std::string& destination) = 0;
};

/// Advisory lock on <data-dir>/store.lock held for the whole invocation.
class FileLock {
public:
    FileLock(const std::filesystem::path& path, bool exclusive)
    {
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
        if (fd_ < 0 || ::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            throw Error(ErrorCode::IoError, "cannot lock " + path.string());
        }
    }
    ~FileLock()
    {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;

private:
    int fd_ = -1;
};

class LocalBackend final : public Backend {
public:
    LocalBackend(const std::filesystem::path& data_dir, bool mutating,
                 const std::optional<std::string>& placement_path, int threshold)
    {
        std::error_code ec;
        std::filesystem::create_directories(data_dir, ec);
        lock_ = std::make_unique<FileLock>(data_dir / "store.lock", mutating);
        const auto path = data_dir / cefr::kStoreFileName;
        if (std::filesystem::exists(path)) {
            auto loaded = cefr::load_store(path);
            repository_.write([&](cefr::Store& s) { s = std::move(loaded); });
        }
        repository_.set_commit_hook([path](const cefr::Store& s) { cefr::save_store(s, path); });
        cefr::PlacementTable table;
        if (placement_path) {
            table = cefr::PlacementTable::load(*placement_path);
        }
        api_ = std::make_unique<cefr::Api>(repository_, std::move(table), threshold);
    }

    Json import_outcomes(const std::string& csv, const std::string& scope,
                         const std::optional<std::string>& course) override
    {
        return api_->import_outcomes(csv, scope, course);
    }
    Json competencies(const std::optional<std::string>& level) override { return api_->competencies(level); }
    Json students() override { return api_->students(); }
    Json add_student(const Json& body) override { return api_->add_student(body); }
    Json courses() override { return api_->courses(); }
    Json create_course(const Json& body) override { return api_->create_course(body); }
    Json rename_course(const std::string& course, const Json& body) override
    {
        return api_->rename_course(course, body);
    }
    Json enroll(const std::string& course, const std::string& student) override
    {
        return api_->enroll(course, student);
    }
    Json unenroll(const std::string& course, const std::string& student) override
    {
        return api_->unenroll(course, student);
    }
    Json put_grade(const Json& body) override { return api_->put_grade(body); }
    Json grader_report(const std::string& course) override { return api_->grader_report(course); }
    std::string grader_sheet(const std::string& course, const std::string& format) override
    {
        return api_->grader_report_sheet(course, format);
    }
    Json user_report(const std::string& course, const std::string& student) override
    {
        return api_->user_report(course, student);
    }
    std::string user_sheet(const std::string& course, const std::string& student,
                           const std::string& format) override
    {
        return api_->user_report_sheet(course, student, format);
    }
    Json gaps(const std::string& course, const std::string& competency) override
    {
        return api_->gaps(course, competency);
    }
    Json checklist(const std::string& student, const std::string& level,
                   std::optional<int> threshold) override
    {
        return api_->checklist(student, level, threshold);
    }
    Json placement(const std::string& test, double score) override
    {
        return api_->placement({{"test", test}, {"score", score}});
    }
    std::string export_archive(const std::string& course,
                               const std::optional<std::string>& student) override
    {
        return api_->export_archive(course, student);
    }
    Json import_archive(const std::string& bytes, const std::string& destination) override
    {
        return api_->import_archive(bytes, destination);
    }

private:
    std::unique_ptr<FileLock> lock_;
    cefr::Repository repository_;
    std::unique_ptr<cefr::Api> api_;
};

std::string encode_segment(const std::string& s)
{
    std::ostringstream out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out << c;
        } else {
            out << '%' << std::uppercase << std::hex << std::setw(2) << std::setfill('0')
                << static_cast<int>(c) << std::nouppercase << std::dec;
        }
    }
    return out.str();
}

class RemoteBackend final : public Backend {
public:
    RemoteBackend(const std::string& server, const std::optional<std::string>& token)
        : client_(server)
    {
        client_.set_connection_timeout(5);
        client_.set_read_timeout(60);
        if (token) {
            client_.set_bearer_token_auth(*token);
        }
    }

    Json import_outcomes(const std::string& csv, const std::string& scope,
                         const std::optional<std::string>& course) override
    {
        auto path = api("/outcomes/import?scope=" + encode_segment(scope));
        if (course) {
            path += "&course=" + encode_segment(*course);
        }
        return json(check(client_.Post(path, csv, "text/csv")));
    }
    Json competencies(const std::optional<std::string>& level) override
    {
        return json(check(client_.Get(api("/competencies") + (level ? "?level=" + encode_segment(*level) : ""))));
    }
    Json students() override { return json(check(client_.Get(api("/students")))); }
    Json add_student(const Json& body) override
    {
        return json(check(client_.Post(api("/students"), body.dump(), "application/json")));
    }
    Json courses() override { return json(check(client_.Get(api("/courses")))); }
    Json create_course(const Json& body) override
    {
        return json(check(client_.Post(api("/courses"), body.dump(), "application/json")));
    }
    Json rename_course(const std::string& course, const Json& body) override
    {
        return json(check(client_.Patch(api("/courses/" + encode_segment(course)), body.dump(),
                                        "application/json")));
    }
    Json enroll(const std::string& course, const std::string& student) override
    {
        const Json body{{"student", student}};
        return json(check(client_.Post(api("/courses/" + encode_segment(course) + "/enroll"),
                                       body.dump(), "application/json")));
    }
    Json unenroll(const std::string& course, const std::string& student) override
    {
        return json(check(client_.Delete(
            api("/courses/" + encode_segment(course) + "/enroll/" + encode_segment(student)))));
    }
    Json put_grade(const Json& body) override
    {
        return json(check(client_.Put(api("/grades"), body.dump(), "application/json")));
    }
    Json grader_report(const std::string& course) override
    {
        return json(check(client_.Get(api("/courses/" + encode_segment(course) + "/grader-report"))));
    }
    std::string grader_sheet(const std::string& course, const std::string& format) override
    {
        return check(client_.Get(api("/courses/" + encode_segment(course)
                                     + "/grader-report?format=" + encode_segment(format))));
    }
    Json user_report(const std::string& course, const std::string& student) override
    {
        return json(check(client_.Get(api("/courses/" + encode_segment(course) + "/students/"
                                          + encode_segment(student) + "/user-report"))));
    }
    std::string user_sheet(const std::string& course, const std::string& student,
                           const std::string& format) override
    {
        return check(client_.Get(api("/courses/" + encode_segment(course) + "/students/"
                                     + encode_segment(student)
                                     + "/user-report?format=" + encode_segment(format))));
    }
    Json gaps(const std::string& course, const std::string& competency) override
    {
        return json(check(client_.Get(
            api("/courses/" + encode_segment(course) + "/gaps/" + encode_segment(competency)))));
    }
    Json checklist(const std::string& student, const std::string& level,
                   std::optional<int> threshold) override
    {
        auto path = api("/students/" + encode_segment(student) + "/checklist/" + encode_segment(level));
        if (threshold) {
            path += "?threshold=" + std::to_string(*threshold);
        }
        return json(check(client_.Get(path)));
    }
    Json placement(const std::string& test, double score) override
    {
        const Json body{{"test", test}, {"score", score}};
        return json(check(client_.Post(api("/placement"), body.dump(), "application/json")));
    }
    std::string export_archive(const std::string& course,
                               const std::optional<std::string>& student) override
    {
        auto path = api("/courses/" + encode_segment(course) + "/export");
        if (student) {
            path += "/" + encode_segment(*student);
        }
        return check(client_.Get(path));
    }
    Json import_archive(const std::string& bytes, const std::string& destination) override
    {
        httplib::MultipartFormDataItems items{
            {"file", bytes, "archive.ctar", "application/zip"},
            {"destination", destination, "", ""},
        };
        return json(check(client_.Post(api("/import"), items)));
    }

private:
    static std::string api(const std::string& path) { return std::string(cefr::kApiPrefix) + path; }

    static std::string check(const httplib::Result& result)
    {
        if (!result) {
            throw Error(ErrorCode::IoError,
                        "cannot reach server: " + httplib::to_string(result.error()));
        }
        if (result->status >= 200 && result->status < 300) {
            return result->body;
        }
        std::string code = "internal";
        std::string message = result->body;
        try {
            const auto body = Json::parse(result->body);
            code = body.at("error").at("code").get<std::string>();
            message = body.at("error").at("message").get<std::string>();
        } catch (const std::exception&) {
        }
        throw RemoteError(code, message);
    }

    static Json json(const std::string& body) { return Json::parse(body); }

public:
    /// Server-side error carrying the server's code verbatim.
    struct RemoteError : std::runtime_error {
        RemoteError(std::string c, const std::string& message)
            : std::runtime_error(message), code(std::move(c))
        {
        }
        std::string code;
    };

private:
    httplib::Client client_;
};

// ---------------------------------------------------------------------------
// Output

std::string rating_text(const Json& j)
{
    return j.is_null() ? "-" : std::to_string(j.get<int>());
}

void print_table(std::ostream& out, const std::vector<std::vector<std::string>>& rows)
{
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        widths.resize(std::max(widths.size(), row.size()), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += row[i];
            if (i + 1 < row.size()) {
                line += std::string(widths[i] - row[i].size() + 2, ' ');
            }
        }
        out << line << '\n';
    }
}

void print_grader_table(std::ostream& out, const Json& report)
{
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"Surname", "First name", "Email address"};
    for (const auto& c : report.at("columns")) {
        header.push_back(c.at("title").get<std::string>());
    }
    header.emplace_back("Course total");
    rows.push_back(std::move(header));
    for (const auto& r : report.at("rows")) {
        const auto& s = r.at("student");
        std::vector<std::string> row{s.at("surname").get<std::string>(),
                                     s.at("first_name").get<std::string>(),
                                     s.at("email").get<std::string>()};
        for (const auto& cell : r.at("cells")) {
            row.push_back(rating_text(cell));
        }
        row.push_back(rating_text(r.at("course_total")));
        rows.push_back(std::move(row));
    }
    if (!report.at("rows").empty()) {
        std::vector<std::string> footer{"Overall average", "", ""};
        for (const auto& avg : report.at("overall_average")) {
            footer.push_back(rating_text(avg));
        }
        footer.push_back(rating_text(report.at("overall_total")));
        rows.push_back(std::move(footer));
    }
    out << report.at("course_name").get<std::string>() << '\n';
    print_table(out, rows);
}

void print_user_table(std::ostream& out, const Json& report)
{
    const auto& s = report.at("student");
    out << "User report - " << s.at("first_name").get<std::string>() << ' '
        << s.at("surname").get<std::string>() << '\n';
    std::vector<std::vector<std::string>> rows{{"Grade item", "Grade", "Range", "Feedback"}};
    rows.push_back({report.at("course_name").get<std::string>(), rating_text(report.at("course_grade")),
                    "", ""});
    for (const auto& r : report.at("rows")) {
        rows.push_back({r.at("title").get<std::string>(), rating_text(r.at("grade")),
                        r.at("range").get<std::string>(), r.at("feedback").get<std::string>()});
    }
    print_table(out, rows);
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::string& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot write " + path);
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"cefrtrack - CEFR competency tracking"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string data_dir = "cefrtrack-data";
    std::optional<std::string> server;
    std::optional<std::string> token;
    std::optional<std::string> placement_path;
    int default_threshold = 4;
    app.add_option("--data-dir", data_dir, "Store directory (local mode)")
        ->envname("CEFRTRACK_DATA_DIR");
    app.add_option("--server", server, "Service base URL, e.g. http://localhost:8080")
        ->envname("CEFRTRACK_SERVER");
    app.add_option("--token", token, "Bearer token for the service")->envname("CEFRTRACK_TOKEN");
    app.add_option("--placement", placement_path, "Placement table CSV (test,min,max,level)")
        ->envname("CEFRTRACK_PLACEMENT");
    app.add_option("--default-threshold", default_threshold, "Checklist threshold")
        ->envname("CEFRTRACK_THRESHOLD")
        ->check(CLI::Range(1, 5));

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host);
    serve->add_option("--port", port)->envname("CEFRTRACK_PORT");

    // outcomes import
    auto* outcomes = app.add_subcommand("outcomes", "Competency taxonomy");
    outcomes->require_subcommand(1);
    auto* outcomes_import = outcomes->add_subcommand("import", "Import an outcomes CSV");
    std::string outcomes_file;
    std::string scope = "standard";
    std::optional<std::string> scope_course;
    outcomes_import->add_option("file", outcomes_file)->required();
    outcomes_import->add_option("--scope", scope)->check(CLI::IsMember({"standard", "custom"}));
    outcomes_import->add_option("--course", scope_course);

    auto* competencies = app.add_subcommand("competencies", "List competencies");
    std::optional<std::string> list_level;
    competencies->add_option("--level", list_level);

    // student
    auto* student = app.add_subcommand("student", "Students");
    student->require_subcommand(1);
    auto* student_add = student->add_subcommand("add", "Add a student");
    std::string sid, surname, first_name, email;
    student_add->add_option("id", sid)->required();
    student_add->add_option("--surname", surname)->required();
    student_add->add_option("--first-name", first_name)->required();
    student_add->add_option("--email", email)->required();
    auto* student_list = student->add_subcommand("list", "List students");

    // course
    auto* course = app.add_subcommand("course", "Courses");
    course->require_subcommand(1);
    auto* course_create = course->add_subcommand("create", "Create a per-level gradebook");
    std::string course_id, level;
    std::optional<std::string> full_name, short_name;
    std::vector<std::string> course_competencies;
    course_create->add_option("id", course_id)->required();
    course_create->add_option("--level", level)->required();
    course_create->add_option("--full-name", full_name);
    course_create->add_option("--short-name", short_name);
    course_create->add_option("--competency", course_competencies,
                              "Column (repeatable); default: every competency at the level");
    auto* course_list = course->add_subcommand("list", "List courses");
    auto* course_rename = course->add_subcommand("rename", "Rename a course");
    course_rename->add_option("id", course_id)->required();
    course_rename->add_option("--full-name", full_name);
    course_rename->add_option("--short-name", short_name);

    // enroll / unenroll
    std::string enroll_course, enroll_student;
    auto* enroll = app.add_subcommand("enroll", "Enroll a student in a course");
    enroll->add_option("course", enroll_course)->required();
    enroll->add_option("student", enroll_student)->required();
    auto* unenroll = app.add_subcommand("unenroll", "Remove a student from a course roster");
    unenroll->add_option("course", enroll_course)->required();
    unenroll->add_option("student", enroll_student)->required();

    // grade
    auto* grade = app.add_subcommand("grade", "Record an assessment");
    std::string grade_student, grade_competency;
    int grade_score = 0;
    std::optional<std::string> feedback;
    std::string assessor = "educator";
    grade->add_option("student", grade_student)->required();
    grade->add_option("competency", grade_competency)->required();
    grade->add_option("score", grade_score)->required();
    grade->add_option("--feedback", feedback);
    grade->add_option("--assessor", assessor)->envname("CEFRTRACK_ASSESSOR");

    // report
    auto* report = app.add_subcommand("report", "Reports");
    report->require_subcommand(1);
    std::string report_course, report_student, format = "table";
    const auto formats = CLI::IsMember({"table", "csv", "tsv", "json"});
    auto* report_grader = report->add_subcommand("grader", "Class x competency grid");
    report_grader->add_option("course", report_course)->required();
    report_grader->add_option("--format", format)->check(formats);
    auto* report_user = report->add_subcommand("user", "One student's report");
    report_user->add_option("course", report_course)->required();
    report_user->add_option("student", report_student)->required();
    report_user->add_option("--format", format)->check(formats);

    // gaps / checklist / place
    auto* gaps = app.add_subcommand("gaps", "Who has and has not studied a competency");
    std::string gap_course, gap_competency;
    gaps->add_option("course", gap_course)->required();
    gaps->add_option("competency", gap_competency)->required();

    auto* checklist = app.add_subcommand("checklist", "Level completion checklist");
    std::string check_student, check_level;
    std::optional<int> threshold;
    checklist->add_option("student", check_student)->required();
    checklist->add_option("level", check_level)->required();
    checklist->add_option("--threshold", threshold);

    auto* place = app.add_subcommand("place", "Map an external test score to a level");
    std::string test_name;
    double test_score = 0;
    place->add_option("test", test_name)->required();
    place->add_option("score", test_score)->required();

    // export / import
    auto* export_cmd = app.add_subcommand("export", "Write a course or dossier archive");
    std::string export_course, output;
    std::optional<std::string> export_student;
    export_cmd->add_option("course", export_course)->required();
    export_cmd->add_option("--student", export_student);
    export_cmd->add_option("-o,--output", output)->required();

    auto* import_cmd = app.add_subcommand("import", "Restore an archive");
    std::string import_file, into = "new";
    import_cmd->add_option("file", import_file)->required();
    import_cmd->add_option("--into", into, "new[:NAME] | merge:COURSE | replace:COURSE");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (serve->parsed()) {
            cefr::ServiceConfig config;
            config.data_dir = data_dir;
            config.host = host;
            config.port = port;
            if (placement_path) {
                config.placement_path = *placement_path;
            }
            config.checklist_threshold = default_threshold;
            config.token = token;
            // Block the stop signals before any thread exists so that only
            // sigwait below receives them.
            sigset_t stop_signals;
            sigemptyset(&stop_signals);
            sigaddset(&stop_signals, SIGINT);
            sigaddset(&stop_signals, SIGTERM);
            pthread_sigmask(SIG_BLOCK, &stop_signals, nullptr);

            cefr::Service service(config);
            const auto bound = service.bind();
            std::cout << "listening on http://" << host << ':' << bound << cefr::kApiPrefix
                      << std::endl;
            std::thread server([&] { service.run(); });
            int received = 0;
            sigwait(&stop_signals, &received);
            service.stop();
            server.join();
            return 0;
        }

        const bool mutating = outcomes_import->parsed() || student_add->parsed()
                           || course_create->parsed() || course_rename->parsed()
                           || enroll->parsed() || unenroll->parsed() || grade->parsed()
                           || import_cmd->parsed();
        std::unique_ptr<Backend> backend;
        if (server) {
            backend = std::make_unique<RemoteBackend>(*server, token);
        } else {
            backend = std::make_unique<LocalBackend>(data_dir, mutating, placement_path,
                                                     default_threshold);
        }
        auto& out = std::cout;

        if (outcomes_import->parsed()) {
            const auto r = backend->import_outcomes(read_file(outcomes_file), scope, scope_course);
            out << "imported " << r.at("competencies").size() << " competencies ("
                << r.at("added").size() << " new";
            if (!r.at("attached").empty()) {
                out << ", " << r.at("attached").size() << " attached to " << *scope_course;
            }
            out << ")\n";
        } else if (competencies->parsed()) {
            for (const auto& c : backend->competencies(list_level)) {
                out << c.at("id").get<std::string>() << '\t' << c.at("level").get<std::string>()
                    << '\t' << c.at("kind").get<std::string>() << '\t'
                    << c.at("title").get<std::string>() << '\n';
            }
        } else if (student_add->parsed()) {
            backend->add_student(
                {{"id", sid}, {"surname", surname}, {"first_name", first_name}, {"email", email}});
            out << "added student " << sid << '\n';
        } else if (student_list->parsed()) {
            for (const auto& s : backend->students()) {
                out << s.at("id").get<std::string>() << '\t' << s.at("surname").get<std::string>()
                    << '\t' << s.at("first_name").get<std::string>() << '\t'
                    << s.at("email").get<std::string>() << '\n';
            }
        } else if (course_create->parsed()) {
            Json body{{"id", course_id}, {"level", level}};
            if (full_name) {
                body["full_name"] = *full_name;
            }
            if (short_name) {
                body["short_name"] = *short_name;
            }
            if (!course_competencies.empty()) {
                body["competency_ids"] = course_competencies;
            }
            const auto c = backend->create_course(body);
            out << "created course " << c.at("id").get<std::string>() << " ("
                << c.at("competency_ids").size() << " competencies)\n";
        } else if (course_list->parsed()) {
            for (const auto& c : backend->courses()) {
                out << c.at("id").get<std::string>() << '\t' << c.at("level").get<std::string>()
                    << '\t' << c.at("short_name").get<std::string>() << '\t'
                    << c.at("full_name").get<std::string>() << '\t' << c.at("roster").size()
                    << " students\n";
            }
        } else if (course_rename->parsed()) {
            Json body = Json::object();
            if (full_name) {
                body["full_name"] = *full_name;
            }
            if (short_name) {
                body["short_name"] = *short_name;
            }
            const auto c = backend->rename_course(course_id, body);
            out << c.at("id").get<std::string>() << ": " << c.at("full_name").get<std::string>()
                << '\n';
        } else if (enroll->parsed()) {
            const auto c = backend->enroll(enroll_course, enroll_student);
            out << enroll_course << ": " << c.at("roster").size() << " students\n";
        } else if (unenroll->parsed()) {
            const auto c = backend->unenroll(enroll_course, enroll_student);
            out << enroll_course << ": " << c.at("roster").size() << " students\n";
        } else if (grade->parsed()) {
            Json body{{"student", grade_student},
                      {"competency", grade_competency},
                      {"score", grade_score},
                      {"assessor", assessor}};
            if (feedback) {
                body["feedback"] = *feedback;
            }
            const auto r = backend->put_grade(body);
            out << "current rating: " << rating_text(r.at("current_rating")) << '\n';
        } else if (report_grader->parsed()) {
            if (format == "csv" || format == "tsv") {
                out << backend->grader_sheet(report_course, format);
            } else if (format == "json") {
                out << backend->grader_report(report_course).dump(2) << '\n';
            } else {
                print_grader_table(out, backend->grader_report(report_course));
            }
        } else if (report_user->parsed()) {
            if (format == "csv" || format == "tsv") {
                out << backend->user_sheet(report_course, report_student, format);
            } else if (format == "json") {
                out << backend->user_report(report_course, report_student).dump(2) << '\n';
            } else {
                print_user_table(out, backend->user_report(report_course, report_student));
            }
        } else if (gaps->parsed()) {
            const auto g = backend->gaps(gap_course, gap_competency);
            auto join = [](const Json& ids) {
                std::string s;
                for (const auto& id : ids) {
                    s += (s.empty() ? "" : ", ") + id.get<std::string>();
                }
                return s.empty() ? std::string("(none)") : s;
            };
            out << "studied (" << g.at("studied").size() << "): " << join(g.at("studied")) << '\n'
                << "unstudied (" << g.at("unstudied").size() << "): " << join(g.at("unstudied"))
                << '\n'
                << "include in curriculum: "
                << (g.at("include_in_curriculum").get<bool>() ? "yes" : "no") << '\n';
        } else if (checklist->parsed()) {
            const auto c = backend->checklist(check_student, check_level, threshold);
            out << check_student << ' ' << c.at("level").get<std::string>() << ": "
                << (c.at("complete").get<bool>() ? "complete" : "incomplete") << " (threshold "
                << c.at("threshold").get<int>() << ", " << c.at("missing").size() << " missing)\n";
            for (const auto& m : c.at("missing")) {
                out << "  " << m.at("id").get<std::string>() << '\t'
                    << m.at("title").get<std::string>() << '\n';
            }
        } else if (place->parsed()) {
            out << backend->placement(test_name, test_score).at("level").get<std::string>() << '\n';
        } else if (export_cmd->parsed()) {
            write_file(output, backend->export_archive(export_course, export_student));
            out << "wrote " << output << '\n';
        } else if (import_cmd->parsed()) {
            const auto r = backend->import_archive(read_file(import_file), into);
            const auto& s = r.at("summary");
            out << "course " << r.at("course_id").get<std::string>() << ": "
                << s.at("students_added").get<std::size_t>() << " students added, "
                << s.at("assessments_added").get<std::size_t>() << " assessments added, "
                << s.at("assessments_skipped").get<std::size_t>() << " skipped, "
                << s.at("competencies_added").get<std::size_t>() << " competencies added\n";
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.code_string() << ": " << e.what() << '\n';
    } catch (const RemoteBackend::RemoteError& e) {
        std::cerr << "error: " << e.code << ": " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
    }
    return 1;
}
