#include "cefr/service.hpp"

#include <httplib.h>

#include <chrono>
#include <fstream>
#include <thread>
#include <iostream>

#include "cefr/error.hpp"
#include "cefr/persistence.hpp"
#include "cefr/portability.hpp"

namespace cefr {
namespace {

using codec::Json;

constexpr std::string_view kJson = "application/json";
constexpr std::string_view kArchiveType = "application/zip";

Json parse_body(std::string_view body)
{
    try {
        auto j = Json::parse(body);
        if (!j.is_object()) {
            throw Error(ErrorCode::InvalidArgument, "request body must be a JSON object");
        }
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
}

std::string required_string(const Json& body, const char* key)
{
    if (!body.contains(key) || !body.at(key).is_string()) {
        throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' is required",
                    {{"field", key}});
    }
    return body.at(key).get<std::string>();
}

std::optional<std::string> optional_string(const Json& body, const char* key)
{
    if (!body.contains(key) || body.at(key).is_null()) {
        return std::nullopt;
    }
    if (!body.at(key).is_string()) {
        throw Error(ErrorCode::InvalidArgument, std::string("field '") + key + "' must be a string",
                    {{"field", key}});
    }
    return body.at(key).get<std::string>();
}

std::string sheet_content_type(SheetFormat format)
{
    return format == SheetFormat::Csv ? "text/csv; charset=utf-8"
                                      : "text/tab-separated-values; charset=utf-8";
}

void send_json(httplib::Response& res, const Json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(2), std::string(kJson));
}

void send_error(httplib::Response& res, const Error& error)
{
    send_json(res, error_body(error), http_status(error.code()));
}

std::optional<std::string> query(const httplib::Request& req, const char* key)
{
    if (!req.has_param(key)) {
        return std::nullopt;
    }
    return req.get_param_value(key);
}

} // namespace

Json error_body(const Error& error)
{
    Json detail = Json::object();
    for (const auto& [k, v] : error.detail()) {
        detail[k] = v;
    }
    return {{"error",
             {{"code", error.code_string()}, {"message", error.what()}, {"detail", detail}}}};
}

// ---------------------------------------------------------------------------
// Api

Api::Api(Repository& repository, PlacementTable placement, int checklist_threshold,
         GapPolicy gap_policy)
    : repository_(repository),
      placement_(std::move(placement)),
      checklist_threshold_(checklist_threshold),
      gap_policy_(gap_policy)
{
    static_cast<void>(Score{checklist_threshold_});
}

Json Api::health() const
{
    const auto store = repository_.snapshot();
    return {{"status", "ok"},
            {"courses", store->courses().size()},
            {"students", store->students().size()},
            {"competencies", store->taxonomy().size()},
            {"assessments", store->assessment_count()}};
}

Json Api::import_outcomes(std::string_view csv_text, std::string_view scope,
                          const std::optional<std::string>& course_id)
{
    ImportScope import_scope;
    if (scope == "custom") {
        if (!course_id) {
            throw Error(ErrorCode::InvalidArgument, "custom scope requires a course");
        }
        import_scope = ImportScope::custom(*course_id);
    } else if (scope != "standard") {
        throw Error(ErrorCode::InvalidArgument, "scope must be standard or custom");
    }
    const auto result = repository_.write(
        [&](Store& store) { return import_outcomes_csv(store, csv_text, import_scope); });
    auto list = Json::array();
    for (const auto& c : result.competencies) {
        list.push_back(codec::to_json(c));
    }
    return {{"competencies", list}, {"added", result.added}, {"attached", result.attached}};
}

Json Api::competencies(const std::optional<std::string>& level) const
{
    const auto store = repository_.snapshot();
    const auto items = level ? store->taxonomy().at_level(parse_level(*level))
                             : store->taxonomy().all();
    auto out = Json::array();
    for (const auto& c : items) {
        out.push_back(codec::to_json(c));
    }
    return out;
}

Json Api::students() const
{
    auto out = Json::array();
    for (const auto& s : repository_.snapshot()->students()) {
        out.push_back(codec::to_json(s));
    }
    return out;
}

Json Api::add_student(const Json& body)
{
    auto student = codec::student_from_json(body);
    repository_.write([&](Store& store) { store.add_student(student); });
    return codec::to_json(student);
}

Json Api::courses() const
{
    auto out = Json::array();
    for (const auto& c : repository_.snapshot()->courses()) {
        out.push_back(codec::to_json(c));
    }
    return out;
}

Json Api::course(std::string_view course_id) const
{
    return codec::to_json(repository_.snapshot()->course(course_id));
}

Json Api::create_course(const Json& body)
{
    Course course;
    course.id = required_string(body, "id");
    course.short_name = optional_string(body, "short_name").value_or(course.id);
    course.full_name = optional_string(body, "full_name").value_or(course.short_name);
    course.level = parse_level(required_string(body, "level"));
    const bool explicit_columns = body.contains("competency_ids");
    if (explicit_columns) {
        course.competency_ids = codec::guarded(
            [&] { return body.at("competency_ids").get<std::vector<std::string>>(); });
    }
    return repository_.write([&](Store& store) {
        if (!explicit_columns) {
            for (const auto& c : store.taxonomy().at_level(course.level)) {
                course.competency_ids.push_back(c.id);
            }
        }
        const auto id = course.id;
        store.create_course(course);
        return codec::to_json(store.course(id));
    });
}

Json Api::enroll(std::string_view course_id, std::string_view student_id)
{
    return repository_.write([&](Store& store) {
        store.enroll(course_id, student_id);
        return codec::to_json(store.course(course_id));
    });
}

Json Api::unenroll(std::string_view course_id, std::string_view student_id)
{
    return repository_.write([&](Store& store) {
        store.unenroll(course_id, student_id);
        return codec::to_json(store.course(course_id));
    });
}

Json Api::rename_course(std::string_view course_id, const Json& body)
{
    const auto full_name = optional_string(body, "full_name");
    const auto short_name = optional_string(body, "short_name");
    return repository_.write([&](Store& store) {
        const auto& current = store.course(course_id);
        store.rename_course(course_id, full_name.value_or(current.full_name),
                            short_name.value_or(current.short_name));
        return codec::to_json(store.course(course_id));
    });
}

Json Api::put_grade(const Json& body)
{
    const auto student = required_string(body, "student");
    const auto competency = required_string(body, "competency");
    if (!body.contains("score") || !body.at("score").is_number_integer()) {
        throw Error(ErrorCode::InvalidArgument, "field 'score' must be an integer",
                    {{"field", "score"}});
    }
    const Score score(body.at("score").get<int>());
    auto feedback = optional_string(body, "feedback");
    auto assessor = optional_string(body, "assessor").value_or("educator");
    return repository_.write([&](Store& store) {
        const auto a = store.record_assessment(student, competency, score, std::move(feedback),
                                               std::move(assessor));
        return Json{{"assessment", codec::to_json(a)},
                    {"current_rating", codec::to_json(store.current_rating(student, competency))},
                    {"history_length", store.history(student, competency).size()}};
    });
}

Json Api::grader_report(std::string_view course_id) const
{
    return codec::to_json(cefr::grader_report(*repository_.snapshot(), course_id));
}

std::string Api::grader_report_sheet(std::string_view course_id, std::string_view format) const
{
    const auto sheet = parse_sheet_format(format);
    return export_report(cefr::grader_report(*repository_.snapshot(), course_id), sheet);
}

Json Api::user_report(std::string_view course_id, std::string_view student_id) const
{
    return codec::to_json(cefr::user_report(*repository_.snapshot(), student_id, course_id));
}

std::string Api::user_report_sheet(std::string_view course_id, std::string_view student_id,
                                   std::string_view format) const
{
    const auto sheet = parse_sheet_format(format);
    return export_report(cefr::user_report(*repository_.snapshot(), student_id, course_id), sheet);
}

Json Api::gaps(std::string_view course_id, std::string_view competency_id) const
{
    return codec::to_json(
        gap_analysis(*repository_.snapshot(), course_id, competency_id, gap_policy_));
}

Json Api::checklist(std::string_view student_id, std::string_view level,
                    std::optional<int> threshold) const
{
    return codec::to_json(level_checklist(*repository_.snapshot(), student_id,
                                          parse_level(level),
                                          Score(threshold.value_or(checklist_threshold_))));
}

Json Api::placement(const Json& body) const
{
    const auto test = required_string(body, "test");
    if (!body.contains("score") || !body.at("score").is_number()) {
        throw Error(ErrorCode::InvalidArgument, "field 'score' must be a number",
                    {{"field", "score"}});
    }
    const double score = body.at("score").get<double>();
    return {{"test", test}, {"score", score},
            {"level", format_level(place_student(test, score, placement_))}};
}

std::string Api::export_archive(std::string_view course_id,
                                const std::optional<std::string>& student_id) const
{
    const auto store = repository_.snapshot();
    return encode_archive(student_id ? export_dossier(*store, course_id, *student_id)
                                     : cefr::export_archive(*store, course_id));
}

Json Api::import_archive(std::string_view bytes, std::string_view destination)
{
    const auto dest = ImportDestination::parse(destination);
    const auto archive = decode_archive(bytes);
    return codec::to_json(
        repository_.write([&](Store& store) { return cefr::import_archive(store, archive, dest); }));
}

// ---------------------------------------------------------------------------
// Service

Service::Service(ServiceConfig config) : config_(std::move(config))
{
    std::error_code ec;
    std::filesystem::create_directories(config_.data_dir, ec);
    if (ec || !std::filesystem::is_directory(config_.data_dir)) {
        throw Error(ErrorCode::ConfigError,
                    "data directory is not usable: " + config_.data_dir.string());
    }
    store_path_ = config_.data_dir / kStoreFileName;
    {
        const auto probe = config_.data_dir / ".write-probe";
        std::ofstream out(probe);
        if (!out) {
            throw Error(ErrorCode::ConfigError,
                        "data directory is not writable: " + config_.data_dir.string());
        }
        out.close();
        std::filesystem::remove(probe, ec);
    }
    if (config_.checklist_threshold < Score::kMin || config_.checklist_threshold > Score::kMax) {
        throw Error(ErrorCode::ConfigError, "checklist threshold must be between 1 and 5");
    }

    Store initial = std::filesystem::exists(store_path_) ? load_store(store_path_) : Store{};
    repository_.write([&](Store& store) { store = std::move(initial); });
    const auto path = store_path_;
    repository_.set_commit_hook([path](const Store& store) { save_store(store, path); });

    PlacementTable placement;
    if (config_.placement_path) {
        placement = PlacementTable::load(*config_.placement_path);
    }
    api_ = std::make_unique<Api>(repository_, std::move(placement), config_.checklist_threshold,
                                 config_.gap_policy);
    server_ = std::make_unique<httplib::Server>();
    // httplib's default also sets SO_REUSEPORT, which lets a second instance
    // share the port silently.
    server_->set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    install_routes();
}

Service::~Service()
{
    if (server_ && server_->is_running()) {
        server_->stop();
    }
}

int Service::bind()
{
    if (config_.port == 0) {
        bound_port_ = server_->bind_to_any_port(config_.host);
        if (bound_port_ <= 0) {
            throw Error(ErrorCode::PortInUse, "could not bind any port on " + config_.host);
        }
    } else {
        if (!server_->bind_to_port(config_.host, config_.port)) {
            throw Error(ErrorCode::PortInUse,
                        "port " + std::to_string(config_.port) + " is not available",
                        {{"port", std::to_string(config_.port)}});
        }
        bound_port_ = config_.port;
    }
    return bound_port_;
}

void Service::run()
{
    // Announce the call before checking for a stop, and stop() does the
    // reverse, so at least one side sees the other.
    in_run_ = true;
    if (!stop_requested_) {
        server_->listen_after_bind();
    }
    in_run_ = false;
}

void Service::stop()
{
    stop_requested_ = true;
    // A run() that has not reached its accept loop yet would miss the stop.
    while (in_run_ && !server_->is_running()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    server_->stop();
    save_store(*repository_.snapshot(), store_path_);
}

void Service::install_routes()
{
    auto& svr = *server_;
    const std::string p(kApiPrefix);

    using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;
    auto wrap = [this](Handler handler, bool public_route = false) {
        return [this, handler = std::move(handler), public_route](const httplib::Request& req,
                                                                  httplib::Response& res) {
            try {
                if (config_.token && !public_route
                    && req.get_header_value("Authorization") != "Bearer " + *config_.token) {
                    throw Error(ErrorCode::Unauthorized, "missing or invalid bearer token");
                }
                handler(req, res);
            } catch (const Error& e) {
                send_error(res, e);
            } catch (const std::exception& e) {
                send_json(res, {{"error", {{"code", "internal"}, {"message", e.what()},
                                           {"detail", Json::object()}}}},
                          500);
            }
        };
    };

    svr.Get(p + "/health", wrap([this](const auto&, auto& res) { send_json(res, api_->health()); },
                                true));

    svr.Post(p + "/outcomes/import", wrap([this](const httplib::Request& req, auto& res) {
                 std::string body = req.body;
                 if (req.has_file("file")) {
                     body = req.get_file_value("file").content;
                 }
                 send_json(res, api_->import_outcomes(body, query(req, "scope").value_or("standard"),
                                                      query(req, "course")));
             }));

    svr.Get(p + "/competencies", wrap([this](const httplib::Request& req, auto& res) {
                send_json(res, api_->competencies(query(req, "level")));
            }));

    svr.Get(p + "/students",
            wrap([this](const auto&, auto& res) { send_json(res, api_->students()); }));
    svr.Post(p + "/students", wrap([this](const httplib::Request& req, auto& res) {
                 send_json(res, api_->add_student(parse_body(req.body)), 201);
             }));

    svr.Get(p + "/courses", wrap([this](const auto&, auto& res) { send_json(res, api_->courses()); }));
    svr.Post(p + "/courses", wrap([this](const httplib::Request& req, auto& res) {
                 send_json(res, api_->create_course(parse_body(req.body)), 201);
             }));
    svr.Get(p + R"(/courses/([^/]+))", wrap([this](const httplib::Request& req, auto& res) {
                send_json(res, api_->course(req.matches[1].str()));
            }));
    svr.Patch(p + R"(/courses/([^/]+))", wrap([this](const httplib::Request& req, auto& res) {
                  send_json(res, api_->rename_course(req.matches[1].str(), parse_body(req.body)));
              }));
    svr.Post(p + R"(/courses/([^/]+)/enroll)", wrap([this](const httplib::Request& req, auto& res) {
                 const auto body = parse_body(req.body);
                 send_json(res, api_->enroll(req.matches[1].str(), required_string(body, "student")));
             }));
    svr.Delete(p + R"(/courses/([^/]+)/enroll/([^/]+))",
               wrap([this](const httplib::Request& req, auto& res) {
                   send_json(res, api_->unenroll(req.matches[1].str(), req.matches[2].str()));
               }));

    svr.Put(p + "/grades", wrap([this](const httplib::Request& req, auto& res) {
                send_json(res, api_->put_grade(parse_body(req.body)));
            }));

    svr.Get(p + R"(/courses/([^/]+)/grader-report)",
            wrap([this](const httplib::Request& req, auto& res) {
                const auto format = query(req, "format").value_or("json");
                if (format == "json") {
                    send_json(res, api_->grader_report(req.matches[1].str()));
                    return;
                }
                const auto sheet = parse_sheet_format(format);
                res.set_content(api_->grader_report_sheet(req.matches[1].str(), format),
                                sheet_content_type(sheet));
            }));
    svr.Get(p + R"(/courses/([^/]+)/students/([^/]+)/user-report)",
            wrap([this](const httplib::Request& req, auto& res) {
                const auto format = query(req, "format").value_or("json");
                if (format == "json") {
                    send_json(res, api_->user_report(req.matches[1].str(), req.matches[2].str()));
                    return;
                }
                const auto sheet = parse_sheet_format(format);
                res.set_content(
                    api_->user_report_sheet(req.matches[1].str(), req.matches[2].str(), format),
                    sheet_content_type(sheet));
            }));
    svr.Get(p + R"(/courses/([^/]+)/gaps/([^/]+))",
            wrap([this](const httplib::Request& req, auto& res) {
                send_json(res, api_->gaps(req.matches[1].str(), req.matches[2].str()));
            }));
    svr.Get(p + R"(/students/([^/]+)/checklist/([^/]+))",
            wrap([this](const httplib::Request& req, auto& res) {
                std::optional<int> threshold;
                if (const auto t = query(req, "threshold")) {
                    try {
                        threshold = std::stoi(*t);
                    } catch (const std::exception&) {
                        throw Error(ErrorCode::InvalidArgument, "threshold must be an integer");
                    }
                }
                send_json(res, api_->checklist(req.matches[1].str(), req.matches[2].str(), threshold));
            }));
    svr.Post(p + "/placement", wrap([this](const httplib::Request& req, auto& res) {
                 send_json(res, api_->placement(parse_body(req.body)));
             }));

    auto send_archive = [this](const httplib::Request& req, httplib::Response& res,
                               const std::optional<std::string>& student) {
        const auto course_id = req.matches[1].str();
        const auto bytes = api_->export_archive(course_id, student);
        const auto name = student ? course_id + "-" + *student : course_id;
        res.set_header("Content-Disposition",
                       "attachment; filename=\"" + name + std::string(kArchiveExtension) + "\"");
        res.set_content(bytes, std::string(kArchiveType));
    };
    svr.Get(p + R"(/courses/([^/]+)/export)",
            wrap([send_archive](const httplib::Request& req, auto& res) {
                send_archive(req, res, std::nullopt);
            }));
    svr.Get(p + R"(/courses/([^/]+)/export/([^/]+))",
            wrap([send_archive](const httplib::Request& req, auto& res) {
                send_archive(req, res, req.matches[2].str());
            }));

    svr.Post(p + "/import", wrap([this](const httplib::Request& req, auto& res) {
                 std::string bytes;
                 std::string destination = query(req, "destination").value_or("new");
                 if (req.has_file("file")) {
                     bytes = req.get_file_value("file").content;
                     if (req.has_file("destination")) {
                         destination = req.get_file_value("destination").content;
                     }
                 } else {
                     bytes = req.body;
                 }
                 send_json(res, api_->import_archive(bytes, destination));
             }));

    svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.status == 404 && res.body.empty()) {
            send_json(res, error_body(Error(ErrorCode::NotFound, "no such route")), 404);
        }
    });
}

} // namespace cefr
