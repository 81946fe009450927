#pragma once

#include <atomic>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "cefr/codec.hpp"
#include "cefr/placement.hpp"
#include "cefr/reporting.hpp"
#include "cefr/repository.hpp"

namespace httplib {
class Server;
}

namespace cefr {

inline constexpr std::string_view kApiPrefix = "/api/v1";

struct ServiceConfig {
    std::filesystem::path data_dir = "data";
    std::string host = "127.0.0.1";
    int port = 8080; ///< 0 picks a free port
    std::optional<std::filesystem::path> placement_path;
    int checklist_threshold = 4;
    GapPolicy gap_policy;
    std::optional<std::string> token; ///< bearer token gate, if set
};

/// {"error": {"code", "message", "detail"}}
codec::Json error_body(const Error& error);

/// One adapter per module operation. Takes and returns the wire encodings so
/// the HTTP routes and the CLI's local mode share a single code path.
class Api {
public:
    Api(Repository& repository, PlacementTable placement, int checklist_threshold = 4,
        GapPolicy gap_policy = {});

    codec::Json health() const;

    codec::Json import_outcomes(std::string_view csv_text, std::string_view scope,
                                const std::optional<std::string>& course_id);
    codec::Json competencies(const std::optional<std::string>& level) const;

    codec::Json students() const;
    codec::Json add_student(const codec::Json& body);

    codec::Json courses() const;
    codec::Json course(std::string_view course_id) const;
    /// Without "competency_ids" the course takes every taxonomy entry at its level.
    codec::Json create_course(const codec::Json& body);
    codec::Json enroll(std::string_view course_id, std::string_view student_id);
    codec::Json unenroll(std::string_view course_id, std::string_view student_id);
    codec::Json rename_course(std::string_view course_id, const codec::Json& body);

    /// Body: student, competency, score, optional feedback and assessor.
    codec::Json put_grade(const codec::Json& body);

    codec::Json grader_report(std::string_view course_id) const;
    std::string grader_report_sheet(std::string_view course_id, std::string_view format) const;
    codec::Json user_report(std::string_view course_id, std::string_view student_id) const;
    std::string user_report_sheet(std::string_view course_id, std::string_view student_id,
                                  std::string_view format) const;
    codec::Json gaps(std::string_view course_id, std::string_view competency_id) const;
    codec::Json checklist(std::string_view student_id, std::string_view level,
                          std::optional<int> threshold) const;
    codec::Json placement(const codec::Json& body) const;

    /// Archive bytes; a dossier when student_id is set.
    std::string export_archive(std::string_view course_id,
                               const std::optional<std::string>& student_id) const;
    codec::Json import_archive(std::string_view bytes, std::string_view destination);

    Repository& repository() noexcept { return repository_; }

private:
    Repository& repository_;
    PlacementTable placement_;
    int checklist_threshold_;
    GapPolicy gap_policy_;
};

/// Store file plus HTTP front end. Construction loads (or initializes) the
/// store and refuses to start on a corrupt file; every committed mutation is
/// written back before it becomes visible.
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds the socket; throws PortInUse. Returns the bound port.
    int bind();
    /// Serves until stop(); bind() must have succeeded.
    void run();
    /// Stops listening and persists the current snapshot. Safe to call from
    /// another thread at any point after bind(), including before run().
    void stop();

    int port() const noexcept { return bound_port_; }
    Api& api() noexcept { return *api_; }
    const std::filesystem::path& store_path() const noexcept { return store_path_; }

private:
    void install_routes();

    ServiceConfig config_;
    std::filesystem::path store_path_;
    Repository repository_;
    std::unique_ptr<Api> api_;
    std::unique_ptr<httplib::Server> server_;
    int bound_port_ = 0;
    std::atomic<bool> in_run_{false};
    std::atomic<bool> stop_requested_{false};
};

} // namespace cefr
