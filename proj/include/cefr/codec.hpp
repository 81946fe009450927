#pragma once

#include <json.hpp>

#include "cefr/core.hpp"
#include "cefr/error.hpp"
#include "cefr/portability.hpp"
#include "cefr/reporting.hpp"
#include "cefr/store.hpp"

// JSON encodings shared by the store file, the archive entries, the HTTP API
// and the CLI. Decoders throw Error{InvalidArgument} on any shape mismatch.
namespace cefr::codec {

using Json = nlohmann::ordered_json;

Json to_json(const Rating& rating); // null when Unrecorded
Rating rating_from_json(const Json& j);

Json to_json(const Competency& c);
Competency competency_from_json(const Json& j);

Json to_json(const Student& s);
Student student_from_json(const Json& j);

Json to_json(const Course& c);
Course course_from_json(const Json& j);

Json to_json(const Assessment& a);
Assessment assessment_from_json(const Json& j);

Json to_json(const GraderReport& r);
GraderReport grader_report_from_json(const Json& j);

Json to_json(const UserReport& r);
UserReport user_report_from_json(const Json& j);

Json to_json(const GapAnalysis& g);
GapAnalysis gap_analysis_from_json(const Json& j);

Json to_json(const LevelChecklist& c);
LevelChecklist level_checklist_from_json(const Json& j);

Json to_json(const MergeSummary& s);
MergeSummary merge_summary_from_json(const Json& j);

Json to_json(const ImportResult& r);
ImportResult import_result_from_json(const Json& j);

/// Runs `decode`, turning library parse/type errors into Error{InvalidArgument}.
template <class F>
auto guarded(F&& decode) -> decltype(decode())
{
    try {
        return decode();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace cefr::codec
