#include "cefr/persistence.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

#include <zlib.h>

#include "cefr/codec.hpp"
#include "cefr/error.hpp"

namespace cefr {
namespace {

using codec::Json;

std::string checksum_of(const Json& doc_without_checksum)
{
    const auto canonical = doc_without_checksum.dump(2);
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(canonical.data()),
                           static_cast<uInt>(canonical.size()));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%08lx", static_cast<unsigned long>(crc));
    return std::string("crc32:") + buf;
}

[[noreturn]] void corrupt(const std::string& why)
{
    throw Error(ErrorCode::CorruptStore, "corrupt store: " + why);
}

} // namespace

std::string serialize_store(const Store& store)
{
    Json doc;
    doc["format_version"] = kStoreFormatVersion;
    auto taxonomy = Json::array();
    for (const auto& c : store.taxonomy().all()) {
        taxonomy.push_back(codec::to_json(c));
    }
    auto students = Json::array();
    for (const auto& s : store.students()) {
        students.push_back(codec::to_json(s));
    }
    auto courses = Json::array();
    for (const auto& c : store.courses()) {
        courses.push_back(codec::to_json(c));
    }
    auto assessments = Json::array();
    for (const auto& a : store.assessments()) {
        assessments.push_back(codec::to_json(a));
    }
    doc["taxonomy"] = std::move(taxonomy);
    doc["students"] = std::move(students);
    doc["courses"] = std::move(courses);
    doc["assessments"] = std::move(assessments);

    Json out;
    out["format_version"] = kStoreFormatVersion;
    out["checksum"] = checksum_of(doc);
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (it.key() != "format_version") {
            out[it.key()] = it.value();
        }
    }
    return out.dump(2) + "\n";
}

Store deserialize_store(std::string_view text, Clock clock)
{
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        corrupt(std::string("not valid JSON (") + e.what() + ")");
    }
    if (!doc.is_object() || !doc.contains("format_version") || !doc.contains("checksum")) {
        corrupt("missing format_version or checksum");
    }
    if (!doc["format_version"].is_number_integer()
        || doc["format_version"].get<int>() != kStoreFormatVersion) {
        corrupt("unsupported format_version " + doc["format_version"].dump());
    }
    const auto stated = doc["checksum"];
    doc.erase("checksum");
    if (!stated.is_string() || stated.get<std::string>() != checksum_of(doc)) {
        corrupt("checksum mismatch");
    }

    Store store(std::move(clock));
    try {
        for (const auto& c : doc.at("taxonomy")) {
            store.add_competency(codec::competency_from_json(c));
        }
        for (const auto& s : doc.at("students")) {
            store.add_student(codec::student_from_json(s));
        }
        for (const auto& c : doc.at("courses")) {
            store.create_course(codec::course_from_json(c));
        }
        for (const auto& j : doc.at("assessments")) {
            auto a = codec::assessment_from_json(j);
            store.student(a.student_id);
            store.competency(a.competency_id);
            if (!store.append_assessment(std::move(a))) {
                corrupt("duplicate assessment record");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        corrupt(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptStore) {
            throw;
        }
        corrupt(e.what());
    }
    return store;
}

void save_store(const Store& store, const std::filesystem::path& path)
{
    const auto text = serialize_store(store);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        out << text;
        out.flush();
        if (!out) {
            throw Error(ErrorCode::IoError, "short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot replace " + path.string() + ": " + ec.message());
    }
}

Store load_store(const std::filesystem::path& path, Clock clock)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return deserialize_store(buffer.str(), std::move(clock));
}

} // namespace cefr
