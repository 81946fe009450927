#include "cefr/portability.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

#include "cefr/codec.hpp"
#include "cefr/csv.hpp"
#include "cefr/error.hpp"
#include "cefr/zip.hpp"

namespace cefr {
namespace {

using codec::Json;

constexpr std::string_view kProducer = "cefrtrack/1.0";
constexpr std::array<std::string_view, 5> kEntryNames{
    "manifest.json", "taxonomy.json", "course.json", "students.json", "assessments.json"};

[[noreturn]] void corrupt(const std::string& why)
{
    throw Error(ErrorCode::CorruptArchive, "corrupt archive: " + why);
}

[[noreturn]] void malformed(std::size_t line, const std::string& why)
{
    throw Error(ErrorCode::MalformedCsv, "outcomes CSV line " + std::to_string(line) + ": " + why,
                {{"line", std::to_string(line)}});
}

std::string_view format_kind(ArchiveKind kind)
{
    return kind == ArchiveKind::Course ? "course" : "dossier";
}

ArchiveKind parse_archive_kind(std::string_view text)
{
    if (text == "course") {
        return ArchiveKind::Course;
    }
    if (text == "dossier") {
        return ArchiveKind::Dossier;
    }
    corrupt("unknown archive kind " + std::string(text));
}

Archive build_archive(const Store& store, const Course& course, ArchiveKind kind,
                      std::vector<Student> students)
{
    Archive archive;
    archive.manifest = {kArchiveFormatVersion, kind, store.now(), std::string(kProducer)};
    for (const auto& cid : course.competency_ids) {
        archive.taxonomy.push_back(store.competency(cid));
    }
    archive.course = course;
    archive.course.roster.clear();
    for (const auto& s : students) {
        archive.course.roster.insert(s.id);
        for (const auto& cid : course.competency_ids) {
            const auto history = store.history(s.id, cid);
            archive.assessments.insert(archive.assessments.end(), history.begin(), history.end());
        }
    }
    archive.students = std::move(students);
    return archive;
}

/// Archive student id -> local student id, plus the students to create.
struct IdentityPlan {
    std::map<std::string, std::string> local_id;
    std::vector<Student> to_create;
};

IdentityPlan resolve_identities(const Store& store, const Archive& archive)
{
    IdentityPlan plan;
    for (const auto& incoming : archive.students) {
        if (const auto* local = store.find_student(incoming.id)) {
            if (local->surname != incoming.surname || local->first_name != incoming.first_name) {
                throw Error(ErrorCode::IdentityConflict,
                            "student " + incoming.id + " is " + local->full_name()
                                + " here but " + incoming.full_name() + " in the archive",
                            {{"student", incoming.id}});
            }
            plan.local_id[incoming.id] = incoming.id;
            continue;
        }
        const auto matches = store.students_with_email(incoming.email);
        if (matches.size() > 1) {
            throw Error(ErrorCode::IdentityConflict,
                        "several local students share the email " + incoming.email,
                        {{"student", incoming.id}, {"email", incoming.email}});
        }
        if (matches.size() == 1) {
            const auto& local = *matches.front();
            if (local.surname != incoming.surname || local.first_name != incoming.first_name) {
                throw Error(ErrorCode::IdentityConflict,
                            "email " + incoming.email + " belongs to " + local.full_name()
                                + " here but to " + incoming.full_name() + " in the archive",
                            {{"student", incoming.id},
                             {"local_student", local.id},
                             {"email", incoming.email}});
            }
            plan.local_id[incoming.id] = local.id;
            continue;
        }
        plan.local_id[incoming.id] = incoming.id;
        plan.to_create.push_back(incoming);
    }
    return plan;
}

void check_taxonomy_compatible(const Store& store, const Archive& archive)
{
    for (const auto& c : archive.taxonomy) {
        if (const auto* local = store.taxonomy().find(c.id); local && local->level != c.level) {
            throw Error(ErrorCode::CompetencyLevelMismatch,
                        "competency " + c.id + " has a different level in this installation",
                        {{"competency", c.id}});
        }
    }
}

std::size_t add_missing_competencies(Store& store, const Archive& archive)
{
    std::size_t added = 0;
    for (const auto& c : archive.taxonomy) {
        if (!store.taxonomy().contains(c.id)) {
            store.add_competency(c);
            ++added;
        }
    }
    return added;
}

void append_imported(Store& store, const Archive& archive, const IdentityPlan& plan,
                     MergeSummary& summary)
{
    for (auto a : archive.assessments) {
        a.student_id = plan.local_id.at(a.student_id);
        a.source = Source::Import;
        if (store.append_assessment(std::move(a))) {
            ++summary.assessments_added;
        } else {
            ++summary.assessments_skipped;
        }
    }
}

std::string copy_suffix(std::size_t n)
{
    return " copy " + std::to_string(n);
}

} // namespace

// ---------------------------------------------------------------------------
// Outcomes CSV

std::vector<Competency> parse_outcomes_csv(std::string_view text)
{
    const auto rows = csv::parse(text);
    if (rows.empty()) {
        return {};
    }
    if (rows.front() != csv::Row{"title", "slug", "kind", "description"}) {
        malformed(1, "header must be title,slug,kind,description");
    }

    std::vector<Competency> out;
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto line = i + 1;
        if (row.size() != 4) {
            malformed(line, "expected 4 fields, found " + std::to_string(row.size()));
        }
        Competency c;
        c.title = row[0];
        c.id = row[1];
        if (c.title.empty() || c.id.empty()) {
            malformed(line, "title and slug are required");
        }
        const auto token = c.title.substr(0, c.title.find(' '));
        try {
            c.level = parse_level(token);
            c.kind = parse_kind(row[2]);
        } catch (const Error& e) {
            malformed(line, e.what());
        }
        if (!row[3].empty()) {
            c.description = row[3];
        }
        if (const auto it = seen.find(c.id); it != seen.end()) {
            if (out[it->second] == c) {
                continue;
            }
            throw Error(ErrorCode::DuplicateSlugConflict,
                        "slug '" + c.id + "' appears twice with different content (line "
                            + std::to_string(line) + ")",
                        {{"slug", c.id}, {"line", std::to_string(line)}});
        }
        seen.emplace(c.id, out.size());
        out.push_back(std::move(c));
    }
    return out;
}

OutcomesImport import_outcomes_csv(Store& store, std::string_view text, const ImportScope& scope)
{
    const Course* course = scope.is_custom() ? &store.course(*scope.course_id) : nullptr;
    OutcomesImport result;
    result.competencies = parse_outcomes_csv(text);

    // Conflicts are detected before anything is written.
    for (const auto& c : result.competencies) {
        if (const auto* existing = store.taxonomy().find(c.id); existing && !(*existing == c)) {
            throw Error(ErrorCode::DuplicateSlugConflict,
                        "competency '" + c.id + "' already exists with different content",
                        {{"slug", c.id}});
        }
    }
    for (const auto& c : result.competencies) {
        if (store.add_competency(c)) {
            result.added.push_back(c.id);
        }
    }
    if (course) {
        const auto course_id = course->id;
        for (const auto& c : result.competencies) {
            if (c.level == store.course(course_id).level && !store.course(course_id).contains(c.id)) {
                store.attach_competency(course_id, c.id);
                result.attached.push_back(c.id);
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Archive codec

void validate(const Archive& archive)
{
    const auto& m = archive.manifest;
    if (m.format_version != kArchiveFormatVersion) {
        throw Error(ErrorCode::UnsupportedVersion,
                    "unsupported archive format_version " + std::to_string(m.format_version),
                    {{"format_version", std::to_string(m.format_version)}});
    }
    if (m.kind == ArchiveKind::Dossier && archive.students.size() != 1) {
        corrupt("a dossier must hold exactly one student");
    }

    std::set<std::string> competencies;
    for (const auto& c : archive.taxonomy) {
        try {
            validate(c);
        } catch (const Error& e) {
            corrupt(e.what());
        }
        if (!competencies.insert(c.id).second) {
            corrupt("duplicate competency " + c.id);
        }
    }
    const auto& course = archive.course;
    if (course.id.empty() || course.short_name.empty()) {
        corrupt("course id and short name are required");
    }
    std::set<std::string> columns;
    for (const auto& cid : course.competency_ids) {
        const auto it = std::find_if(archive.taxonomy.begin(), archive.taxonomy.end(),
                                     [&](const Competency& c) { return c.id == cid; });
        if (it == archive.taxonomy.end()) {
            corrupt("course references unknown competency " + cid);
        }
        if (it->level != course.level) {
            corrupt("competency " + cid + " does not match the course level");
        }
        if (!columns.insert(cid).second) {
            corrupt("course lists competency " + cid + " twice");
        }
    }

    std::set<std::string> students;
    for (const auto& s : archive.students) {
        try {
            validate(s);
        } catch (const Error& e) {
            corrupt(e.what());
        }
        if (!students.insert(s.id).second) {
            corrupt("duplicate student " + s.id);
        }
    }
    if (students != course.roster) {
        corrupt("course roster does not match students.json");
    }
    for (const auto& a : archive.assessments) {
        if (!students.contains(a.student_id)) {
            corrupt("assessment references unknown student " + a.student_id);
        }
        if (!competencies.contains(a.competency_id)) {
            corrupt("assessment references unknown competency " + a.competency_id);
        }
    }
}

std::string encode_archive(const Archive& archive)
{
    validate(archive);
    const Json manifest{{"format_version", archive.manifest.format_version},
                        {"kind", format_kind(archive.manifest.kind)},
                        {"created_at", format_timestamp(archive.manifest.created_at)},
                        {"producer", archive.manifest.producer}};
    auto taxonomy = Json::array();
    for (const auto& c : archive.taxonomy) {
        taxonomy.push_back(codec::to_json(c));
    }
    auto students = Json::array();
    for (const auto& s : archive.students) {
        students.push_back(codec::to_json(s));
    }
    auto assessments = Json::array();
    for (const auto& a : archive.assessments) {
        assessments.push_back(codec::to_json(a));
    }
    return zip::write({
        {std::string(kEntryNames[0]), manifest.dump(2)},
        {std::string(kEntryNames[1]), taxonomy.dump(2)},
        {std::string(kEntryNames[2]), codec::to_json(archive.course).dump(2)},
        {std::string(kEntryNames[3]), students.dump(2)},
        {std::string(kEntryNames[4]), assessments.dump(2)},
    });
}

Archive decode_archive(std::string_view bytes)
{
    const auto entries = zip::read(bytes);
    if (entries.size() != kEntryNames.size()) {
        corrupt("expected exactly " + std::to_string(kEntryNames.size()) + " entries");
    }
    if (entries.front().name != kEntryNames[0]) {
        corrupt("manifest.json must be the first entry");
    }
    std::map<std::string, Json, std::less<>> docs;
    for (const auto& entry : entries) {
        if (std::find(kEntryNames.begin(), kEntryNames.end(), entry.name) == kEntryNames.end()) {
            corrupt("unexpected entry " + entry.name);
        }
        try {
            docs[entry.name] = Json::parse(entry.data);
        } catch (const nlohmann::json::exception&) {
            corrupt(entry.name + " is not valid JSON");
        }
    }

    Archive archive;
    try {
        const auto& manifest = docs.at("manifest.json");
        archive.manifest.format_version = manifest.at("format_version").get<int>();
        if (archive.manifest.format_version != kArchiveFormatVersion) {
            validate(archive);
        }
        archive.manifest.kind = parse_archive_kind(manifest.at("kind").get<std::string>());
        archive.manifest.created_at = parse_timestamp(manifest.at("created_at").get<std::string>());
        archive.manifest.producer = manifest.at("producer").get<std::string>();

        const auto& taxonomy = docs.at("taxonomy.json");
        const auto& students = docs.at("students.json");
        const auto& assessments = docs.at("assessments.json");
        if (!taxonomy.is_array() || !students.is_array() || !assessments.is_array()) {
            corrupt("taxonomy, students and assessments must be arrays");
        }
        for (const auto& c : taxonomy) {
            archive.taxonomy.push_back(codec::competency_from_json(c));
        }
        archive.course = codec::course_from_json(docs.at("course.json"));
        for (const auto& s : students) {
            archive.students.push_back(codec::student_from_json(s));
        }
        for (const auto& a : assessments) {
            archive.assessments.push_back(codec::assessment_from_json(a));
        }
    } catch (const nlohmann::json::exception& e) {
        corrupt(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptArchive || e.code() == ErrorCode::UnsupportedVersion) {
            throw;
        }
        corrupt(e.what());
    }
    validate(archive);
    return archive;
}

Archive export_archive(const Store& store, std::string_view course_id)
{
    const auto& course = store.course(course_id);
    std::vector<Student> students;
    for (const auto& sid : course.roster) {
        students.push_back(store.student(sid));
    }
    std::sort(students.begin(), students.end(), roster_order);
    return build_archive(store, course, ArchiveKind::Course, std::move(students));
}

Archive export_dossier(const Store& store, std::string_view course_id, std::string_view student_id)
{
    const auto& course = store.course(course_id);
    const auto& student = store.student(student_id);
    if (!course.enrolled(student_id)) {
        throw Error(ErrorCode::StudentNotEnrolled,
                    "student " + student.id + " is not enrolled in " + course.id,
                    {{"student", student.id}, {"course", course.id}});
    }
    return build_archive(store, course, ArchiveKind::Dossier, {student});
}

// ---------------------------------------------------------------------------
// Import

ImportDestination ImportDestination::parse(std::string_view text)
{
    const auto colon = text.find(':');
    const auto head = text.substr(0, colon);
    const auto tail = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    if (head == "new") {
        return new_course(std::string(tail));
    }
    if ((head == "merge" || head == "replace") && !tail.empty()) {
        return head == "merge" ? merge_into(std::string(tail)) : replace(std::string(tail));
    }
    throw Error(ErrorCode::InvalidArgument,
                "destination must be new[:NAME], merge:COURSE or replace:COURSE, got '"
                    + std::string(text) + "'");
}

std::string ImportDestination::to_string() const
{
    switch (kind) {
    case Kind::NewCourse: return target.empty() ? "new" : "new:" + target;
    case Kind::MergeInto: return "merge:" + target;
    case Kind::Replace: return "replace:" + target;
    }
    return "new";
}

MergeSummary merge_into(Store& store, std::string_view course_id, const Archive& archive)
{
    validate(archive);
    const auto& target = store.course(course_id);
    if (target.level != archive.course.level) {
        throw Error(ErrorCode::LevelMismatch,
                    "archive course is " + std::string(format_level(archive.course.level))
                        + " but " + target.id + " is " + std::string(format_level(target.level)),
                    {{"course", target.id},
                     {"archive_level", std::string(format_level(archive.course.level))}});
    }
    check_taxonomy_compatible(store, archive);
    const auto plan = resolve_identities(store, archive);

    const std::string id(course_id);
    MergeSummary summary;
    summary.competencies_added = add_missing_competencies(store, archive);
    for (const auto& cid : archive.course.competency_ids) {
        store.attach_competency(id, cid);
    }
    for (const auto& s : plan.to_create) {
        store.add_student(s);
    }
    for (const auto& [incoming, local] : plan.local_id) {
        if (!store.course(id).enrolled(local)) {
            store.enroll(id, local);
            ++summary.students_added;
        }
    }
    append_imported(store, archive, plan, summary);
    return summary;
}

ImportResult import_archive(Store& store, const Archive& archive, const ImportDestination& dest)
{
    validate(archive);
    switch (dest.kind) {
    case ImportDestination::Kind::MergeInto:
        return {dest.target, merge_into(store, dest.target, archive)};

    case ImportDestination::Kind::Replace: {
        store.course(dest.target);
        check_taxonomy_compatible(store, archive);
        const auto plan = resolve_identities(store, archive);
        MergeSummary summary;
        summary.competencies_added = add_missing_competencies(store, archive);
        for (const auto& s : plan.to_create) {
            store.add_student(s);
        }
        std::set<std::string> roster;
        for (const auto& [incoming, local] : plan.local_id) {
            roster.insert(local);
        }
        summary.students_added = roster.size();
        store.reset_course(dest.target, archive.course.level, archive.course.competency_ids,
                           std::move(roster));
        append_imported(store, archive, plan, summary);
        return {dest.target, summary};
    }

    case ImportDestination::Kind::NewCourse: {
        const auto& source = archive.course;
        std::size_t n = 1;
        while (store.find_course_by_short_name(source.short_name + copy_suffix(n))
               || store.find_course(source.id + "-copy-" + std::to_string(n))) {
            ++n;
        }
        Course course;
        course.id = source.id + "-copy-" + std::to_string(n);
        course.short_name = source.short_name + copy_suffix(n);
        course.full_name = dest.target.empty() ? source.full_name + copy_suffix(n) : dest.target;
        course.level = source.level;
        check_taxonomy_compatible(store, archive);
        resolve_identities(store, archive);
        const auto id = course.id;
        const auto added = add_missing_competencies(store, archive);
        course.competency_ids = source.competency_ids;
        store.create_course(std::move(course));
        auto summary = merge_into(store, id, archive);
        summary.competencies_added += added;
        return {id, summary};
    }
    }
    throw Error(ErrorCode::InvalidArgument, "unknown import destination");
}

ImportResult import_archive(Store& store, std::string_view bytes, const ImportDestination& dest)
{
    return import_archive(store, decode_archive(bytes), dest);
}

} // namespace cefr
