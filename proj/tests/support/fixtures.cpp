#include "fixtures.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <memory>
#include <sstream>

#include "cefr/portability.hpp"

namespace cefr::test {

std::filesystem::path source_dir()
{
    return CEFR_SOURCE_DIR;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::string bundled_outcomes_csv()
{
    return read_text(source_dir() / "data" / "cefr_outcomes.csv");
}

Clock stepping_clock()
{
    auto tick = std::make_shared<std::atomic<long long>>(0);
    const auto start = parse_timestamp("2013-06-21T07:46:00.000Z");
    return [tick, start] { return start + std::chrono::seconds(tick->fetch_add(1)); };
}

TempDir::TempDir()
{
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path()
          / ("cefrtrack-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

// ---------------------------------------------------------------------------

std::vector<Student> writers()
{
    return {
        {kGarcia, "Garcia-Marquez", "Gabriel", "g@b.com"},
        {kGoswami, "Goswami", "Amar", "f@b.com"},
        {kRilke, "Rilke", "Rainer Maria", "A@b.com"},
        {kOe, "Oe", "Kenzaburo", "robertleebishop@gmail.com"},
        {kSembene, "Sembène", "Ousmane", "c@b.com"},
    };
}

std::vector<std::string> user_report_titles()
{
    return {
        "B1 Should have, might have/etc.",
        "B1 Modals: Past",
        "B1 Need to",
        "B1 Must/have to/Ought to",
        "B1 Intensifiers range 3",
        "B1 Must/can't (deduction)",
        "B1 Might, may, will, probably",
        "B1 Modals: Possibility",
        "B1 Reported speech (range of tenses)",
        "B1 Simple passive",
        "B1 Passives",
        "B1 Extended phrasal verbs",
        "B1 Adverbial phrases of time, place and frequency including word order Adjectives vs adverbs",
        "B1 Second and third conditional",
        "B1 Adverbial phrases of degree/extent, probability",
        "B1 Comparative and superlative form of adverbs",
        "B1 Present perfect continuous",
    };
}

std::vector<int> garcia_grades()
{
    return {4, 3, 4, 4, 3, 4, 4, 5, 4, 4, 2, 5, 3, 4, 4, 0, 0};
}

namespace {

std::string id_for_title(const Store& store, const std::string& title)
{
    for (const auto& c : store.taxonomy().all()) {
        if (c.title == title) {
            return c.id;
        }
    }
    throw std::runtime_error("fixture title missing from taxonomy: " + title);
}

} // namespace

Store writer_store()
{
    Store store(stepping_clock());
    import_outcomes_csv(store, bundled_outcomes_csv(), ImportScope::standard());
    for (const auto& s : writers()) {
        store.add_student(s);
    }

    Course grammar{kCourse, "CEFR B1 Grammar Competencies", "B1 Grammar", CefrLevel::B1, {}, {}};
    for (const auto& title : user_report_titles()) {
        grammar.competency_ids.push_back(id_for_title(store, title));
    }
    for (const auto& s : writers()) {
        grammar.roster.insert(s.id);
    }
    store.create_course(grammar);

    const auto grades = garcia_grades();
    for (std::size_t i = 0; i < grades.size(); ++i) {
        if (grades[i] != 0) {
            store.record_assessment(kGarcia, grammar.competency_ids[i], Score{grades[i]}, {},
                                    "educator");
        }
    }
    // The rest of the grader grid's first four columns.
    const auto& cols = grammar.competency_ids;
    store.record_assessment(kGoswami, cols[1], Score{3}, {}, "educator");
    store.record_assessment(kRilke, cols[0], Score{5}, {}, "educator");
    store.record_assessment(kRilke, cols[2], Score{5}, {}, "educator");
    store.record_assessment(kSembene, cols[0], Score{1}, {}, "educator");
    store.record_assessment(kSembene, cols[1], Score{2}, {}, "educator");
    store.record_assessment(kSembene, cols[2], Score{3}, {}, "educator");
    store.record_assessment(kSembene, cols[3], Score{2}, {}, "educator");

    Course discourse{kDiscourseCourse, "CEFR B1 Discourse Competencies", "B1 Discourse",
                     CefrLevel::B1, {}, grammar.roster};
    for (const auto* title : {"B1 Complex question tags", "B1 Wh- and Yes/No questions in the past",
                              "B1 Markers to structure informal spoken discourse",
                              "B1 Connecting words expressing cause and effect, contrast etc."}) {
        discourse.competency_ids.push_back(id_for_title(store, title));
    }
    store.create_course(discourse);
    for (const auto* sid : {kGarcia, kRilke, kOe}) {
        store.record_assessment(sid, kConnecting, Score{3}, {}, "educator");
    }
    return store;
}

// ---------------------------------------------------------------------------

namespace {

int uniform(std::mt19937& rng, int lo, int hi)
{
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

const char* const kSurnames[] = {"Achebe", "Borges", "Calvino", "Dostoevsky", "Eco",
                                 "Fuentes", "Grass", "Hesse", "Ishiguro", "Kafka"};
const char* const kFirstNames[] = {"Ana", "Bo", "Chen", "Dara", "Emil", "Femi", "Gita"};
const char* const kAssessors[] = {"educator", "tutor", "visitor"};
const char* const kFeedback[] = {"good work", "review, then retry", "see \"notes\"", "again"};

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

Assessment random_assessment(std::mt19937& rng, const std::string& student,
                             const std::string& competency, Timestamp base)
{
    Assessment a;
    a.student_id = student;
    a.competency_id = competency;
    a.score = Score{uniform(rng, 1, 5)};
    if (uniform(rng, 0, 2) == 0) {
        a.feedback = kFeedback[uniform(rng, 0, 3)];
    }
    a.assessor = kAssessors[uniform(rng, 0, 2)];
    // Narrow window so equal timestamps are common.
    a.timestamp = base + std::chrono::seconds(uniform(rng, 0, 30));
    a.source = uniform(rng, 0, 3) == 0 ? Source::Import : Source::Local;
    return a;
}

} // namespace

std::vector<Competency> random_taxonomy(std::mt19937& rng, CefrLevel level, int max_count)
{
    const int n = uniform(rng, 1, max_count);
    const auto tag = std::string(format_level(level));
    std::vector<Competency> out;
    for (int i = 0; i < n; ++i) {
        Competency c;
        c.id = lower(tag) + "-topic-" + std::to_string(i);
        c.level = level;
        c.kind = uniform(rng, 0, 4) == 0 ? CompetencyKind::Function : CompetencyKind::Grammar;
        c.title = tag + " Topic " + std::to_string(i);
        switch (uniform(rng, 0, 3)) {
        case 0: c.title += ", part two"; break;
        case 1: c.title += " \"quoted\""; break;
        default: break;
        }
        if (c.kind == CompetencyKind::Function) {
            c.description = "Can do thing " + std::to_string(i);
        }
        out.push_back(std::move(c));
    }
    return out;
}

Student numbered_student(const std::string& prefix, int index)
{
    constexpr int surnames = static_cast<int>(std::size(kSurnames));
    constexpr int firsts = static_cast<int>(std::size(kFirstNames));
    // Surname collisions are deliberate: roster order must fall back to
    // first name and id.
    return {prefix + std::to_string(index), kSurnames[index % surnames],
            kFirstNames[(index / surnames + index) % firsts],
            prefix + std::to_string(index) + "@example.org"};
}

Store random_course_store(std::mt19937& rng, const std::vector<Competency>& taxonomy,
                          const std::string& course_id, const std::string& student_prefix,
                          const Limits& limits)
{
    Store store(stepping_clock());
    Course course;
    course.id = course_id;
    course.full_name = "Course " + course_id;
    course.short_name = course_id;
    course.level = taxonomy.front().level;
    for (const auto& c : taxonomy) {
        store.add_competency(c);
        course.competency_ids.push_back(c.id);
    }
    const int students = uniform(rng, 1, limits.max_students);
    for (int i = 0; i < students; ++i) {
        auto s = numbered_student(student_prefix, i);
        course.roster.insert(s.id);
        store.add_student(std::move(s));
    }
    store.create_course(course);

    const std::vector<std::string> roster(course.roster.begin(), course.roster.end());
    const auto base = parse_timestamp("2024-01-01T00:00:00.000Z");
    const int assessments = uniform(rng, 0, limits.max_assessments);
    for (int i = 0; i < assessments; ++i) {
        const auto& sid = roster[static_cast<std::size_t>(uniform(rng, 0, students - 1))];
        const auto& cid = course.competency_ids[static_cast<std::size_t>(
            uniform(rng, 0, static_cast<int>(course.competency_ids.size()) - 1))];
        store.append_assessment(random_assessment(rng, sid, cid, base));
    }
    return store;
}

Store random_store(std::mt19937& rng)
{
    Store store(stepping_clock());
    std::vector<CefrLevel> levels(kAllLevels.begin(), kAllLevels.end());
    std::shuffle(levels.begin(), levels.end(), rng);
    levels.resize(static_cast<std::size_t>(uniform(rng, 0, 3)));

    const int students = uniform(rng, 0, 8);
    for (int i = 0; i < students; ++i) {
        store.add_student(numbered_student("p", i));
    }
    const auto base = parse_timestamp("2024-01-01T00:00:00.000Z");
    for (const auto level : levels) {
        const auto taxonomy = random_taxonomy(rng, level, 12);
        Course course;
        course.id = lower(format_level(level)) + "-course";
        course.full_name = std::string(format_level(level)) + " Competencies";
        course.short_name = std::string(format_level(level));
        course.level = level;
        for (const auto& c : taxonomy) {
            store.add_competency(c);
            if (uniform(rng, 0, 4) != 0) {
                course.competency_ids.push_back(c.id);
            }
        }
        for (int i = 0; i < students; ++i) {
            if (uniform(rng, 0, 2) != 0) {
                course.roster.insert("p" + std::to_string(i));
            }
        }
        store.create_course(course);
        for (int i = 0, n = students ? uniform(rng, 0, 40) : 0; i < n; ++i) {
            const auto sid = "p" + std::to_string(uniform(rng, 0, students - 1));
            const auto& cid =
                taxonomy[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(taxonomy.size()) - 1))].id;
            store.append_assessment(random_assessment(rng, sid, cid, base));
        }
    }
    return store;
}

} // namespace cefr::test
