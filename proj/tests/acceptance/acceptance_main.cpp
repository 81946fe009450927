// Acceptance gate. One line per criterion, exit status 0 only when all pass.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cefr/error.hpp"
#include "cefr/persistence.hpp"
#include "cefr/portability.hpp"
#include "cefr/reporting.hpp"
#include "fixtures.hpp"

using namespace cefr;
using namespace cefr::test;
using Clock_ = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kUserReportSeconds = 1.0;
constexpr double kRoundTripSeconds = 30.0;
constexpr int kRoundTripTrials = 500;
constexpr int kMergeTrials = 500;
constexpr int kAggregationLists = 1000;
constexpr int kPersistenceStores = 100;
constexpr Limits kRoundTripLimits{10, 40, 200};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what)
{
    if (!ok) {
        throw Failure(what);
    }
}

double seconds_since(Clock_::time_point start)
{
    return std::chrono::duration<double>(Clock_::now() - start).count();
}

Rating r(int v)
{
    return v == 0 ? Rating{} : Rating{Score{v}};
}

const GraderRow& row_for(const GraderReport& report, std::string_view sid)
{
    for (const auto& row : report.rows) {
        if (row.student.id == sid) {
            return row;
        }
    }
    throw Failure("no grader row for " + std::string(sid));
}

std::string grader_csv(const Store& store, std::string_view course)
{
    return export_report(grader_report(store, course), SheetFormat::Csv);
}

// ---------------------------------------------------------------------------

std::string golden_user_report()
{
    const auto store = writer_store();
    const auto start = Clock_::now();
    const auto report = user_report(store, kGarcia, kCourse);
    const double elapsed = seconds_since(start);
    const auto titles = user_report_titles();
    const auto grades = garcia_grades();
    check(report.rows.size() == titles.size(), "row count " + std::to_string(report.rows.size()));
    for (std::size_t i = 0; i < titles.size(); ++i) {
        const auto& row = report.rows[i];
        check(row.title == titles[i], "title " + std::to_string(i) + ": " + row.title);
        check(row.grade == r(grades[i]), "grade for " + titles[i] + ": " + row.grade.to_string());
        check(row.range == "1-5", "range " + row.range);
    }
    check(elapsed < kUserReportSeconds, "took " + std::to_string(elapsed) + " s");
    std::ostringstream msg;
    msg << "17 rows exact, " << std::fixed << elapsed * 1000 << " ms";
    return msg.str();
}

std::string golden_grader_column()
{
    const auto store = writer_store();
    const auto report = grader_report(store, kCourse);
    check(report.columns.at(0).competency_id == kShouldHave, "first column");
    const std::pair<const char*, int> expected[] = {
        {kGarcia, 4}, {kGoswami, 0}, {kRilke, 5}, {kOe, 0}, {kSembene, 1}};
    for (const auto& [sid, v] : expected) {
        check(row_for(report, sid).cells[0] == r(v), std::string("cell for ") + sid);
    }
    check(report.overall_average[0] == r(3), "footer " + report.overall_average[0].to_string());
    const auto gaps = gap_analysis(store, kCourse, kShouldHave);
    check(gaps.studied.size() == 3, "studied " + std::to_string(gaps.studied.size()));
    check(gaps.unstudied.size() == 2, "unstudied " + std::to_string(gaps.unstudied.size()));
    return "footer 3, studied 3, unstudied 2";
}

std::string golden_gap_recommendation()
{
    const auto store = writer_store();
    const auto report = grader_report(store, kDiscourseCourse);
    const auto column = static_cast<std::size_t>(
        std::find_if(report.columns.begin(), report.columns.end(),
                     [](const GraderColumn& c) { return c.competency_id == kConnecting; })
        - report.columns.begin());
    check(column < report.columns.size(), "column present");
    const std::pair<const char*, int> expected[] = {
        {kGarcia, 3}, {kGoswami, 0}, {kRilke, 3}, {kOe, 3}, {kSembene, 0}};
    for (const auto& [sid, v] : expected) {
        check(row_for(report, sid).cells[column] == r(v), std::string("cell for ") + sid);
    }
    const auto gaps = gap_analysis(store, kDiscourseCourse, kConnecting);
    check(gaps.studied.size() == 3 && gaps.unstudied.size() == 2, "split");
    for (const auto& rating : gaps.studied_ratings) {
        check(rating == r(3), "studied rating " + rating.to_string());
    }
    check(gaps.include_in_curriculum, "include_in_curriculum is false");
    check(report.overall_average[column] == r(3), "footer");
    return "all studied = 3, include_in_curriculum, footer 3";
}

std::string reassessment_recency()
{
    auto store = writer_store();
    const auto cid = store.course(kCourse).competency_ids[1];
    store.record_assessment(kOe, cid, Score{3}, {}, "educator");
    store.record_assessment(kOe, cid, Score{5}, {}, "educator");
    check(store.current_rating(kOe, cid) == r(5), "current " + store.current_rating(kOe, cid).to_string());
    check(store.history(kOe, cid).size() == 2, "history " + std::to_string(store.history(kOe, cid).size()));
    return "current 5, history 2";
}

std::string portability_round_trip()
{
    std::mt19937 rng(2024);
    const auto start = Clock_::now();
    std::size_t assessments = 0;
    for (int trial = 0; trial < kRoundTripTrials; ++trial) {
        const auto taxonomy = random_taxonomy(rng, kAllLevels[static_cast<std::size_t>(trial % 6)],
                                              kRoundTripLimits.max_competencies);
        const auto source = random_course_store(rng, taxonomy, "course", "s", kRoundTripLimits);
        assessments += source.assessment_count();
        const auto bytes = encode_archive(export_archive(source, "course"));
        Store fresh(stepping_clock());
        const auto result = import_archive(fresh, bytes, ImportDestination::new_course());
        check(grader_csv(fresh, result.course_id) == grader_csv(source, "course"),
              "trial " + std::to_string(trial) + " differs");
    }
    const double elapsed = seconds_since(start);
    check(elapsed < kRoundTripSeconds, "took " + std::to_string(elapsed) + " s");
    std::ostringstream msg;
    msg << kRoundTripTrials << " trials, " << assessments << " assessments, " << std::fixed
        << elapsed << " s";
    return msg.str();
}

std::string merge_own_export()
{
    std::mt19937 rng(7);
    for (int trial = 0; trial < kMergeTrials; ++trial) {
        auto store = random_course_store(rng, random_taxonomy(rng, CefrLevel::B1, 20), "c", "s");
        const auto archive = export_archive(store, "c");
        std::vector<std::pair<std::string, Rating>> before;
        for (const auto& sid : store.course("c").roster) {
            for (const auto& cid : store.course("c").competency_ids) {
                before.emplace_back(sid + "/" + cid, store.current_rating(sid, cid));
            }
        }
        merge_into(store, "c", archive);
        std::size_t i = 0;
        for (const auto& sid : store.course("c").roster) {
            for (const auto& cid : store.course("c").competency_ids) {
                check(i < before.size() && before[i].second == store.current_rating(sid, cid),
                      "trial " + std::to_string(trial) + " changed " + before[std::min(i, before.size() - 1)].first);
                ++i;
            }
        }
        check(i == before.size(), "roster or columns changed");
    }
    return std::to_string(kMergeTrials) + " trials";
}

std::string merge_order_independence()
{
    std::mt19937 rng(8);
    for (int trial = 0; trial < kMergeTrials; ++trial) {
        const auto taxonomy = random_taxonomy(rng, CefrLevel::B2, 20);
        const auto a = export_archive(random_course_store(rng, taxonomy, "c", "a"), "c");
        const auto b = export_archive(random_course_store(rng, taxonomy, "c", "b"), "c");

        auto target = [&] {
            Store s(stepping_clock());
            Course c;
            c.id = "target";
            c.full_name = c.short_name = "Target";
            c.level = CefrLevel::B2;
            s.create_course(c);
            return s;
        };
        auto ab = target();
        merge_into(ab, "target", a);
        merge_into(ab, "target", b);
        auto ba = target();
        merge_into(ba, "target", b);
        merge_into(ba, "target", a);
        check(grader_report(ab, "target") == grader_report(ba, "target"),
              "trial " + std::to_string(trial) + " reports differ");
        check(grader_csv(ab, "target") == grader_csv(ba, "target"), "CSV differs");
    }
    return std::to_string(kMergeTrials) + " trials";
}

std::string merge_preserves_history()
{
    std::mt19937 rng(9);
    for (int trial = 0; trial < kMergeTrials; ++trial) {
        const auto taxonomy = random_taxonomy(rng, CefrLevel::C1, 20);
        // Same student prefix: identities overlap and must be matched.
        auto target = random_course_store(rng, taxonomy, "c", "s");
        const auto incoming = export_archive(random_course_store(rng, taxonomy, "c", "s"), "c");
        const auto before = target.assessments();
        merge_into(target, "c", incoming);
        for (const auto& old : before) {
            const auto h = target.history(old.student_id, old.competency_id);
            check(std::find(h.begin(), h.end(), old) != h.end(),
                  "trial " + std::to_string(trial) + " lost an assessment");
        }
        check(target.assessment_count() >= before.size(), "count shrank");
    }
    return std::to_string(kMergeTrials) + " trials";
}

std::string aggregation_properties()
{
    std::mt19937 rng(10);
    for (int trial = 0; trial < kAggregationLists; ++trial) {
        std::vector<Rating> xs(rng() % 15);
        for (auto& x : xs) {
            x = r(static_cast<int>(rng() % 6));
        }
        const auto base = rounded_average(xs);
        auto shuffled = xs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        check(rounded_average(shuffled) == base, "permutation");
        auto padded = xs;
        padded.insert(padded.begin() + static_cast<long>(rng() % (padded.size() + 1)), Rating{});
        check(rounded_average(padded) == base, "unrecorded insertion");
        const int v = 1 + static_cast<int>(rng() % 5);
        check(rounded_average(std::vector{r(v)}) == r(v), "singleton");
        check(rounded_average(std::vector<Rating>(1 + rng() % 5)) == Rating{}, "all unrecorded");
    }
    return std::to_string(kAggregationLists) + " lists";
}

std::string csv_ingestion()
{
    Store store(stepping_clock());
    const auto text = bundled_outcomes_csv();
    const auto first = import_outcomes_csv(store, text, ImportScope::standard());
    check(first.competencies.size() == 210, "rows " + std::to_string(first.competencies.size()));
    for (const auto level : kAllLevels) {
        check(!store.taxonomy().at_level(level).empty(), "no rows for a level");
    }
    for (const auto& c : store.taxonomy().all()) {
        // Title prefix and stored level agree; kind round-trips.
        check(c.title.rfind(std::string(format_level(c.level)) + " ", 0) == 0, "level of " + c.id);
        check(parse_kind(format_kind(c.kind)) == c.kind, "kind of " + c.id);
    }
    const auto snapshot = store;
    const auto second = import_outcomes_csv(store, text, ImportScope::standard());
    check(second.added.empty() && store == snapshot, "second import changed the store");
    return "210 competencies, six levels, re-import no-op";
}

std::string persistence()
{
    std::mt19937 rng(11);
    TempDir dir;
    const auto path = dir.path() / kStoreFileName;
    for (int trial = 0; trial < kPersistenceStores; ++trial) {
        auto store = random_store(rng);
        // Mutate after creation, as an operator would.
        if (!store.courses().empty() && !store.students().empty()) {
            const auto course = store.courses().front();
            const auto sid = store.students().front().id;
            store.enroll(course.id, sid);
            if (!course.competency_ids.empty()) {
                store.record_assessment(sid, course.competency_ids.front(), Score{4},
                                        std::string("persisted"), "educator");
            }
        }
        save_store(store, path);
        check(load_store(path) == store, "trial " + std::to_string(trial) + " not deep-equal");
    }
    auto text = read_text(path);
    text[text.size() / 2] = text[text.size() / 2] == 'x' ? 'y' : 'x';
    std::ofstream(path, std::ios::binary | std::ios::trunc) << text;
    try {
        load_store(path);
        throw Failure("corrupted file was accepted");
    } catch (const Error& e) {
        check(e.code() == ErrorCode::CorruptStore, "wrong error " + std::string(e.code_string()));
    }
    return std::to_string(kPersistenceStores) + " stores, corruption refused";
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<std::string()>>> criteria{
        {"golden user report", golden_user_report},
        {"golden grader column", golden_grader_column},
        {"golden gap recommendation", golden_gap_recommendation},
        {"re-assessment recency", reassessment_recency},
        {"portability round-trip", portability_round_trip},
        {"merge (a) own export is a no-op", merge_own_export},
        {"merge (b) disjoint archives commute", merge_order_independence},
        {"merge (c) history preserved", merge_preserves_history},
        {"aggregation properties", aggregation_properties},
        {"csv ingestion", csv_ingestion},
        {"persistence", persistence},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        try {
            const auto detail = run();
            std::printf("PASS  %-38s %s\n", name, detail.c_str());
        } catch (const std::exception& e) {
            ++failed;
            std::printf("FAIL  %-38s %s\n", name, e.what());
        }
        std::fflush(stdout);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
    return failed == 0 ? 0 : 1;
}
