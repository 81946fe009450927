#include <gtest/gtest.h>

#include <random>

#include "cefr/core.hpp"
#include "cefr/csv.hpp"
#include "cefr/error.hpp"

using namespace cefr;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Level, ParsesAllSixCaseInsensitively)
{
    for (const auto level : kAllLevels) {
        const std::string text(format_level(level));
        EXPECT_EQ(parse_level(text), level);
        std::string lower = text;
        lower[0] = static_cast<char>(std::tolower(lower[0]));
        EXPECT_EQ(parse_level(lower), level);
    }
}

TEST(Level, RejectsAnythingElse)
{
    for (const auto* bad : {"", "A", "A3", "B0", "C3", "D1", " A1", "A1 ", "A1x"}) {
        EXPECT_EQ(code_of([&] { parse_level(bad); }), ErrorCode::UnknownLevel) << bad;
    }
}

TEST(Level, TotalOrderAndSuccessor)
{
    for (std::size_t i = 0; i + 1 < kAllLevels.size(); ++i) {
        EXPECT_LT(kAllLevels[i], kAllLevels[i + 1]);
        EXPECT_EQ(next_level(kAllLevels[i]), kAllLevels[i + 1]);
    }
    EXPECT_EQ(next_level(CefrLevel::C2), std::nullopt);
}

TEST(Kind, RoundTrip)
{
    EXPECT_EQ(parse_kind("grammar"), CompetencyKind::Grammar);
    EXPECT_EQ(parse_kind("Function"), CompetencyKind::Function);
    EXPECT_EQ(format_kind(CompetencyKind::Function), "function");
    EXPECT_THROW(parse_kind("vocabulary"), Error);
}

TEST(Score, RangeIsEnforced)
{
    for (int v = -3; v <= 8; ++v) {
        if (v >= 1 && v <= 5) {
            EXPECT_EQ(Score{v}.value(), v);
        } else {
            EXPECT_EQ(code_of([&] { Score{v}; }), ErrorCode::ScoreOutOfRange) << v;
        }
    }
}

TEST(Score, CanonicalLabels)
{
    EXPECT_EQ(score_label(Score{5}), "mastery");
    EXPECT_EQ(score_label(Score{4}), "acceptable performance");
    EXPECT_EQ(score_label(Score{3}), "working performance");
    EXPECT_EQ(score_label(Score{2}), "limited performance");
    EXPECT_EQ(score_label(Score{1}), "minimal performance");
}

TEST(Rating, UnrecordedIsDistinctFromEveryScore)
{
    const Rating none;
    EXPECT_FALSE(none.recorded());
    EXPECT_EQ(none.to_string(), "-");
    for (int v = 1; v <= 5; ++v) {
        const Rating r = Score{v};
        EXPECT_TRUE(r.recorded());
        EXPECT_NE(r, none);
        EXPECT_EQ(r.to_string(), std::to_string(v));
    }
}

TEST(Student, Validation)
{
    EXPECT_NO_THROW(validate(Student{"s1", "Oe", "Kenzaburo", "k@b.com"}));
    EXPECT_THROW(validate(Student{"", "Oe", "Kenzaburo", "k@b.com"}), Error);
    EXPECT_THROW(validate(Student{"s1", "Oe", "Kenzaburo", "no-at-sign"}), Error);
}

TEST(Student, RosterOrderFallsBackToFirstNameThenId)
{
    const Student a{"2", "Eco", "Ana", "a@x"};
    const Student b{"1", "Eco", "Bo", "b@x"};
    const Student c{"3", "Eco", "Bo", "c@x"};
    const Student d{"0", "Achebe", "Zed", "d@x"};
    EXPECT_TRUE(roster_order(d, a));
    EXPECT_TRUE(roster_order(a, b));
    EXPECT_TRUE(roster_order(b, c));
    EXPECT_FALSE(roster_order(c, b));
}

TEST(Timestamp, FormatParseRoundTrip)
{
    const auto ts = parse_timestamp("2013-06-21T07:46:00.125Z");
    EXPECT_EQ(format_timestamp(ts), "2013-06-21T07:46:00.125Z");
    EXPECT_EQ(parse_timestamp("2013-06-21T07:46:00.125+00:00"), ts);
    EXPECT_THROW(parse_timestamp("21/06/2013"), Error);

    std::mt19937 rng(7);
    std::uniform_int_distribution<long long> ms(0, 4'102'444'800'000LL); // up to 2100
    for (int i = 0; i < 1000; ++i) {
        const Timestamp t{std::chrono::milliseconds(ms(rng))};
        EXPECT_EQ(parse_timestamp(format_timestamp(t)), t);
    }
}

TEST(Csv, QuotedFieldsAndEmbeddedNewlines)
{
    const auto rows = csv::parse("\xEF\xBB\xBFtitle,slug\r\n\"a, \"\"b\"\"\",x\n\n\"multi\nline\",y\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0], (csv::Row{"title", "slug"}));
    EXPECT_EQ(rows[1], (csv::Row{"a, \"b\"", "x"}));
    EXPECT_EQ(rows[2], (csv::Row{"multi\nline", "y"}));
}

TEST(Csv, UnterminatedQuoteReportsLine)
{
    try {
        csv::parse("a,b\n\"open,c\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MalformedCsv);
        EXPECT_TRUE(e.detail().count("line"));
    }
}

TEST(Csv, FormatThenParseIsIdentity)
{
    std::mt19937 rng(11);
    const std::string alphabet = "ab ,\"\n\r\t";
    for (int trial = 0; trial < 500; ++trial) {
        csv::Row row;
        const int fields = 1 + static_cast<int>(rng() % 5);
        for (int f = 0; f < fields; ++f) {
            std::string cell;
            for (int k = static_cast<int>(rng() % 6); k > 0; --k) {
                cell += alphabet[rng() % alphabet.size()];
            }
            row.push_back(cell);
        }
        // A lone empty field is indistinguishable from an empty line.
        if (row.size() == 1 && row[0].empty()) {
            continue;
        }
        const auto parsed = csv::parse(csv::format_row(row));
        ASSERT_EQ(parsed.size(), 1u);
        EXPECT_EQ(parsed[0], row);
    }
}

TEST(ErrorCodes, StableStringsAndStatuses)
{
    EXPECT_EQ(code_string(ErrorCode::ScoreOutOfRange), "score.out_of_range");
    EXPECT_EQ(http_status(ErrorCode::ScoreOutOfRange), 400);
    EXPECT_EQ(http_status(ErrorCode::UnknownCourse), 404);
    EXPECT_EQ(http_status(ErrorCode::LevelMismatch), 422);
    EXPECT_EQ(code_from_string("archive.level_mismatch"), ErrorCode::LevelMismatch);
}
