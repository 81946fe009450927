#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>

#include "cefr/error.hpp"
#include "cefr/zip.hpp"
#include "fixtures.hpp"

using namespace cefr;

TEST(Zip, RoundTripMixedEntries)
{
    std::string binary(4096, '\0');
    std::mt19937 rng(8);
    for (auto& c : binary) {
        c = static_cast<char>(rng());
    }
    const std::vector<zip::Entry> entries{
        {"manifest.json", "{\"format_version\":1}"},
        {"empty.txt", ""},
        {"repetitive.txt", std::string(100000, 'a')},
        {"noise.bin", binary},
    };
    const auto bytes = zip::write(entries);
    EXPECT_EQ(bytes.substr(0, 4), std::string("PK\x03\x04", 4));
    EXPECT_LT(bytes.size(), 100000u);
    EXPECT_EQ(zip::read(bytes), entries);
}

TEST(Zip, RejectsGarbageAndTruncation)
{
    const auto bytes = zip::write({{"a.txt", "hello hello hello"}});
    for (const auto& bad : {std::string{}, std::string("not a zip"), bytes.substr(0, bytes.size() - 5),
                            bytes.substr(10)}) {
        try {
            zip::read(bad);
            FAIL();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::CorruptArchive);
        }
    }
}

TEST(Zip, DetectsPayloadCorruption)
{
    auto bytes = zip::write({{"a.txt", std::string(64, 'x') + "payload"}});
    // First payload byte follows the 30-byte local header and the name.
    bytes[30 + 5] = static_cast<char>(bytes[30 + 5] ^ 0x55);
    EXPECT_THROW(zip::read(bytes), Error);
}

TEST(Zip, ReadableByAnIndependentReader)
{
    if (std::system("command -v python3 >/dev/null 2>&1") != 0) {
        GTEST_SKIP() << "python3 not installed";
    }
    test::TempDir dir;
    const auto path = dir.path() / "t.zip";
    std::ofstream(path, std::ios::binary)
        << zip::write({{"x.json", "{\"k\": [1, 2, 3]}"}, {"big.txt", std::string(5000, 'z')}});
    const auto cmd = "python3 -c \"import sys, zipfile; z = zipfile.ZipFile(sys.argv[1]); "
                     "sys.exit(z.testzip() is not None or z.read('big.txt') != b'z' * 5000)\" "
                   + path.string();
    EXPECT_EQ(std::system(cmd.c_str()), 0);
}
