#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "lrroc/io.hpp"

using namespace lrroc;

namespace {

std::vector<InputRecord> parse(const std::string& text) {
    std::istringstream in(text);
    return parse_records_csv(in);
}

}  // namespace

TEST(ParseRecordsCsv, ReadsHeaderedFile) {
    const auto r = parse("value,group\n1.5,0\n  -2e3 , 1\r\n\n7,1\n");
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0], (InputRecord{1.5, 0}));
    EXPECT_EQ(r[1], (InputRecord{-2000.0, 1}));
    EXPECT_EQ(r[2], (InputRecord{7.0, 1}));
}

TEST(ParseRecordsCsv, RejectsMalformedInput) {
    for (const char* bad : {"", "x,y\n1,0\n", "value,group\n1,2\n", "value,group\nabc,0\n",
                            "value,group\n1;0\n", "value,group\n1,0,3\n", "value,group\nnan,1\n",
                            "value,group\ninf,0\n", "value,group\n1.5.2,0\n", "value,group\n1,\n"}) {
        try {
            parse(bad);
            ADD_FAILURE() << "accepted: " << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidData);
        }
    }
}

TEST(ParseRecordsCsv, RoundTripsThroughSerialization) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    std::uniform_int_distribution<int> len(0, 200), exp(-300, 300);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<InputRecord> recs(len(rng));
        for (auto& r : recs) {
            r.value = u(rng) * std::pow(10.0, exp(rng) / 10);
            r.group = static_cast<int>(rng() & 1);
        }
        const auto once = parse(serialize_records_csv(recs));
        EXPECT_EQ(once, recs);
        EXPECT_EQ(parse(serialize_records_csv(once)), once);
    }
}

TEST(ParseValueList, OptionalHeader) {
    std::istringstream a("value\n1\n2.5\n\n3\n"), b("4\n5\n");
    EXPECT_EQ(parse_value_list(a), (std::vector<double>{1, 2.5, 3}));
    EXPECT_EQ(parse_value_list(b), (std::vector<double>{4, 5}));
    std::istringstream bad("1\nx\n");
    EXPECT_THROW(parse_value_list(bad), Error);
}

TEST(RecordsToData, SplitsGroups) {
    const std::vector<InputRecord> r{{1, 0}, {2, 1}, {3, 0}, {4, 1}, {5, 1}};
    const auto d = records_to_data(r);
    EXPECT_EQ(d.n0(), 2u);
    EXPECT_EQ(d.n1(), 3u);
    EXPECT_EQ(d.diseased()[2], 5.0);
    const std::vector<InputRecord> one{{1, 0}, {2, 1}, {3, 1}};
    EXPECT_THROW(records_to_data(one), Error);
}
