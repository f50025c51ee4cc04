#include <gtest/gtest.h>

#include <sstream>

#include "cohrel/data.hpp"
#include "cohrel/errors.hpp"
#include "support.hpp"

using namespace cohrel;

namespace {

ComponentDataset parse_components(const std::string& text) {
    std::istringstream in(text);
    return read_component_csv(in);
}

std::size_t error_line(const std::string& text) {
    try {
        parse_components(text);
    } catch (const ParseError& e) {
        return e.position();
    }
    return 0;
}

}  // namespace

TEST(Data, IntervalKinds) {
    EXPECT_EQ(ObsInterval::exact(2).kind(), CensorKind::Exact);
    EXPECT_EQ(ObsInterval::right(2).kind(), CensorKind::Right);
    EXPECT_EQ(ObsInterval::left(2).kind(), CensorKind::Left);
    EXPECT_EQ((ObsInterval{1, 2}).kind(), CensorKind::Interval);
    EXPECT_FALSE((ObsInterval{3, 2}).valid());
    EXPECT_FALSE((ObsInterval{-1, 2}).valid());
}

TEST(Data, IntervalsFromSeries) {
    const auto ds = intervals_from_series({{1, 1.92, 1}, {10, 2.40, 2}}, 4);
    ASSERT_EQ(ds.size(), 2u);
    EXPECT_EQ(ds.rows[0][0], ObsInterval::exact(1.92));
    for (int j = 1; j < 4; ++j) EXPECT_EQ(ds.rows[0][j], ObsInterval::right(1.92));
    EXPECT_EQ(ds.rows[1][1], ObsInterval::exact(2.40));
    EXPECT_EQ(ds.rows[1][0], ObsInterval::right(2.40));
    EXPECT_EQ(intervals_from_series({{1, 3.0, 1}}, 1).rows[0][0], ObsInterval::exact(3.0));
}

TEST(Data, IntervalsFromParallel) {
    const auto ds = intervals_from_parallel({{3, 4.93, 2}, {1, 0.18, 1}}, 3);
    EXPECT_EQ(ds.rows[0][1], ObsInterval::exact(4.93));
    EXPECT_EQ(ds.rows[0][0], ObsInterval::left(4.93));
    EXPECT_EQ(ds.rows[0][2], ObsInterval::left(4.93));
    EXPECT_EQ(ds.rows[1][0], ObsInterval::exact(0.18));
    EXPECT_EQ(intervals_from_parallel({{1, 3.0, 1}}, 1).rows[0][0], ObsInterval::exact(3.0));
}

TEST(Data, ComponentRows) {
    const auto ds = parse_components(
        "id,l_1,u_1,l_2,u_2,l_3,u_3\n"
        "2,0,2.09,2.09,2.09,2.09,inf\n"
        "5,1.89,1.89,1.89,inf,0,1.89\n");
    ASSERT_EQ(ds.m, 3);
    EXPECT_EQ(ds.rows[0][0].kind(), CensorKind::Left);
    EXPECT_EQ(ds.rows[0][1].kind(), CensorKind::Exact);
    EXPECT_EQ(ds.rows[0][2].kind(), CensorKind::Right);
    EXPECT_EQ(ds.rows[1][0].kind(), CensorKind::Exact);
    EXPECT_EQ(ds.rows[1][1].kind(), CensorKind::Right);
    EXPECT_EQ(ds.rows[1][2].kind(), CensorKind::Left);
    EXPECT_DOUBLE_EQ(ds.column(1)[1].l, 1.89);
}

TEST(Data, EmptyFileWithHeader) {
    EXPECT_EQ(parse_components("id,l_1,u_1\n").size(), 0u);
    std::istringstream in("id,t,delta\n");
    EXPECT_TRUE(read_system_csv(in).empty());
}

TEST(Data, ParseErrorsReportLine) {
    EXPECT_EQ(error_line("id,l_1,u_1\n1,0,1\n2,3,1\n"), 3u);   // l > u
    EXPECT_EQ(error_line("id,l_1,u_1\n1,-1,1\n"), 2u);         // negative l
    EXPECT_EQ(error_line("id,l_1,u_1\n1,0,1\n2,0\n"), 3u);     // short row
    EXPECT_EQ(error_line("id,l_1,u_1\n1,0,abc\n"), 2u);
    EXPECT_EQ(error_line("id,lower,upper\n"), 1u);
}

TEST(Data, MaskedRows) {
    std::istringstream in(
        "id,t,delta_1,upsilon_1,delta_2,upsilon_2,delta_3,upsilon_3\n"
        "4,19.17,-,1,2,0,-,1\n"
        "5,1.89,-,1,2,0,3,0\n"
        "6,2.00,1,0,2,0,3,0\n");
    std::vector<std::string> warnings;
    const auto r = read_masked_csv(in, &warnings);
    ASSERT_EQ(r.size(), 3u);
    EXPECT_EQ(r[0].mask_set(), (std::vector<int>{1, 3}));
    EXPECT_EQ(r[0].delta[1], 2);
    // a singleton set is the known cause
    EXPECT_TRUE(r[1].mask_set().empty());
    EXPECT_EQ(r[1].delta[0], 1);
    EXPECT_EQ(r[1].upsilon[0], 0);
    EXPECT_EQ(warnings.size(), 1u);
    EXPECT_TRUE(r[2].mask_set().empty());
}

TEST(Data, MaskedConsistencyErrors) {
    const std::string head = "id,t,delta_1,upsilon_1,delta_2,upsilon_2\n";
    auto load = [&](const std::string& row) {
        std::istringstream in(head + row);
        return read_masked_csv(in);
    };
    EXPECT_THROW(load("1,2.0,1,1,-,1\n"), ParseError);  // upsilon 1 with delta present
    EXPECT_THROW(load("1,2.0,-,0,1,0\n"), ParseError);  // delta '-' with upsilon 0
    EXPECT_THROW(load("1,2.0,4,0,1,0\n"), ParseError);
}

TEST(Data, SystemRoundTrip) {
    const auto recs = load_system_csv(testsupport::fixture("series4.csv"));
    ASSERT_EQ(recs.size(), 10u);
    EXPECT_EQ(recs[0], (SystemRecord{1, 1.92, 1}));
    std::ostringstream out;
    write_system_csv(recs, out);
    std::istringstream back(out.str());
    EXPECT_EQ(read_system_csv(back), recs);
}

TEST(Data, ComponentAndMaskedRoundTrip) {
    const auto ds = load_component_csv(testsupport::fixture("two_of_three.csv"));
    std::ostringstream out;
    write_component_csv(ds, out);
    std::istringstream back(out.str());
    EXPECT_EQ(read_component_csv(back), ds);

    const auto mk = load_masked_csv(testsupport::fixture("two_of_three_masked.csv"));
    std::ostringstream mo;
    write_masked_csv(mk, mo);
    std::istringstream mb(mo.str());
    EXPECT_EQ(read_masked_csv(mb), mk);
}

TEST(Data, DuplicateIdsWarn) {
    std::istringstream in("id,t,delta\n1,1.5,1\n1,2.5,2\n");
    std::vector<std::string> warnings;
    const auto recs = read_system_csv(in, &warnings);
    EXPECT_EQ(recs.size(), 2u);
    EXPECT_EQ(warnings.size(), 1u);
    std::ostringstream out;
    write_system_csv(recs, out);
    std::istringstream back(out.str());
    EXPECT_EQ(read_system_csv(back), recs);
}

TEST(Data, MissingFile) { EXPECT_THROW(load_system_csv("/nonexistent/x.csv"), InputError); }

TEST(Data, FormatTime) {
    EXPECT_EQ(format_time(kInf), "inf");
    EXPECT_EQ(format_time(1.92), "1.92");
    EXPECT_EQ(format_time(1234.5678), "1234.57");
}
