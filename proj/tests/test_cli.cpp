#include <gtest/gtest.h>

#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#ifndef WPV_CLI_PATH
#define WPV_CLI_PATH "wpv"
#endif
#ifndef WPV_TEST_CACHE
#define WPV_TEST_CACHE "tau_cache.txt"
#endif

namespace {

struct Run {
    std::string out;
    int code = -1;
};

Run run(const std::string& args, bool merge_stderr = false) {
    const std::string cmd = std::string("'") + WPV_CLI_PATH + "' --cache '" + WPV_TEST_CACHE + "' " + args +
                            (merge_stderr ? " 2>&1" : " 2>/dev/null");
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t got;
    while ((got = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), got);
    const int st = pclose(p);
    r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) v.push_back(l);
    return v;
}

}  // namespace

TEST(Cli, GapCurveCsv) {
    const auto r = run("gap-curve --alpha-grid 0:0.2:0.1");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 4u);
    EXPECT_EQ(l[0], "alpha,main,hide,cheeger");
    EXPECT_EQ(l[1], "0.000000,0.222222,0.187500,0.002468");
    EXPECT_EQ(l[3].substr(0, 8), "0.200000");
}

TEST(Cli, GapCurveJson) {
    const auto r = run("--format json gap-curve --alpha-grid 0:0.4:0.1");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("columns").size(), 4u);
    EXPECT_EQ(j.at("rows").size(), 5u);
    EXPECT_TRUE(j.contains("reference"));
}

TEST(Cli, OutputIsDeterministic) {
    const auto a = run("spectral gap-curve --alpha-grid 0:0.45:0.05");
    const auto b = run("spectral gap-curve --alpha-grid 0:0.45:0.05");
    EXPECT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("gap-curve --alpha-grid 0:0.6:0.1").code, 2);
    EXPECT_EQ(run("gap-curve --alpha-grid nonsense").code, 2);
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("volumes poly --g 1 --n 1 --unknown-flag").code, 2);
    EXPECT_EQ(run("--format xml gap-curve --alpha-grid 0:0.1:0.1").code, 2);
    const auto r = run("gap-curve --alpha-grid 0:0.6:0.1", true);
    EXPECT_NE(r.out.find("alpha-grid"), std::string::npos);
}

TEST(Cli, CacheVerify) {
    const auto r = run("cache verify");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2u);
    EXPECT_NE(l[1].find(",true,"), std::string::npos);
    const std::string bad = std::string("'") + WPV_CLI_PATH + "' --cache /nonexistent/cache.txt cache verify >/dev/null 2>&1";
    const int st = std::system(bad.c_str());
    EXPECT_EQ(WEXITSTATUS(st), 1);
}

TEST(Cli, OneHoledTorusPolynomial) {
    const auto r = run("volumes poly --g 1 --n 1");
    ASSERT_EQ(r.code, 0);
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 3u);
    EXPECT_EQ(l[1].substr(0, 8), "0,1:1/12");
    EXPECT_EQ(l[2].substr(0, 8), "1,0:1/48");
}

TEST(Cli, CancellationIsExactlyZero) {
    const auto r = run("--format json expect cancellation --n 3");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    const auto& row = j.at("rows").at(0);
    EXPECT_EQ(row.at("sum"), "0");
    EXPECT_EQ(row.at("zero"), "true");
}

TEST(Cli, SeriesIdentity) {
    const auto r = run("--format json expect identity --K 100");
    ASSERT_EQ(r.code, 0);
    EXPECT_FALSE(nlohmann::json::parse(r.out).at("rows").empty());
}
