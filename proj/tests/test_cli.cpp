#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hitkit/cli.hpp"

using namespace hitkit;
using nlohmann::json;

namespace {

struct Run {
    int code;
    std::string out, err;
};

Run cli_run(std::vector<std::string> args) {
    args.insert(args.begin(), "hitkit");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// CSV body without the '#' header lines.
std::vector<std::vector<std::string>> csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::filesystem::path scratch(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / "hitkit_cli_test";
    std::filesystem::create_directories(d);
    return d / name;
}

} // namespace

TEST(Eval, IntervalRowsMatchClosedForm) {
    auto r = cli_run({"eval", "--geometry", "interval", "--alpha", "1.2", "--start", "0,0.3", "--grid", "r=1.1:4:5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"r", "value", "err_est"}));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double x = std::stod(rows[i][0]);
        EXPECT_EQ(std::stod(rows[i][1]), interval_poisson(1.2, 0.3, x)) << x;
    }
    EXPECT_NE(r.out.find("# version: "), std::string::npos);
    EXPECT_NE(r.out.find("# seed: "), std::string::npos);
}

TEST(Eval, HalfspaceRelativisticTwoDimensions) {
    auto r = cli_run({"eval", "--geometry", "halfspace", "--alpha", "1", "--mass", "1", "--start", "-1,0", "--grid",
                      "s1=0.5,2", "--grid", "s2=-1,0,1", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["columns"], json({"s1", "s2", "value", "err_est"}));
    ASSERT_EQ(j["rows"].size(), 6u);
    for (auto& row : j["rows"]) {
        std::vector<double> s{row[0].get<double>(), row[1].get<double>()};
        double want = halfspace_poisson_relativistic(1.0, 1.0, 2, {-1.0, 0.0}, s);
        EXPECT_EQ(row[2].get<double>(), want);
        EXPECT_LT(want, halfspace_poisson_stable(1.0, 2, {-1.0, 0.0}, s));
    }
    EXPECT_EQ(j["manifest"]["params"]["mass"], 1.0);
}

TEST(Eval, ManifestFileWithFlagOverride) {
    auto path = scratch("manifest.json");
    std::ofstream(path) << R"({"params": {"alpha": 0.7}, "geometry": "halfline2d", "start": [0, -1],
                               "grid": [{"name": "r", "lo": 0.5, "hi": 2, "n": 4}]})";
    auto r = cli_run({"eval", "--manifest", path.string(), "--alpha", "1.3"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 5u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double x = std::stod(rows[i][0]);
        EXPECT_EQ(std::stod(rows[i][1]), halfline2d_boundary_kernel(1.3, 0.0, -1.0, x));
    }
}

TEST(Usage, BadInputsExitTwo) {
    EXPECT_EQ(cli_run({"eval", "--geometry", "interval", "--alpha", "1", "--start", "0,0", "--grid", "r=3,2"}).code, 2);
    EXPECT_EQ(cli_run({"eval", "--geometry", "interval", "--alpha", "1", "--start", "0,0", "--grid", "r=2,x"}).code, 2);
    EXPECT_EQ(cli_run({"eval", "--geometry", "nowhere", "--grid", "r=2"}).code, 2);
    EXPECT_EQ(cli_run({"eval", "--geometry", "interval", "--alpha", "2.5", "--start", "0,0", "--grid", "r=2"}).code, 2);
    EXPECT_EQ(cli_run({"verify", "--suite", "A12"}).code, 2);
    EXPECT_EQ(cli_run({"verify", "--suite", "nonsense"}).code, 2);
    EXPECT_EQ(cli_run({"frobnicate"}).code, 2);
    EXPECT_EQ(cli_run({"eval", "--manifest", scratch("missing.json").string()}).code, 2);
    auto r = cli_run({"eval", "--geometry", "interval", "--alpha", "1", "--start", "0,0", "--grid", "r=3,2"});
    EXPECT_NE(r.err.find("increasing"), std::string::npos);
}

TEST(Simulate, HalflineTwoDimensionalRows) {
    auto r = cli_run({"simulate", "--geometry", "halfline2d", "--alpha", "1", "--start", "0.5,-1", "--paths", "100000",
                      "--seed", "7"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 100001u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"path", "place_1", "time_functional", "exact_place", "exact_time", "ok"}));
    long inside = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ASSERT_EQ(std::stol(rows[i][0]), long(i - 1));
        double place = std::stod(rows[i][1]);
        ASSERT_GT(place, 0.0);
        EXPECT_EQ(rows[i][3], "1");
        EXPECT_EQ(rows[i][5], "1");
        inside += place > 0.5 && place < 2.0;
    }
    // every draw is exact in place: compare one bin against the Laplace kernel at lambda = 0
    quad::QuadSpec q;
    q.tol = 1e-10;
    double p = quad::integrate([&](double s) { return halfline2d_laplace_kernel(1.0, 0.0, 0.5, -1.0, s, q); }, 0.5, 2.0, q)
                   .value;
    double se = std::sqrt(p * (1 - p) / 1e5);
    EXPECT_LT(std::fabs(inside / 1e5 - p), 4 * se);
}

TEST(Simulate, StripMarksTimeAsApproximate) {
    auto r = cli_run({"simulate", "--geometry", "strip", "--alpha", "1", "--start", "0.3,0.2", "--paths", "500",
                      "--dt", "0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rows = csv(r.out);
    ASSERT_EQ(rows.size(), 501u);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][3], "0");
        EXPECT_EQ(rows[i][4], "0");
    }
}

TEST(Binary, ByteIdenticalReruns) {
    auto a = scratch("a.csv"), b = scratch("b.csv"), c = scratch("c.csv");
    std::string base = std::string("SOURCE_DATE_EPOCH=1700000000 ") + HITKIT_CLI_PATH +
                       " simulate --geometry halfspace --alpha 1.4 --start 0.5,-1,0 --paths 2000";
    ASSERT_EQ(std::system((base + " --seed 11 > " + a.string()).c_str()), 0);
    ASSERT_EQ(std::system((base + " --seed 11 > " + b.string()).c_str()), 0);
    ASSERT_EQ(std::system((base + " --seed 12 > " + c.string()).c_str()), 0);
    std::string ta = slurp(a), tb = slurp(b), tc = slurp(c);
    EXPECT_FALSE(ta.empty());
    EXPECT_EQ(ta, tb);
    EXPECT_NE(ta, tc);
    EXPECT_NE(ta.find("# wall_clock: 2023-11-14T22:13:20Z"), std::string::npos);
}

TEST(Binary, ExitCodes) {
    std::string cli = HITKIT_CLI_PATH;
    auto status = [](const std::string& cmd) {
        int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WEXITSTATUS(s);
    };
    EXPECT_EQ(status(cli + " --version"), 0);
    EXPECT_EQ(status(cli + " eval --geometry interval --alpha 1 --start 0,0 --grid r=3,2"), 2);
    EXPECT_EQ(status(cli + " verify --suite bogus"), 2);
}

TEST(Verify, IdentitiesSuitePassesAndReports) {
    auto path = scratch("identities.json");
    auto r = cli_run({"verify", "--suite", "identities", "--out", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("A4 PASS"), std::string::npos) << r.err;
    auto j = json::parse(slurp(path));
    EXPECT_TRUE(j["all_passed"].get<bool>());
    ASSERT_EQ(j["criteria"].size(), 1u);
    EXPECT_EQ(j["criteria"][0]["id"], "A4");
    auto rep = cli_run({"report", path.string()});
    EXPECT_EQ(rep.code, 0);
    EXPECT_EQ(rep.out.rfind("A4 PASS", 0), 0u) << rep.out;
}
