#include "powerweights/cli.hpp"
#include "powerweights/error.hpp"
#include "powerweights/io.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace powerweights;
using powerweights::cli::parse_method_spec;
using powerweights::cli::run_cli;

namespace fs = std::filesystem;

namespace
{

struct CliRun
{
    int code = -1;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string> &args)
{
    std::ostringstream out;
    std::ostringstream err;
    CliRun r;
    r.code = run_cli(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class CliTest : public ::testing::Test
{
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("powerweights_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string &name, const std::string &content) const
    {
        const auto path = dir_ / name;
        std::ofstream(path) << content;
        return path.string();
    }
    std::string path(const std::string &name) const { return (dir_ / name).string(); }

    static std::string slurp(const std::string &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
};

} // namespace

TEST(MethodSpec, Parses)
{
    const auto rules = parse_method_spec("power:p=0.5; linpower:p=0.25,knot=0.02 ;cap;cap:threshold=0.05,target_aggregate=0.5");
    ASSERT_EQ(rules.size(), 4u);
    EXPECT_EQ(std::get<PowerRule>(rules[0]).p, 0.5);
    EXPECT_EQ(std::get<LinearizedPowerRule>(rules[1]).knot, 0.02);
    EXPECT_EQ(std::get<CapRule>(rules[2]).threshold, kDefaultCapThreshold);
    EXPECT_EQ(std::get<CapRule>(rules[3]).target_aggregate, 0.5);
    EXPECT_EQ(std::get<LinearizedPowerRule>(parse_method_spec("linpower:p=1")[0]).knot, kDefaultKnot);
    EXPECT_TRUE(parse_method_spec("").empty());
}

TEST(MethodSpec, Rejects)
{
    EXPECT_THROW(parse_method_spec("power"), Error);
    EXPECT_THROW(parse_method_spec("power:p=abc"), Error);
    EXPECT_THROW(parse_method_spec("power:q=0.5"), Error);
    EXPECT_THROW(parse_method_spec("magic:p=0.5"), Error);
    EXPECT_THROW(parse_method_spec("power:p=1.5"), Error);
    EXPECT_THROW(parse_method_spec("cap:threshold=0.5,target=0.4"), Error);
    EXPECT_THROW(parse_method_spec("power:p=0.5,knot=0.1"), Error);
}

TEST_F(CliTest, RebalanceTwoStockCsv)
{
    const auto input = write("u.csv", "id,market_cap\nAAA,70\nBBB,30\n");
    const auto report = path("r.csv");
    const auto r = run({"rebalance", "--input", input, "--method", "power", "--p", "0.5", "--output", report});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("turnover: 0.0956439"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("max weight: 0.7 -> 0.604356"), std::string::npos) << r.out;

    const auto text = slurp(report);
    EXPECT_NE(text.find("AAA,0.7,0.60435607626104"), std::string::npos) << text;
    EXPECT_NE(text.find("BBB,0.3,0.39564392373895996"), std::string::npos) << text;
    std::istringstream in(text);
    const auto after = read_weight_file(in, WeightColumn::After);
    EXPECT_NEAR(after.weight(0), 0.604356, 1e-6);
}

TEST_F(CliTest, RebalanceJsonDeterministic)
{
    const auto input = write("u.csv", "id,price,shares\nAAA,10,7\nBBB,5,6\nCCC,1,0.5\n");
    const auto a = path("a.json");
    const auto b = path("b.json");
    for (const auto &out : {a, b})
        ASSERT_EQ(run({"rebalance", "--input", input, "--method", "linpower", "--p", "0.4", "--knot", "0.05",
                       "--output", out, "--format", "json"})
                      .code,
                  0);
    EXPECT_EQ(slurp(a), slurp(b));
    const auto doc = nlohmann::json::parse(slurp(a));
    EXPECT_EQ(doc["method"], "linpower");
    EXPECT_EQ(doc["params"]["p"].get<double>(), 0.4);
}

TEST_F(CliTest, RebalanceUsageAndInputErrors)
{
    const auto input = write("u.csv", "id,market_cap\nAAA,70\nBBB,30\n");
    const auto bad = write("bad.csv", "id,market_cap\nAAA,-5\n");
    const auto out = path("r.csv");

    auto r = run({"rebalance", "--input", input, "--method", "power", "--output", out});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("--p"), std::string::npos);

    EXPECT_EQ(run({"rebalance", "--input", input, "--method", "power", "--p", "1.5", "--output", out}).code,
              cli::kExitUsage);
    EXPECT_EQ(run({"rebalance", "--input", input, "--method", "bogus", "--output", out}).code, cli::kExitUsage);
    EXPECT_EQ(run({"rebalance", "--input", input, "--method", "cap", "--threshold", "0.5", "--output", out}).code,
              cli::kExitUsage);

    r = run({"rebalance", "--input", bad, "--method", "power", "--p", "0.5", "--output", out});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_NE(r.err.find("row 2"), std::string::npos) << r.err;

    r = run({"rebalance", "--input", path("missing.csv"), "--method", "cap", "--output", out});
    EXPECT_EQ(r.code, cli::kExitInput);

    // both weights above the threshold leave nothing to absorb the remainder
    r = run({"rebalance", "--input", input, "--method", "cap", "--output", out});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_NE(r.err.find("threshold"), std::string::npos);
}

TEST_F(CliTest, NoSubcommandIsUsageError)
{
    const auto r = run({});
    EXPECT_EQ(r.code, cli::kExitUsage);
    EXPECT_NE(r.err.find("rebalance"), std::string::npos);
    EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST_F(CliTest, SolveTwoStock)
{
    const auto input = write("u.csv", "id,market_cap\nAAA,70\nBBB,30\n");
    auto r = run({"solve", "--input", input, "--target", "max", "--bound", "0.60"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("p_star: 0.478539"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("converged: true"), std::string::npos);

    r = run({"solve", "--input", input, "--target", "max", "--bound", "0.60", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    EXPECT_NEAR(doc["p_star"].get<double>(), 0.47853904401797065, 1e-9);

    r = run({"solve", "--input", input, "--target", "max", "--bound", "0.40"});
    EXPECT_EQ(r.code, cli::kExitInfeasible);
    EXPECT_EQ(run({"solve", "--input", input, "--target", "top-k", "--bound", "0.4"}).code, cli::kExitUsage);
    EXPECT_EQ(run({"solve", "--input", input, "--target", "top-k", "--k", "3", "--bound", "0.9"}).code,
              cli::kExitInput);
    EXPECT_EQ(run({"solve", "--input", input, "--target", "max", "--bound", "1.5"}).code, cli::kExitUsage);
}

TEST_F(CliTest, DiagnoseExitCodes)
{
    const auto same = write("w.csv", "id,weight\nAAA,0.7\nBBB,0.3\n");
    auto r = run({"diagnose", "--before", same, "--after", same});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("order violations: 0"), std::string::npos);

    const auto flipped = write("f.csv", "id,weight\nAAA,0.3\nBBB,0.7\n");
    r = run({"diagnose", "--before", same, "--after", flipped});
    EXPECT_EQ(r.code, cli::kExitPathology);
    EXPECT_NE(r.out.find("BBB (0.3 -> 0.7) overtakes AAA"), std::string::npos) << r.out;
    EXPECT_EQ(r.out.find("(increased)"), std::string::npos);

    const auto raised = write("m.csv", "id,weight\nAAA,0.8\nBBB,0.2\n");
    r = run({"diagnose", "--before", same, "--after", raised});
    EXPECT_EQ(r.code, cli::kExitPathology);
    EXPECT_NE(r.out.find("max weight: 0.7 -> 0.8 (increased)"), std::string::npos) << r.out;

    r = run({"diagnose", "--before", same, "--after", flipped, "--format", "json"});
    EXPECT_EQ(r.code, cli::kExitPathology);
    EXPECT_EQ(nlohmann::json::parse(r.out)["order_violation_count"], 1);

    const auto other = write("o.csv", "id,weight\nAAA,0.7\nCCC,0.3\n");
    EXPECT_EQ(run({"diagnose", "--before", same, "--after", other}).code, cli::kExitInput);
    EXPECT_EQ(run({"diagnose", "--before", same}).code, cli::kExitUsage);
}

TEST_F(CliTest, DiagnoseReadsReportColumns)
{
    std::vector<std::string> rows{"id,market_cap", "A,20", "B,19", "C,18", "D,5"};
    for (int i = 0; i < 10; ++i)
        rows.push_back("T" + std::to_string(i) + ",3.8");
    std::string text;
    for (const auto &row : rows)
        text += row + "\n";
    const auto input = write("u.csv", text);
    const auto report = path("cap.json");
    ASSERT_EQ(run({"rebalance", "--input", input, "--method", "cap", "--output", report, "--format", "json"}).code,
              0);
    const auto r = run({"diagnose", "--before", report, "--after", report});
    EXPECT_EQ(r.code, cli::kExitPathology);
    EXPECT_NE(r.out.find("order violations: 10"), std::string::npos) << r.out;
}

TEST_F(CliTest, CompareSideBySide)
{
    const auto input = write("u.csv", "id,market_cap\nAAA,70\nBBB,30\n");
    auto r = run({"compare", "--input", input, "--methods", "power:p=0.5;power:p=0.75"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("power(p=0.5)"), std::string::npos);
    EXPECT_NE(r.out.find("0.604356"), std::string::npos);
    EXPECT_NE(r.out.find("0.653729"), std::string::npos);
    EXPECT_NE(r.out.find("order_violations"), std::string::npos);

    r = run({"compare", "--input", input, "--methods", "power:p=0.5;linpower:p=0.5", "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto doc = nlohmann::json::parse(r.out);
    ASSERT_EQ(doc["methods"].size(), 2u);
    EXPECT_EQ(doc["methods"][1]["method"], "linpower");

    EXPECT_EQ(run({"compare", "--input", input, "--methods", "power:x=1"}).code, cli::kExitUsage);
    // the cap rule fails on this universe; error names the rule position
    r = run({"compare", "--input", input, "--methods", "power:p=0.5;cap"});
    EXPECT_EQ(r.code, cli::kExitInput);
    EXPECT_NE(r.err.find("rule 2"), std::string::npos);
}
