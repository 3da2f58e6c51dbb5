#include "json.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string output;  // stdout and stderr
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(SUBLIN_CLI) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p)) r.output += buf.data();
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string example(const std::string& name) { return std::string(SUBLIN_EXAMPLES) + "/" + name + ".json"; }

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sublin_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p.parent_path());
    return p;
}

fs::path write_config(const std::string& name, const std::string& text)
{
    const fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p;
}

json read_report(const fs::path& dir)
{
    std::ifstream in(dir / "report.json");
    return json::parse(in);
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, EigenvalueRunWritesReportAndFields)
{
    const fs::path out = scratch("eig");
    const Result r = run("eig --config " + example("eig") + " --out " + out.string());
    ASSERT_EQ(r.code, 0) << r.output;
    const json rep = read_report(out);
    EXPECT_EQ(rep["command"], "eig");
    EXPECT_EQ(rep["status"], "ok");
    EXPECT_NEAR(rep["mu1"].get<double>(), 1.6980869, 5e-7);
    EXPECT_NEAR(rep["tstar"].get<double>(), 0.709138295, 5e-8);
    EXPECT_TRUE(fs::exists(out / "fields" / "phi1.csv"));
}

TEST(Cli, ConfigCommandIsEnoughWithoutSubcommand)
{
    const fs::path out = scratch("eig_nosub");
    EXPECT_EQ(run("--config " + example("eig") + " --out " + out.string()).code, 0);
}

TEST(Cli, MismatchedSubcommandIsAConfigError)
{
    const Result r = run("solve --config " + example("eig") + " --out " + scratch("mismatch").string());
    EXPECT_EQ(r.code, 1) << r.output;
}

TEST(Cli, FailedInequalityExitsTwoAndNamesIt)
{
    const fs::path out = scratch("inferno");
    const Result r = run("radial-check --config " + example("radial-inferno") + " --out " + out.string());
    ASSERT_EQ(r.code, 2) << r.output;
    const json rep = read_report(out);
    EXPECT_EQ(rep["failure"]["name"], "inferno");
    EXPECT_GT(rep["failure"]["lhs"].get<double>(), rep["failure"]["rhs"].get<double>());
}

TEST(Cli, ConstructionExamplesSucceed)
{
    for (const char* name : {"radial-cc", "radial-rad2"}) {
        const fs::path out = scratch(name);
        const Result r = run("--config " + example(name) + " --out " + out.string());
        EXPECT_EQ(r.code, 0) << name << ": " << r.output;
        EXPECT_EQ(read_report(out)["verify"]["verdict"], true) << name;
    }
}

TEST(Cli, MissingCommandPointsAtTheLine)
{
    const fs::path cfg = write_config("nocmd.json", "{\n  \"grid\": {\"x0\": 0, \"x1\": 1, \"nodes\": 33}\n}\n");
    const Result r = run("--config " + cfg.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find(cfg.string() + ":1: missing required key \"command\""), std::string::npos) << r.output;
}

TEST(Cli, SyntaxErrorReportsLineAndColumn)
{
    const fs::path cfg = write_config("bad.json", "{\"command\": \"eig\",\n \"grid\": {\"nodes\": 12,,}\n}\n");
    const Result r = run("--config " + cfg.string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find(cfg.string() + ":2:"), std::string::npos) << r.output;
}

TEST(Cli, InvalidValueNamesItsLine)
{
    const fs::path cfg = write_config("nodes.json",
                                      "{\"command\": \"eig\",\n \"weight\": {\"case\": \"remark-q0\", \"q\": 0.5},\n"
                                      " \"grid\": {\"x0\": 0, \"x1\": \"pi\",\n   \"nodes\": 2.5}\n}\n");
    const Result r = run("--config " + cfg.string() + " --out " + scratch("nodes").string());
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.output.find(cfg.string() + ":4:"), std::string::npos) << r.output;
}

TEST(Cli, RunsAreDeterministic)
{
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    ASSERT_EQ(run("--config " + example("branch") + " --out " + a.string()).code, 0);
    ASSERT_EQ(run("--config " + example("branch") + " --out " + b.string()).code, 0);
    EXPECT_EQ(slurp(a / "report.json"), slurp(b / "report.json"));
    EXPECT_EQ(slurp(a / "branch.csv"), slurp(b / "branch.csv"));
}

TEST(Cli, ValidateInjectedFaultFailsTheIdentityItem)
{
    const Result r = run("validate --inject-tstar-fault");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.output.find("FAIL 3 ls_identities"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("PASS 1 exact_solution"), std::string::npos) << r.output;
}
