#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "hypiter/commands.hpp"
#include "hypiter/io.hpp"

using namespace hypiter;

namespace {

std::string message_of(const std::string& text) {
    try {
        (void)parse_config(text);
    } catch (const PreconditionError& e) {
        return e.what();
    }
    return "";
}

std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("hypiter_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Config, MinimalDwGetsDefaults) {
    const RunConfig cfg = parse_config(R"j({"command":"dw","map":"affine(0.5,0.2)","z0":[0.1,0.0]})j");
    EXPECT_EQ(cfg.command(), "dw");
    EXPECT_EQ(cfg.count("N"), 1000u);
    EXPECT_EQ(cfg.number("tol"), 1e-10);
    EXPECT_EQ(cfg.complex("z0"), Complex(0.1, 0.0));
    EXPECT_EQ(cfg.count("seed"), 0u);
}

TEST(Config, UnknownKeyIsNamedWithPosition) {
    const std::string msg = message_of(R"j({"command":"dw","map":"affine(0.5,0.2)","foo":1})j");
    EXPECT_NE(msg.find("'foo'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 1, column 41"), std::string::npos) << msg;
}

TEST(Config, ConstructT7Example) {
    const RunConfig cfg = parse_config(R"j({"command":"construct-t7","domain":"horodisk(0,0.5)","N":20})j");
    EXPECT_EQ(cfg.count("N"), 20u);
    EXPECT_EQ(cfg.number("rho_x"), 0.3);
    EXPECT_EQ(cfg.grid("probe").rings, 24);
}

TEST(Config, RoundTrips) {
    for (const char* text : {R"j({"command":"dw","map":"affine(0.5,0.2)","z0":[0.1,0.0]})j",
                             R"j({"command":"construct-t7","domain":"horodisk(0,0.5)","N":20,"probe":{"rings":3}})j",
                             R"j({"command":"qc","domain":"rdense(0.5,4)","K":[1,3]})j",
                             R"j({"command":"verify-lemmas","C":[2.5,4],"moduli":[0.9,0.95]})j",
                             R"j({"command":"ifs-run","marked":[[0.1,0.2]],"tol":1e-9,"seed":7})j"}) {
        const RunConfig once = parse_config(text);
        const std::string canonical = serialize_config(once);
        const RunConfig twice = parse_config(canonical);
        EXPECT_TRUE(once == twice) << text;
        EXPECT_EQ(serialize_config(twice), canonical);
    }
}

TEST(Config, RejectsBadInput) {
    EXPECT_NE(message_of(R"j({"command":"dw","map":"affine(0.5,0.2)",})j").find("column"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"dw"})j").find("'map'"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"warp"})j").find("unknown command"), std::string::npos);
    EXPECT_NE(message_of(R"j({"map":"affine(0.5,0.2)"})j").find("command"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"dw","map":"affine(0.5,0.2)","N":-3})j").find("'N'"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"dw","map":"affine(0.5,0.2)","N":2.5})j").find("'N'"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"dw","map":"affine(0.5,0.2)","z0":[1]})j").find("[re, im]"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"bloch","domain":"disk(0,0)"})j").find("'domain'"), std::string::npos);
    EXPECT_NE(message_of(R"j({"command":"ifs-run","probe":{"ringz":3}})j").find("probe.ringz"), std::string::npos);
    EXPECT_NE(message_of("[1,2]").find("object"), std::string::npos);
}

TEST(Execute, DwAffineLimit) {
    const Outputs out = execute(parse_config(R"j({"command":"dw","map":"affine(0.5,0.2)","z0":[0.1,0.0]})j"));
    const auto limit = out.report["limit"];
    EXPECT_NEAR(limit[0].get<double>(), 0.4, 1e-10);
    EXPECT_NEAR(limit[1].get<double>(), 0.0, 1e-10);
    EXPECT_EQ(out.report["kind"], "interior");
    EXPECT_EQ(out.trace.rfind("n,probe_index,re,im,diameter\n", 0), 0u);
}

TEST(Execute, T7ReportHasTwentyCheckedSteps) {
    const Outputs out = execute(parse_config(R"j({"command":"construct-t7","domain":"horodisk(0,0.5)","N":20})j"));
    const auto& steps = out.report["construction"]["steps"];
    ASSERT_EQ(steps.size(), 20u);
    for (const auto& s : steps) {
        ASSERT_EQ(s["checks"].size(), 5u);
        for (const auto& [name, value] : s["checks"].items()) EXPECT_TRUE(value.get<bool>()) << name;
    }
    EXPECT_EQ(out.report["run"]["verdict"], "NonConstant");
    EXPECT_TRUE(out.report["all_checks"].get<bool>());
}

TEST(Execute, EmptyProbeGridGivesHeaderOnlyTrace) {
    const Outputs out = execute(parse_config(R"j({"command":"ifs-run","N":5,"probe":{"rings":0}})j"));
    EXPECT_EQ(out.trace, "n,probe_index,re,im,diameter\n");
}

TEST(Execute, TraceRowsMatchProbeGrid) {
    const Outputs out = execute(parse_config(R"j({"command":"ifs-run","N":4,"probe":{"rings":2,"angles":3}})j"));
    std::istringstream lines(out.trace);
    std::string line;
    int rows = -1;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 4 * 7);
}

TEST(Execute, ReportEchoesValidConfig) {
    const RunConfig cfg = parse_config(R"j({"command":"bloch","domain":"disk(0,0,0.5)","depth":2})j");
    const Outputs out = execute(cfg);
    EXPECT_TRUE(parse_config(out.report["config"].dump()) == cfg);
    EXPECT_EQ(out.report["command"], "bloch");
    EXPECT_TRUE(out.report["search"].contains("center"));
    EXPECT_TRUE(out.report["search"].contains("inradius"));
    EXPECT_TRUE(out.report["search"].contains("verdict"));
    EXPECT_TRUE(out.report["search"].contains("budget"));
}

TEST(Execute, NumericFailurePropagates) {
    const RunConfig cfg = parse_config(R"j({"command":"dw","map":"mobius(0,0,1);mobius(0,0,0)","z0":[0.5,0],"N":50})j");
    EXPECT_THROW(execute(cfg), NumericError);
}

TEST(Emit, WritesThreeFilesDeterministically) {
    const RunConfig cfg = parse_config(R"j({"command":"construct-t8","N":6,"probe":{"rings":4,"angles":6}})j");
    const auto one = scratch_dir("emit_one"), two = scratch_dir("emit_two");
    setenv("HYPITER_THREADS", "1", 1);
    emit_outputs(one, execute(cfg));
    setenv("HYPITER_THREADS", "4", 1);
    emit_outputs(two, execute(cfg));
    unsetenv("HYPITER_THREADS");
    for (const char* name : {"trace.csv", "report.json", "grid.csv"}) {
        ASSERT_TRUE(std::filesystem::exists(one / name)) << name;
        EXPECT_EQ(slurp(one / name), slurp(two / name)) << name;
    }
}

TEST(Emit, UnwritableDirectoryNamesPath) {
    const auto base = scratch_dir("emit_blocked");
    std::filesystem::create_directories(base);
    std::ofstream(base / "file") << "x";
    const auto target = base / "file" / "sub";
    try {
        emit_outputs(target, Outputs{});
        FAIL();
    } catch (const PreconditionError& e) {
        EXPECT_NE(std::string(e.what()).find(target.string()), std::string::npos) << e.what();
    }
}
