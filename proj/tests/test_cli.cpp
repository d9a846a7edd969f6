#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {
const std::string cli = PPDEPTH_CLI;

struct Result {
    int code;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Result run(const std::string& args, const std::string& env = "") {
    static int counter = 0;
    const auto dir = fs::temp_directory_path() / "ppdepth_cli_io";
    fs::create_directories(dir);
    const auto out = dir / ("out" + std::to_string(counter) + ".txt");
    const auto err = dir / ("err" + std::to_string(counter++) + ".txt");
    const std::string cmd = env + " " + cli + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

class Cli : public ::testing::Test {
protected:
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() / ("ppdepth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};
} // namespace

TEST_F(Cli, CheckPassesOnDefaults) {
    const auto r = run("check");
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(Cli, UnknownSubcommandIsUsageError) {
    const auto r = run("frobnicate");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown subcommand"), std::string::npos);
    EXPECT_NE(r.err.find("Usage"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(run("").code, 1);
    EXPECT_EQ(run("simulate --n notanumber").code, 1);
}

TEST_F(Cli, EmptyProcessesHaveZeroDistance) {
    std::ofstream(path("empty.jsonl")) << "{\"T\": 100}\n{\"id\":\"e1\",\"events\":[]}\n{\"id\":\"e2\",\"events\":[]}\n";
    const auto r = run("distance --a " + path("empty.jsonl") + " --b " + path("empty.jsonl"));
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "id,e1,e2\ne1,0,0\ne2,0,0\n");
}

TEST_F(Cli, DataErrorsExitTwo) {
    EXPECT_EQ(run("depth --data " + path("missing.jsonl")).code, 2);
    std::ofstream(path("bad.jsonl")) << "{\"T\": 10}\n{\"events\": [11]}\n";
    const auto r = run("rank --data " + path("bad.jsonl"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
    EXPECT_EQ(run("simulate --model hpp --lambda -1").code, 2);
}

TEST_F(Cli, SimulateWritesDataAndManifest) {
    const auto r = run("simulate --model ipp --n 15 --seed 4 --out " + path("s.jsonl"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.err.find("seed=4"), std::string::npos);
    const auto m = nlohmann::json::parse(slurp(path("s.jsonl") + ".manifest.json"));
    EXPECT_EQ(m["seed"], 4);
    ASSERT_EQ(m["outputs"].size(), 1u);
    EXPECT_EQ(m["outputs"][0]["sha256"].get<std::string>().size(), 64u);
    const auto again = run("simulate --model ipp --n 15 --seed 4 --out " + path("t.jsonl"));
    ASSERT_EQ(again.code, 0);
    EXPECT_EQ(slurp(path("s.jsonl")), slurp(path("t.jsonl")));
}

TEST_F(Cli, PipelineCommandsProduceCsv) {
    ASSERT_EQ(run("simulate --n 12 --seed 2 --out " + path("s.txt")).code, 0);
    const auto smooth = run("smooth --data " + path("s.txt") + " --grid 3");
    EXPECT_EQ(smooth.code, 0) << smooth.err;
    EXPECT_EQ(smooth.out.substr(0, 7), "t,f,id\n");
    const auto depth = run("depth --data " + path("s.txt") + " --method modified_h_depth --h 50");
    EXPECT_EQ(depth.code, 0) << depth.err;
    EXPECT_EQ(std::count(depth.out.begin(), depth.out.end(), '\n'), 13);
    const auto rank = run("rank --data " + path("s.txt") + " --top-k 2 --bottom-k 1");
    EXPECT_EQ(rank.code, 0) << rank.err;
    EXPECT_EQ(std::count(rank.out.begin(), rank.out.end(), '\n'), 4);
    const auto center = run("center --data " + path("s.txt") + " --report --intuitive \"20 40 60 80\" --out " + path("c.json"));
    EXPECT_EQ(center.code, 0) << center.err;
    const auto j = nlohmann::json::parse(slurp(path("c.json")));
    EXPECT_EQ(j["method"], "combined");
    EXPECT_FALSE(j["trace"].empty());
    EXPECT_NE(center.err.find("intuitive"), std::string::npos);
}

TEST_F(Cli, ConfigFileIsOverriddenByFlags) {
    std::ofstream(path("run.cfg")) << "# settings\nkernel.c2 = 25\nseed = 9\n";
    ASSERT_EQ(run("simulate --n 5 --out " + path("s.jsonl")).code, 0);
    const auto r = run("--config " + path("run.cfg") + " smooth --data " + path("s.jsonl") + " --c2 50 --out " + path("f.csv"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = nlohmann::json::parse(slurp(path("f.csv") + ".manifest.json"));
    EXPECT_EQ(m["config"]["kernel.c2"], "50");
    EXPECT_EQ(m["seed"], 9);
    EXPECT_EQ(m["inputs"].size(), 2u);
    std::ofstream(path("broken.cfg")) << "kernel.c2 25\n";
    EXPECT_EQ(run("--config " + path("broken.cfg") + " check").code, 2);
}

TEST_F(Cli, ClassifyEmitsReportAndTable) {
    std::ofstream data(path("labeled.jsonl"));
    data << "{\"T\": 10}\n";
    for (int i = 0; i < 8; ++i) {
        data << "{\"id\":\"a" << i << "\",\"label\":\"pre\",\"events\":[" << 1 + 0.1 * i << ",6.5]}\n";
        data << "{\"id\":\"b" << i << "\",\"label\":\"post\",\"events\":[" << 3 + 0.1 * i << ",9.0,9.5]}\n";
    }
    data.close();
    const auto r = run("classify --data " + path("labeled.jsonl") + " --folds 4 --method h_depth --segment 0:5:c2=100,5:10:c2=50 --out " +
                       path("eval.json"));
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(path("eval.json")));
    ASSERT_EQ(j.size(), 2u);
    EXPECT_EQ(j[1]["accuracy"], 1.0);
    EXPECT_NE(r.out.find("accuracy"), std::string::npos);
}

TEST_F(Cli, ExperimentIsDeterministicAcrossThreadCounts) {
    const auto a = run("--threads 1 experiment hpp --n 20 --seed 7 --out-dir " + path("one"));
    const auto b = run("--threads 3 experiment hpp --n 20 --seed 7 --out-dir " + path("three"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    const auto manifest = nlohmann::json::parse(slurp(path("one") + "/manifest.json"));
    std::size_t compared = 0;
    for (const auto& o : manifest["outputs"]) {
        const std::string name = o["path"];
        EXPECT_TRUE(fs::exists(path("one") + "/" + name));
        if (name == "timing.json") continue;
        EXPECT_EQ(slurp(path("one") + "/" + name), slurp(path("three") + "/" + name)) << name;
        ++compared;
    }
    EXPECT_GE(compared, 7u);
}

TEST_F(Cli, OutputDirectoryFromEnvironment) {
    const auto r = run("experiment ipp --n 10 --seed 1 --n-max 500", "PPDEPTH_OUTPUT_DIR=" + dir.string());
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "experiment-ipp" / "manifest.json"));
    EXPECT_TRUE(fs::exists(dir / "experiment-ipp" / "ranking_modified_h_depth.csv"));
}
