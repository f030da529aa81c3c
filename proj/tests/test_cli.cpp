#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string output;
};

Result run_cli(const std::string& args) {
    const std::string cmd = std::string(LOCINF_CLI_PATH) + " " + args + " 2>&1";
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) r.output += buf;
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("locinf_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write(const std::string& name, const std::string& text) {
        const fs::path p = dir_ / name;
        std::ofstream(p) << text;
        return p;
    }

    fs::path dir_;
};

const std::string kSubcritical = "kind = sbm\nn = 1000\nalpha = 0.5 0.5\nK = 1.2 0.4 0.4 0.8\n";

} // namespace

TEST_F(CliTest, MissingConfigExitsTwoAndNamesPath) {
    const auto r = run_cli("run --config " + (dir_ / "absent.ini").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find((dir_ / "absent.ini").string()), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run_cli("").code, 2);
    EXPECT_EQ(run_cli("bogus").code, 2);
    EXPECT_EQ(run_cli("run").code, 2);
    EXPECT_EQ(run_cli("--help").code, 0);
}

TEST_F(CliTest, ConfigErrorNamesField) {
    const auto cfg = write("bad.ini", kSubcritical + "[policy]\nalpha = 2\n");
    const auto r = run_cli("run --config " + cfg.string() + " --out " + (dir_ / "o").string());
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("policy.alpha"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "o"));
}

TEST_F(CliTest, RunWritesOneTracePerReplicateAndSummary) {
    const auto cfg = write("ok.ini", kSubcritical + "[policy]\nT = 100\nalpha = 0.4\n[run]\nreplicates = 3\n");
    const auto out = dir_ / "out";
    const auto r = run_cli("run --config " + cfg.string() + " --out " + out.string() + " --quiet");
    ASSERT_EQ(r.code, 0) << r.output;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        (void)e;
        ++files;
    }
    EXPECT_EQ(files, 4u);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(fs::exists(out / ("trace_" + std::to_string(i) + ".csv")));
    EXPECT_TRUE(fs::exists(out / "summary.json"));
    const std::string csv = slurp(out / "trace_0.csv");
    EXPECT_EQ(csv.rfind("# schema=1\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 102);
}

TEST_F(CliTest, RunIsByteReproducible) {
    const auto cfg = write("ok.ini", kSubcritical + "[policy]\nT = 500\nalpha = 0.2\n[run]\nreplicates = 2\n");
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 17 --quiet --out " + a.string()).code, 0);
    ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 17 --quiet --threads 2 --out " + b.string()).code,
              0);
    for (const char* f : {"trace_0.csv", "trace_1.csv", "summary.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    const auto c = dir_ / "c";
    ASSERT_EQ(run_cli("run --config " + cfg.string() + " --seed 18 --quiet --out " + c.string()).code, 0);
    EXPECT_NE(slurp(a / "trace_0.csv"), slurp(c / "trace_0.csv"));
}

TEST_F(CliTest, RunPrintsCheckpointTable) {
    const auto cfg = write("ok.ini", kSubcritical + "[policy]\nT = 200\n");
    const auto r = run_cli("run --config " + cfg.string() + " --out " + (dir_ / "o").string());
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.output.find("mean_regret"), std::string::npos);
    EXPECT_NE(r.output.find("       200 "), std::string::npos);
}

TEST_F(CliTest, BranchingOutputs) {
    const auto sub = run_cli("branching --config " + write("a.ini", kSubcritical).string());
    ASSERT_EQ(sub.code, 0);
    EXPECT_NE(sub.output.find("x = (4.000000, 3.000000)"), std::string::npos);
    EXPECT_NE(sub.output.find("Subcritical"), std::string::npos);

    const auto sup = run_cli("branching --config " + write("b.ini", "kind = sbm\nn = 100\nalpha = 1\nK = 2\n").string());
    ASSERT_EQ(sup.code, 0);
    EXPECT_NE(sup.output.find("rho = (0.796812)"), std::string::npos);

    const auto crit =
        run_cli("branching --config " + write("c.ini", "kind = chung_lu\nn = 4\nw = 1 1 1 1\n").string());
    ASSERT_EQ(crit.code, 0);
    EXPECT_NE(crit.output.find("Critical"), std::string::npos);
    EXPECT_EQ(crit.output.find("\nx = "), std::string::npos);
    EXPECT_EQ(crit.output.find("\nrho = "), std::string::npos);
}

TEST_F(CliTest, BranchingWritesJsonOnlyToOut) {
    const auto cfg = write("a.ini", kSubcritical);
    ASSERT_EQ(run_cli("branching --quiet --config " + cfg.string() + " --out " + (dir_ / "j").string()).code, 0);
    EXPECT_NE(slurp(dir_ / "j" / "branching.json").find("\"x\""), std::string::npos);
}

TEST_F(CliTest, ValidateOracle) {
    const auto ok = run_cli("validate-oracle --n 4 --p 0.5");
    EXPECT_EQ(ok.code, 0) << ok.output;
    EXPECT_NE(ok.output.find("PASS"), std::string::npos);
    EXPECT_NE(ok.output.find("TV("), std::string::npos);
    EXPECT_EQ(run_cli("validate-oracle --n 7 --p 0.5").code, 2);
    EXPECT_EQ(run_cli("validate-oracle --n 4 --p 0.5 --samples 0").code, 2);
    const auto big = write("big.ini", kSubcritical);
    EXPECT_EQ(run_cli("validate-oracle --config " + big.string()).code, 2);
    const auto small = write("small.ini", "kind = sbm\nn = 4\nalpha = 0.5 0.5\nK = 2 1 1 3\n");
    EXPECT_EQ(run_cli("validate-oracle --samples 200000 --threshold 0.02 --config " + small.string()).code, 0);
}

TEST_F(CliTest, GroundTruthAndValidateProps) {
    const auto cfg = write("a.ini", kSubcritical + "[validation]\nmc_samples = 2000\n");
    const auto gt = run_cli("ground-truth --config " + cfg.string());
    ASSERT_EQ(gt.code, 0);
    EXPECT_NE(gt.output.find("\"c_star\": 4"), std::string::npos);
    const auto out = dir_ / "v";
    const auto vp = run_cli("validate-props --quiet --config " + cfg.string() + " --out " + out.string());
    ASSERT_EQ(vp.code, 0) << vp.output;
    EXPECT_NE(slurp(out / "validation.json").find("argmax_agreement"), std::string::npos);

    const auto viol = write("v.ini", "kind = sbm\nn = 90\nalpha = 0.5 0.5\nK = 3 2 2 1\n");
    EXPECT_EQ(run_cli("validate-props --config " + viol.string()).code, 1);
}

TEST_F(CliTest, Sweep) {
    const auto cfg = write("s.ini", kSubcritical +
                                        "[policy]\nT = 100\n[run]\nreplicates = 2\n[sweep]\nparameter = alpha\n"
                                        "values = 0.1 0.3\n");
    const auto out = dir_ / "s";
    ASSERT_EQ(run_cli("sweep --quiet --config " + cfg.string() + " --out " + out.string()).code, 0);
    const std::string csv = slurp(out / "sweep.csv");
    EXPECT_EQ(csv.rfind("# schema=1\n", 0), 0u);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2 + 2 * 3);
    const auto nosweep = write("n.ini", kSubcritical);
    EXPECT_EQ(run_cli("sweep --config " + nosweep.string() + " --out " + out.string()).code, 2);
}
