#include <sstream>

#include <gtest/gtest.h>

#include "locinf/config.hpp"
#include "locinf/io.hpp"
#include "models.hpp"

using namespace locinf;
using namespace testing_models;

namespace {

config::Document doc(const std::string& text) {
    std::istringstream in(text);
    return config::Document::parse(in, "test.ini");
}

std::string error_of(const std::string& text) {
    try {
        const auto d = doc(text);
        config::build_model(d);
        config::parse_experiment(d);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST(Config, ParsesSbmAndExperiment) {
    const auto d = doc(R"(# comment
kind = sbm
n = 1000
alpha = 0.5, 0.5
K = 1.2 0.4 0.4 0.8

[policy]
name = ducb_double
T = 500
alpha = 0.2
beta = 3

[ground_truth]
method = monte_carlo
mc_samples = 77

[run]
seed = 9
replicates = 3
output_dir = results
threads = 2

[validation]
mc_samples = 1234
)");
    const auto m = config::build_model(d);
    EXPECT_EQ(m.kind(), ModelKind::Sbm);
    EXPECT_NEAR(m.lambda_max(), 0.72360679774997897, 1e-12);
    const auto cfg = config::parse_experiment(d);
    EXPECT_EQ(cfg.policy.kind, PolicyKind::DUcbDouble);
    EXPECT_EQ(cfg.policy.horizon, 500u);
    EXPECT_EQ(cfg.policy.alpha, 0.2);
    EXPECT_EQ(cfg.policy.beta, 3.0);
    EXPECT_EQ(cfg.ground_truth.method, GroundTruthMethod::MonteCarlo);
    EXPECT_EQ(cfg.ground_truth.mc_samples, 77u);
    EXPECT_EQ(cfg.run.seed, 9u);
    EXPECT_EQ(cfg.run.replicate_seeds, config::replicate_seeds(9, 3));
    EXPECT_EQ(cfg.run.output_dir, "results");
    EXPECT_EQ(cfg.run.threads, 2u);
    EXPECT_EQ(cfg.validation_samples, 1234u);
    EXPECT_FALSE(cfg.sweep.has_value());
}

TEST(Config, ChungLuGenerators) {
    const auto u = config::build_model(doc("kind = chung_lu\nn = 4\nw_generator = uniform\nw_value = 1\n"));
    EXPECT_EQ(u.regime(), Regime::Critical);
    const auto e = config::build_model(doc("kind = chung_lu\nn = 3\nw = 0.5 0.7 0.9\n"));
    EXPECT_EQ(e.chung_lu().weights, (std::vector<double>{0.5, 0.7, 0.9}));
    const auto p = config::build_model(
        doc("kind = chung_lu\nn = 1000\nw_generator = powerlaw\nw_exponent = 3\nw_min = 0.5\nw_max = 5\n"));
    const auto& w = p.chung_lu().weights;
    EXPECT_EQ(w.front(), 5.0);
    EXPECT_NEAR(w.back(), 0.5 * std::pow(999.5 / 1000.0, -0.5), 1e-15);
    EXPECT_TRUE(std::is_sorted(w.rbegin(), w.rend()));
}

TEST(Config, ExplicitSeedsList) {
    const auto cfg = config::parse_experiment(doc("[run]\nseeds = 5 6 7\n"));
    EXPECT_EQ(cfg.run.replicate_seeds, (std::vector<std::uint64_t>{5, 6, 7}));
}

TEST(Config, Sweep) {
    const auto cfg = config::parse_experiment(doc("[sweep]\nparameter = beta\nvalues = 2 3 4\n"));
    ASSERT_TRUE(cfg.sweep.has_value());
    EXPECT_EQ(cfg.sweep->parameter, "beta");
    EXPECT_EQ(cfg.sweep->values, (std::vector<double>{2, 3, 4}));
}

TEST(Config, ErrorsNameTheField) {
    const std::string base = "kind = sbm\nn = 100\nalpha = 0.5 0.5\nK = 1 1 1 1\n";
    EXPECT_NE(error_of("kind = sbm\nn = 100\nalpha = 0.5 0.5\nK = 1 1 1\n").find("model.K"), std::string::npos);
    EXPECT_NE(error_of("kind = sbm\nn = x\n").find("test.ini:2: field model.n"), std::string::npos);
    EXPECT_NE(error_of("kind = tree\nn = 5\n").find("model.kind"), std::string::npos);
    EXPECT_NE(error_of("n = 5\n").find("model.kind"), std::string::npos);
    EXPECT_NE(error_of(base + "[policy]\nalpha = 1.5\n").find("policy.alpha"), std::string::npos);
    EXPECT_NE(error_of(base + "[policy]\nname = greedy\n").find("policy.name"), std::string::npos);
    EXPECT_NE(error_of(base + "[policy]\nbeta = 1\n").find("policy.beta"), std::string::npos);
    EXPECT_NE(error_of(base + "[policy]\nT = -4\n").find("policy.T"), std::string::npos);
    EXPECT_NE(error_of(base + "[ground_truth]\nmc_samples = 0\n").find("ground_truth.mc_samples"),
              std::string::npos);
    EXPECT_NE(error_of(base + "[run]\nreplicates = 0\n").find("run.replicates"), std::string::npos);
    EXPECT_NE(error_of(base + "[sweep]\nparameter = n\nvalues = 1\n").find("sweep.parameter"), std::string::npos);
    EXPECT_NE(error_of(base + "n = 7\n").find("duplicate field model.n"), std::string::npos);
    EXPECT_NE(error_of("[model\n").find("malformed"), std::string::npos);
    EXPECT_NE(error_of("just words\n").find("key = value"), std::string::npos);
    EXPECT_NE(error_of("kind = sbm\nn = 101\nalpha = 0.5 0.5\nK = 1 1 1 1\n").find("[model]"), std::string::npos);
}

TEST(Config, MissingFile) {
    try {
        config::Document::load("/nonexistent/cfg.ini");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/cfg.ini"), std::string::npos);
    }
}

TEST(Config, ReplicateSeedsDistinct) {
    const auto s = config::replicate_seeds(1, 100);
    std::set<std::uint64_t> u(s.begin(), s.end());
    EXPECT_EQ(u.size(), 100u);
    EXPECT_EQ(s, config::replicate_seeds(1, 100));
}

TEST(Io, FormatRealRoundTrips) {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 3174.5478527352, 1e-300, 123456789.125}) {
        EXPECT_EQ(std::strtod(io::format_real(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(io::format_real(0.1), "0.1");
    EXPECT_EQ(io::format_real(4.0), "4");
}

TEST(Io, TraceCsvSchema) {
    RegretTrace t;
    t.records = {{1, 0, 5, 2, 3}, {2, 0, 7, 0, 1}};
    t.cumulative_regret = {0.5, 1.0};
    std::ostringstream out;
    io::write_trace_csv(out, t);
    EXPECT_EQ(out.str(),
              "# schema=1\n"
              "round,epoch,vertex,observed_degree,component_size,cumulative_regret\n"
              "1,0,5,2,3,0.5\n"
              "2,0,7,0,1,1\n");
}

TEST(Io, Checkpoints) {
    EXPECT_EQ(io::checkpoints(100), (std::vector<std::size_t>{10, 50, 100}));
    EXPECT_EQ(io::checkpoints(5), (std::vector<std::size_t>{1, 2, 5}));
    EXPECT_EQ(io::checkpoints(1), (std::vector<std::size_t>{1}));
}

TEST(Io, SummaryJson) {
    RegretTrace a;
    RegretTrace b;
    a.seed = 1;
    b.seed = 2;
    for (int i = 1; i <= 10; ++i) {
        a.cumulative_regret.push_back(i);
        b.cumulative_regret.push_back(3.0 * i);
    }
    GroundTruth gt;
    const PolicyConfig p{PolicyKind::DUcbFixedHorizon, 10, 0.2, 2.0};
    const auto j = io::summary_json(p, gt, {a, b});
    EXPECT_EQ(j["policy"], "ducb_fixed_T");
    EXPECT_EQ(j["replicates"], 2);
    const auto& cp = j["checkpoints"];
    ASSERT_EQ(cp.size(), 3u);
    EXPECT_EQ(cp[0]["round"], 1);
    EXPECT_DOUBLE_EQ(cp[0]["mean_regret"].get<double>(), 2.0);
    EXPECT_DOUBLE_EQ(cp[2]["mean_regret"].get<double>(), 20.0);
    EXPECT_NEAR(cp[2]["stddev_regret"].get<double>(), std::sqrt(200.0), 1e-12);
}

TEST(Io, GroundTruthLevels) {
    Rng rng(1);
    const auto gt = compute_ground_truth(subcritical(100), 0.4, GroundTruthMethod::BranchingPrediction, 0, rng);
    const auto j = io::to_json(gt);
    ASSERT_EQ(j["levels"].size(), 2u);
    EXPECT_EQ(j["levels"][0]["count"], 50);
    EXPECT_EQ(j["levels"][1]["first_vertex"], 50);
    EXPECT_EQ(j["quantile_position"], 60);
    EXPECT_EQ(j["asymptotic"], true);
}
