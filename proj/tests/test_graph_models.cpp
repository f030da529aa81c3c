#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "locinf/enumeration.hpp"
#include "locinf/graph_models.hpp"
#include "models.hpp"

using namespace locinf;
using namespace testing_models;

TEST(EdgeProbability, SbmCrossCommunity) {
    const auto m = sbm(100, {0.5, 0.5}, {1.2, 0.4, 0.4, 0.8});
    EXPECT_DOUBLE_EQ(edge_probability(m, 3, 70), 0.004);
    EXPECT_DOUBLE_EQ(edge_probability(m, 3, 7), 0.012);
    EXPECT_DOUBLE_EQ(edge_probability(m, 60, 70), 0.008);
}

TEST(EdgeProbability, ChungLu) {
    EXPECT_DOUBLE_EQ(edge_probability(chung_lu(std::vector<double>(10, 1.0)), 2, 5), 0.1);
    std::vector<double> w(1000, 1.0);
    w[0] = 1.5;
    w[1] = 2.0;
    EXPECT_NEAR(edge_probability(chung_lu(w), 0, 1), 0.003, 1e-17);
}

TEST(EdgeProbability, RejectsBadPairs) {
    const auto m = subcritical(100);
    EXPECT_THROW(edge_probability(m, 4, 4), InvalidVertexPair);
    EXPECT_THROW(edge_probability(m, 4, 100), IndexError);
    EXPECT_THROW(edge_probability(m, 100, 4), IndexError);
}

TEST(EdgeProbability, Symmetric) {
    std::vector<double> w(50);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.2 + 0.05 * static_cast<double>(i % 17);
    const auto cl = chung_lu(w);
    const auto sb = sbm(60, {0.25, 0.5, 0.25}, {1, 2, 3, 2, 0.5, 1, 3, 1, 2});
    for (Vertex i = 0; i < 50; ++i) {
        for (Vertex j = i + 1; j < 50; ++j) {
            EXPECT_EQ(edge_probability(cl, i, j), edge_probability(cl, j, i));
            EXPECT_EQ(edge_probability(sb, i, j), edge_probability(sb, j, i));
        }
    }
}

TEST(MeanDegree, MatchesDirectSummation) {
    const auto m = subcritical(1000);
    EXPECT_NEAR(mean_degree(m, 0), 0.7988, 1e-14);
    EXPECT_NEAR(mean_degree(single(100, 2.0), 5), 1.98, 1e-14);
    std::vector<double> w(20, 0.7);
    EXPECT_NEAR(mean_degree(chung_lu(w), 3), 0.49 * 19.0 / 20.0, 1e-15);

    const auto s3 = sbm(40, {0.25, 0.5, 0.25}, {1, 2, 3, 2, 0.5, 1, 3, 1, 2});
    for (Vertex i = 0; i < 40; ++i) {
        double direct = 0.0;
        for (Vertex j = 0; j < 40; ++j) {
            if (j != i) direct += edge_probability(s3, i, j);
        }
        EXPECT_NEAR(mean_degree(s3, i), direct, 1e-12);
    }
    EXPECT_THROW(mean_degree(m, 1000), IndexError);
}

TEST(ClassifyRegime, Examples) {
    const auto m = subcritical();
    EXPECT_NEAR(m.lambda_max(), 0.72360679774997897, 1e-12);
    EXPECT_EQ(m.regime(), Regime::Subcritical);
    EXPECT_NEAR(m.reduced_kernel()(0, 1), 0.2, 1e-15);

    const auto s = single(10, 2.0);
    EXPECT_DOUBLE_EQ(s.lambda_max(), 2.0);
    EXPECT_EQ(s.regime(), Regime::Supercritical);

    const auto c = chung_lu({1, 1, 1, 1});
    EXPECT_DOUBLE_EQ(c.lambda_max(), 1.0);
    EXPECT_EQ(c.regime(), Regime::Critical);
}

TEST(ClassifyRegime, CriticalBand) {
    EXPECT_EQ(regime_of(1.0 + 5e-10), Regime::Critical);
    EXPECT_EQ(regime_of(1.0 - 5e-10), Regime::Critical);
    EXPECT_EQ(regime_of(1.0 + 2e-9), Regime::Supercritical);
    EXPECT_EQ(regime_of(1.0 - 2e-9), Regime::Subcritical);
}

TEST(ClassifyRegime, ChungLuSpectralIdentity) {
    std::vector<double> w(500);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.3 + std::fmod(0.37 * static_cast<double>(i), 2.5);
    const auto m = chung_lu(w);
    const double sq = std::inner_product(w.begin(), w.end(), w.begin(), 0.0);
    EXPECT_NEAR(m.lambda_max(), sq / 500.0, 1e-12 * sq / 500.0);
}

TEST(ClassifyRegime, ScalingMultipliesLambda) {
    const std::vector<double> k = {1, 2, 3, 2, 0.5, 1, 3, 1, 2};
    const auto base = sbm(40, {0.25, 0.5, 0.25}, k);
    for (double s : {1.5, 2.0, 3.7}) {
        std::vector<double> ks = k;
        for (double& v : ks) v *= s;
        EXPECT_NEAR(sbm(40, {0.25, 0.5, 0.25}, ks).lambda_max(), s * base.lambda_max(), 1e-9);
    }
}

TEST(ClassifyRegime, PerronVectorIsPositiveEigenvector) {
    const auto m = sbm(40, {0.25, 0.5, 0.25}, {1, 2, 3, 2, 0.5, 1, 3, 1, 2});
    const auto& a = m.perron_vector();
    Eigen::VectorXd v(3);
    for (int i = 0; i < 3; ++i) {
        EXPECT_GT(a[static_cast<std::size_t>(i)], 0.0);
        v(i) = a[static_cast<std::size_t>(i)];
    }
    EXPECT_NEAR(v.maxCoeff(), 1.0, 1e-15);
    EXPECT_LT((m.reduced_kernel() * v - m.lambda_max() * v).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ClassifyRegime, ValidatesSbm) {
    EXPECT_THROW(sbm(100, {0.5, 0.4}, {1, 1, 1, 1}), InvalidModel);
    EXPECT_THROW(sbm(101, {0.5, 0.5}, {1, 1, 1, 1}), InvalidModel);
    EXPECT_THROW(sbm(100, {0.5, 0.5}, {1, 0.5, 0.4, 1}), InvalidModel);
    EXPECT_THROW(sbm(100, {0.5, 0.5}, {1, 0, 0, 1}), InvalidModel);
    EXPECT_THROW(sbm(10, {1.0}, {11}), InvalidModel);
    EXPECT_NO_THROW(sbm(10, {1.0}, {10}));
}

TEST(ClassifyRegime, ValidatesChungLu) {
    EXPECT_THROW(chung_lu({1, 0, 1}), InvalidModel);
    EXPECT_THROW(chung_lu({1, -1, 1}), InvalidModel);
    EXPECT_THROW(chung_lu({2, 2, 0.1}), InvalidModel);
}

TEST(ClassifyRegime, CommunityAssignmentIsContiguous) {
    const auto m = sbm(100, {0.2, 0.3, 0.5}, {1, 1, 1, 1, 1, 1, 1, 1, 1});
    EXPECT_EQ(m.community_of(0), 0u);
    EXPECT_EQ(m.community_of(19), 0u);
    EXPECT_EQ(m.community_of(20), 1u);
    EXPECT_EQ(m.community_of(49), 1u);
    EXPECT_EQ(m.community_of(50), 2u);
    EXPECT_EQ(m.community_of(99), 2u);
    EXPECT_THROW(m.community_of(100), IndexError);
}

TEST(SampleFullGraph, CertainEdge) {
    const auto m = single(2, 2.0);
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(sample_full_graph(m, rng).num_edges(), 1u);
    }
}

TEST(SampleFullGraph, EdgeFrequency) {
    const auto m = single(2, 0.6);
    Rng rng(2);
    std::size_t hits = 0;
    for (int i = 0; i < 100000; ++i) hits += sample_full_graph(m, rng).num_edges();
    EXPECT_NEAR(static_cast<double>(hits) / 1e5, 0.3, 0.005);
}

TEST(SampleFullGraph, StructuralInvariants) {
    Rng rng(3);
    std::vector<double> w(300);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.5 + std::fmod(0.61 * static_cast<double>(i), 3.0);
    for (const auto& m : {supercritical(400), chung_lu(w)}) {
        const SampledGraph g = sample_full_graph(m, rng);
        for (Vertex u = 0; u < g.n; ++u) {
            const auto& nb = g.adjacency[u];
            EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
            EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
            for (Vertex v : nb) {
                EXPECT_NE(u, v);
                EXPECT_TRUE(std::binary_search(g.adjacency[v].begin(), g.adjacency[v].end(), u));
            }
        }
    }
}

TEST(SampleFullGraph, DegreeConsistency) {
    std::vector<double> w(200);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 0.4 + std::fmod(0.73 * static_cast<double>(i), 4.0);
    const auto cl = chung_lu(w);
    const auto sb = sbm(200, {0.25, 0.5, 0.25}, {1, 2, 3, 2, 0.5, 1, 3, 1, 2});
    Rng rng(4);
    const std::size_t N = 4000;
    for (const GraphModel* m : {&cl, &sb}) {
        std::vector<double> sum(200, 0.0);
        for (std::size_t s = 0; s < N; ++s) {
            const auto g = sample_full_graph(*m, rng);
            for (Vertex v = 0; v < 200; ++v) sum[v] += static_cast<double>(g.adjacency[v].size());
        }
        for (Vertex v : {0u, 1u, 57u, 120u, 199u}) {
            const double mu = mean_degree(*m, v);
            EXPECT_NEAR(sum[v] / N, mu, 4.0 * std::sqrt(mu / N)) << "vertex " << v;
        }
    }
}

// Exact graph law of the sampler equals the per-pair Bernoulli product.
TEST(SampleFullGraph, MatchesEnumeration) {
    const auto sb = sbm(4, {0.5, 0.5}, {2.8, 1.0, 1.0, 1.6});
    const auto cl = chung_lu({1.8, 1.2, 0.9, 0.5});
    Rng rng(5);
    for (const GraphModel* m : {&sb, &cl}) {
        const auto exact = enumeration::graph_law(*m);
        EXPECT_NEAR(std::accumulate(exact.begin(), exact.end(), 0.0), 1.0, 1e-12);
        std::vector<double> freq(exact.size(), 0.0);
        const std::size_t N = 400000;
        for (std::size_t s = 0; s < N; ++s) freq[enumeration::graph_mask(sample_full_graph(*m, rng))] += 1.0 / N;
        EXPECT_LT(enumeration::total_variation(freq, exact), 0.01);
    }
}

TEST(SampleFullGraph, CapacityGuard) {
    const auto m = single(kFullSampleLimit + 1, 1.5);
    Rng rng(6);
    EXPECT_THROW(sample_full_graph(m, rng), CapacityError);
}

TEST(SampledGraph, FromEdgesValidates) {
    EXPECT_THROW(SampledGraph::from_edges(3, {{0, 0}}), InvalidVertexPair);
    EXPECT_THROW(SampledGraph::from_edges(3, {{0, 1}, {1, 0}}), InvalidVertexPair);
    EXPECT_THROW(SampledGraph::from_edges(3, {{0, 3}}), IndexError);
    const auto g = SampledGraph::from_edges(3, {{2, 0}, {0, 1}});
    EXPECT_EQ(g.num_edges(), 2u);
    EXPECT_EQ(g.edges(), (std::vector<std::pair<Vertex, Vertex>>{{0, 1}, {0, 2}}));
}
