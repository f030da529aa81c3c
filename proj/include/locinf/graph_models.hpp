#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "locinf/errors.hpp"
#include "locinf/linalg.hpp"
#include "locinf/rng.hpp"

namespace locinf {

using Vertex = std::size_t;

enum class ModelKind { Sbm, ChungLu };
enum class Regime { Subcritical, Critical, Supercritical };

/// Half-width of the band around lambda_max = 1 classified as Critical.
inline constexpr double kCriticalBand = 1e-9;
/// Largest vertex count sample_full_graph will materialize.
inline constexpr std::size_t kFullSampleLimit = 100000;

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::Critical: return "Critical";
    case Regime::Supercritical: return "Supercritical";
    }
    return "?";
}

inline const char* to_string(ModelKind k) {
    return k == ModelKind::Sbm ? "sbm" : "chung_lu";
}

inline Regime regime_of(double lambda_max) {
    if (lambda_max < 1.0 - kCriticalBand) {
        return Regime::Subcritical;
    }
    if (lambda_max > 1.0 + kCriticalBand) {
        return Regime::Supercritical;
    }
    return Regime::Critical;
}

/// Stochastic block model G(n, alpha, K). Community m holds alpha[m] * n
/// consecutive vertices, in community order.
struct SbmParams {
    std::size_t n = 0;
    std::vector<double> alpha;
    Eigen::MatrixXd kernel;
};

/// Rank-1 (Chung–Lu) model G(n, w) with p_ij = w_i w_j / n.
struct ChungLuParams {
    std::size_t n = 0;
    std::vector<double> weights;
};

class GraphModel;
GraphModel classify_regime(SbmParams params);
GraphModel classify_regime(ChungLuParams params);

/// Immutable IRG distribution plus its spectral metadata.
///
/// For an SBM the branching "types" are the S communities and the reduced
/// kernel is M = K diag(alpha). For Chung–Lu every vertex is its own type and
/// the kernel is never materialized (rank one).
class GraphModel {
public:
    ModelKind kind() const { return kind_; }
    std::size_t n() const { return n_; }
    double lambda_max() const { return lambda_max_; }
    Regime regime() const { return regime_; }

    const SbmParams& sbm() const { return std::get<SbmParams>(params_); }
    const ChungLuParams& chung_lu() const { return std::get<ChungLuParams>(params_); }

    /// S for an SBM, n for Chung–Lu.
    std::size_t num_types() const {
        return kind_ == ModelKind::Sbm ? community_sizes_.size() : n_;
    }

    /// M = K diag(alpha); empty for Chung–Lu.
    const Eigen::MatrixXd& reduced_kernel() const { return reduced_kernel_; }

    /// Componentwise-positive right Perron vector of the kernel, max-normalized to 1.
    /// SBM: eigenvector of M. Chung–Lu: w / max(w).
    const std::vector<double>& perron_vector() const { return perron_vector_; }

    const std::vector<std::size_t>& community_sizes() const { return community_sizes_; }
    const std::vector<std::size_t>& community_offsets() const { return community_offsets_; }

    std::size_t community_of(Vertex v) const {
        check_vertex(v);
        auto it = std::upper_bound(community_offsets_.begin(), community_offsets_.end(), v);
        return static_cast<std::size_t>(it - community_offsets_.begin()) - 1;
    }

    /// SBM community of v, or v itself for Chung–Lu.
    std::size_t type_of(Vertex v) const {
        if (kind_ == ModelKind::Sbm) {
            return community_of(v);
        }
        check_vertex(v);
        return v;
    }

    /// Chung–Lu vertices sorted by decreasing weight (ties by id), and the inverse map.
    const std::vector<Vertex>& weight_order() const { return weight_order_; }
    const std::vector<std::size_t>& weight_rank() const { return weight_rank_; }
    double weight_sum() const { return weight_sum_; }

    void check_vertex(Vertex v) const {
        if (v >= n_) {
            throw IndexError("vertex " + std::to_string(v) + " out of range [0, " +
                             std::to_string(n_) + ")");
        }
    }

private:
    GraphModel() = default;
    friend GraphModel classify_regime(SbmParams params);
    friend GraphModel classify_regime(ChungLuParams params);

    ModelKind kind_ = ModelKind::Sbm;
    std::size_t n_ = 0;
    std::variant<SbmParams, ChungLuParams> params_;
    Eigen::MatrixXd reduced_kernel_;
    std::vector<double> perron_vector_;
    double lambda_max_ = 0.0;
    Regime regime_ = Regime::Subcritical;

    std::vector<std::size_t> community_sizes_;
    std::vector<std::size_t> community_offsets_;

    std::vector<Vertex> weight_order_;
    std::vector<std::size_t> weight_rank_;
    double weight_sum_ = 0.0;
};

inline GraphModel classify_regime(SbmParams params) {
    const std::size_t S = params.alpha.size();
    if (params.n == 0) {
        throw InvalidModel("sbm: n must be positive");
    }
    if (S == 0) {
        throw InvalidModel("sbm: alpha must be non-empty");
    }
    if (params.kernel.rows() != static_cast<Eigen::Index>(S) ||
        params.kernel.cols() != static_cast<Eigen::Index>(S)) {
        throw InvalidModel("sbm: K must be " + std::to_string(S) + "x" + std::to_string(S));
    }
    double alpha_sum = 0.0;
    for (double a : params.alpha) {
        if (!(a > 0.0)) {
            throw InvalidModel("sbm: every alpha entry must be > 0");
        }
        alpha_sum += a;
    }
    if (std::abs(alpha_sum - 1.0) > 1e-12) {
        throw InvalidModel("sbm: alpha must sum to 1");
    }

    GraphModel model;
    model.kind_ = ModelKind::Sbm;
    model.n_ = params.n;
    std::size_t offset = 0;
    for (std::size_t m = 0; m < S; ++m) {
        const double size = params.alpha[m] * static_cast<double>(params.n);
        const double rounded = std::round(size);
        if (std::abs(size - rounded) > 1e-6 * std::max(1.0, size) || rounded < 1.0) {
            throw InvalidModel("sbm: alpha[" + std::to_string(m) + "] * n is not a positive integer");
        }
        model.community_offsets_.push_back(offset);
        model.community_sizes_.push_back(static_cast<std::size_t>(rounded));
        offset += static_cast<std::size_t>(rounded);
    }
    if (offset != params.n) {
        throw InvalidModel("sbm: community sizes do not add up to n");
    }

    const double n = static_cast<double>(params.n);
    for (Eigen::Index l = 0; l < params.kernel.rows(); ++l) {
        for (Eigen::Index m = 0; m < params.kernel.cols(); ++m) {
            const double k = params.kernel(l, m);
            if (!(k > 0.0) || !std::isfinite(k)) {
                throw InvalidModel("sbm: K entries must be finite and > 0");
            }
            if (std::abs(k - params.kernel(m, l)) > 1e-12) {
                throw InvalidModel("sbm: K must be symmetric");
            }
            if (k / n > 1.0) {
                throw InvalidModel("sbm: K/n exceeds 1 (invalid edge probability)");
            }
        }
    }

    Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(params.alpha.data(),
                                                              static_cast<Eigen::Index>(S));
    model.reduced_kernel_ = params.kernel * alpha.asDiagonal();

    // M = K D is similar to the symmetric D^{1/2} K D^{1/2}; if v is the Perron
    // vector of the latter, D^{-1/2} v is the Perron vector of M.
    const Eigen::VectorXd root = alpha.cwiseSqrt();
    const Eigen::MatrixXd sym = root.asDiagonal() * params.kernel * root.asDiagonal();
    const DominantEigenpair eig = dominant_eigenpair(sym);
    Eigen::VectorXd a = eig.vector.cwiseQuotient(root);
    a /= a.maxCoeff();
    model.perron_vector_.assign(a.data(), a.data() + a.size());
    model.lambda_max_ = eig.value;
    if (!(model.lambda_max_ > 0.0)) {
        throw NumericalError("sbm: non-positive lambda_max");
    }
    model.regime_ = regime_of(model.lambda_max_);
    model.params_ = std::move(params);
    return model;
}

inline GraphModel classify_regime(ChungLuParams params) {
    if (params.n == 0 || params.weights.size() != params.n) {
        throw InvalidModel("chung_lu: need exactly n > 0 weights");
    }
    GraphModel model;
    model.kind_ = ModelKind::ChungLu;
    model.n_ = params.n;
    const double n = static_cast<double>(params.n);

    double sum = 0.0;
    double sum_sq = 0.0;
    for (double w : params.weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw InvalidModel("chung_lu: weights must be finite and > 0");
        }
        sum += w;
        sum_sq += w * w;
    }

    model.weight_order_.resize(params.n);
    std::iota(model.weight_order_.begin(), model.weight_order_.end(), Vertex{0});
    std::stable_sort(model.weight_order_.begin(), model.weight_order_.end(),
                     [&](Vertex a, Vertex b) { return params.weights[a] > params.weights[b]; });
    model.weight_rank_.resize(params.n);
    for (std::size_t r = 0; r < params.n; ++r) {
        model.weight_rank_[model.weight_order_[r]] = r;
    }
    if (params.n >= 2) {
        const double top = params.weights[model.weight_order_[0]] *
                           params.weights[model.weight_order_[1]] / n;
        if (top > 1.0) {
            throw InvalidModel("chung_lu: w_i w_j / n exceeds 1 (invalid edge probability)");
        }
    }

    const double w_max = params.weights[model.weight_order_[0]];
    model.perron_vector_.reserve(params.n);
    for (double w : params.weights) {
        model.perron_vector_.push_back(w / w_max);
    }
    model.weight_sum_ = sum;
    model.lambda_max_ = sum_sq / n;
    model.regime_ = regime_of(model.lambda_max_);
    model.params_ = std::move(params);
    return model;
}

/// p_ij for i != j.
inline double edge_probability(const GraphModel& model, Vertex i, Vertex j) {
    model.check_vertex(i);
    model.check_vertex(j);
    if (i == j) {
        throw InvalidVertexPair("edge_probability: i == j (self-loops are excluded)");
    }
    const double n = static_cast<double>(model.n());
    if (model.kind() == ModelKind::Sbm) {
        const auto l = static_cast<Eigen::Index>(model.community_of(i));
        const auto m = static_cast<Eigen::Index>(model.community_of(j));
        return model.sbm().kernel(l, m) / n;
    }
    const auto& w = model.chung_lu().weights;
    return w[i] * w[j] / n;
}

/// Expected degree mu_i = sum over j != i of p_ij.
inline double mean_degree(const GraphModel& model, Vertex i) {
    model.check_vertex(i);
    const double n = static_cast<double>(model.n());
    if (model.kind() == ModelKind::Sbm) {
        const auto& p = model.sbm();
        const auto l = static_cast<Eigen::Index>(model.community_of(i));
        double b = 0.0;
        for (Eigen::Index m = 0; m < p.kernel.cols(); ++m) {
            b += p.alpha[static_cast<std::size_t>(m)] * p.kernel(l, m);
        }
        return b - p.kernel(l, l) / n;
    }
    const auto& w = model.chung_lu().weights;
    return w[i] * (model.weight_sum() - w[i]) / n;
}

/// One realized undirected simple graph.
struct SampledGraph {
    std::size_t n = 0;
    std::vector<std::vector<Vertex>> adjacency;  // sorted, symmetric, no self-loops

    std::size_t num_edges() const {
        std::size_t total = 0;
        for (const auto& nbrs : adjacency) {
            total += nbrs.size();
        }
        return total / 2;
    }

    /// Builds a graph from an edge list; rejects self-loops, out-of-range ids and duplicates.
    static SampledGraph from_edges(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
        SampledGraph g;
        g.n = n;
        g.adjacency.resize(n);
        for (const auto& [u, v] : edges) {
            if (u >= n || v >= n) {
                throw IndexError("edge endpoint out of range");
            }
            if (u == v) {
                throw InvalidVertexPair("self-loop " + std::to_string(u));
            }
            g.adjacency[u].push_back(v);
            g.adjacency[v].push_back(u);
        }
        for (auto& nbrs : g.adjacency) {
            std::sort(nbrs.begin(), nbrs.end());
            if (std::adjacent_find(nbrs.begin(), nbrs.end()) != nbrs.end()) {
                throw InvalidVertexPair("duplicate edge");
            }
        }
        return g;
    }

    std::vector<std::pair<Vertex, Vertex>> edges() const {
        std::vector<std::pair<Vertex, Vertex>> out;
        for (Vertex u = 0; u < n; ++u) {
            for (Vertex v : adjacency[u]) {
                if (u < v) {
                    out.emplace_back(u, v);
                }
            }
        }
        return out;
    }
};

namespace detail {

// Geometric skip-sampling over the linearized pairs of one homogeneous SBM block.
template <class URBG, class Emit>
void sample_block(URBG& rng, double p, std::size_t off_a, std::size_t size_a, std::size_t off_b,
                  std::size_t size_b, bool diagonal, Emit&& emit) {
    const auto total = static_cast<std::int64_t>(
        diagonal ? size_a * (size_a - 1) / 2 : size_a * size_b);
    std::int64_t idx = -1;
    while (true) {
        idx += 1 + geometric_skip(rng, p, total);
        if (idx >= total) {
            return;
        }
        if (diagonal) {
            // Row r holds pairs (r, c) with c < r; row r starts at r(r-1)/2.
            auto r = static_cast<std::int64_t>(
                std::floor((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(idx))) / 2.0));
            while (r * (r - 1) / 2 > idx) --r;
            while ((r + 1) * r / 2 <= idx) ++r;
            const std::int64_t c = idx - r * (r - 1) / 2;
            emit(off_a + static_cast<std::size_t>(r), off_a + static_cast<std::size_t>(c));
        } else {
            const auto sb = static_cast<std::int64_t>(size_b);
            emit(off_a + static_cast<std::size_t>(idx / sb), off_b + static_cast<std::size_t>(idx % sb));
        }
    }
}

} // namespace detail

/// Draws one graph; every pair {i, j} is present independently with p_ij.
///
/// SBM: geometric skips inside each community-pair block. Chung–Lu: skips over
/// the weight-sorted vertex list with a thinning step (the skip uses the
/// current upper bound p, accepted candidates are kept with prob q/p).
/// Expected cost O(n + #edges).
template <class URBG>
SampledGraph sample_full_graph(const GraphModel& model, URBG& rng) {
    const std::size_t n = model.n();
    if (n > kFullSampleLimit) {
        throw CapacityError("sample_full_graph: n=" + std::to_string(n) + " exceeds limit " +
                            std::to_string(kFullSampleLimit));
    }
    SampledGraph g;
    g.n = n;
    g.adjacency.resize(n);
    auto emit = [&](Vertex u, Vertex v) {
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    };

    if (model.kind() == ModelKind::Sbm) {
        const auto& p = model.sbm();
        const auto& sizes = model.community_sizes();
        const auto& offs = model.community_offsets();
        const double dn = static_cast<double>(n);
        for (std::size_t l = 0; l < sizes.size(); ++l) {
            for (std::size_t m = l; m < sizes.size(); ++m) {
                const double prob = p.kernel(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) / dn;
                detail::sample_block(rng, prob, offs[l], sizes[l], offs[m], sizes[m], l == m, emit);
            }
        }
    } else {
        const auto& w = model.chung_lu().weights;
        const auto& order = model.weight_order();
        const double dn = static_cast<double>(n);
        for (std::size_t a = 0; a + 1 < n; ++a) {
            const Vertex u = order[a];
            std::size_t b = a + 1;
            double p = std::min(1.0, w[u] * w[order[b]] / dn);
            while (b < n && p > 0.0) {
                const auto skip = geometric_skip(rng, p, static_cast<std::int64_t>(n));
                b += static_cast<std::size_t>(skip);
                if (b >= n) {
                    break;
                }
                const double q = std::min(1.0, w[u] * w[order[b]] / dn);
                if (uniform01(rng) < q / p) {
                    emit(u, order[b]);
                }
                p = q;
                ++b;
            }
        }
    }
    for (auto& nbrs : g.adjacency) {
        std::sort(nbrs.begin(), nbrs.end());
    }
    return g;
}

} // namespace locinf
