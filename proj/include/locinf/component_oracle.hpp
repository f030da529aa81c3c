#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "locinf/errors.hpp"
#include "locinf/graph_models.hpp"
#include "locinf/rng.hpp"

namespace locinf {

/// Degree and component size of one vertex in one realized graph.
/// component_size includes the vertex itself, so it is 1 exactly when degree is 0.
struct ExplorationOutcome {
    Vertex vertex = 0;
    std::size_t degree = 0;
    std::size_t component_size = 1;

    friend bool operator==(const ExplorationOutcome&, const ExplorationOutcome&) = default;
};

inline std::size_t degree(const SampledGraph& graph, Vertex v) {
    if (v >= graph.n) {
        throw IndexError("degree: vertex out of range");
    }
    return graph.adjacency[v].size();
}

/// Vertices reachable from v (BFS), sorted ascending.
inline std::vector<Vertex> connected_component(const SampledGraph& graph, Vertex v) {
    if (v >= graph.n) {
        throw IndexError("connected_component: vertex out of range");
    }
    std::vector<bool> seen(graph.n, false);
    std::vector<Vertex> component{v};
    seen[v] = true;
    for (std::size_t head = 0; head < component.size(); ++head) {
        for (Vertex u : graph.adjacency[component[head]]) {
            if (!seen[u]) {
                seen[u] = true;
                component.push_back(u);
            }
        }
    }
    std::sort(component.begin(), component.end());
    return component;
}

struct ComponentSizes {
    std::vector<std::size_t> sizes;  // descending
    std::size_t largest = 0;
    std::size_t second_largest = 0;  // 0 when there is a single component
};

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n), size_(n, 1) {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x) {
        std::size_t root = x;
        while (parent_[root] != root) {
            root = parent_[root];
        }
        while (parent_[x] != root) {
            x = std::exchange(parent_[x], root);
        }
        return root;
    }

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size_[a] < size_[b]) {
            std::swap(a, b);
        }
        parent_[b] = a;
        size_[a] += size_[b];
    }

    std::size_t size_of_root(std::size_t root) const { return size_[root]; }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

inline ComponentSizes all_component_sizes(const SampledGraph& graph) {
    UnionFind uf(graph.n);
    for (Vertex u = 0; u < graph.n; ++u) {
        for (Vertex v : graph.adjacency[u]) {
            if (u < v) {
                uf.unite(u, v);
            }
        }
    }
    ComponentSizes out;
    for (Vertex u = 0; u < graph.n; ++u) {
        if (uf.find(u) == u) {
            out.sizes.push_back(uf.size_of_root(u));
        }
    }
    std::sort(out.sizes.rbegin(), out.sizes.rend());
    if (!out.sizes.empty()) {
        out.largest = out.sizes[0];
    }
    if (out.sizes.size() > 1) {
        out.second_largest = out.sizes[1];
    }
    return out;
}

/// Lazy exploration of a fresh graph around one vertex.
///
/// Samples (degree, component size) of v with exactly the law obtained by
/// drawing a full graph from the model and measuring, but only reveals the
/// edges the breadth-first search touches. Every vertex popped from the queue
/// draws its edges to the still-undiscovered vertices; each unordered pair is
/// therefore decided at most once. Pairs between two discovered vertices are
/// never drawn: they change neither the component nor the root's degree, since
/// the root is processed first while every other vertex is undiscovered.
///
/// SBM: undiscovered vertices are tracked as per-community counts and a popped
/// vertex of community l draws Binomial(remaining_m, K_lm / n) new neighbors
/// from community m. Cost O(|C| S).
///
/// Chung–Lu: a popped vertex scans the weight-sorted vertex list with
/// geometric skips and thinning; candidates that are already discovered (or the
/// vertex itself) are discarded. Cost O(sum of expected degrees over |C|).
///
/// The explorer keeps reusable scratch buffers, so one instance per worker.
class Explorer {
public:
    explicit Explorer(const GraphModel& model) : model_(&model) {
        if (model.kind() == ModelKind::ChungLu) {
            stamp_.assign(model.n(), 0);
        }
        remaining_.resize(model.community_sizes().size());
        frontier_.resize(model.community_sizes().size());
    }

    template <class URBG>
    ExplorationOutcome explore(Vertex v, URBG& rng) {
        model_->check_vertex(v);
        return model_->kind() == ModelKind::Sbm ? explore_sbm(v, rng) : explore_chung_lu(v, rng);
    }

    const GraphModel& model() const { return *model_; }

private:
    template <class URBG>
    ExplorationOutcome explore_sbm(Vertex v, URBG& rng) {
        const auto& p = model_->sbm();
        const std::size_t S = remaining_.size();
        const double n = static_cast<double>(model_->n());
        std::copy(model_->community_sizes().begin(), model_->community_sizes().end(), remaining_.begin());
        std::fill(frontier_.begin(), frontier_.end(), 0);

        const std::size_t root_type = model_->community_of(v);
        --remaining_[root_type];
        ++frontier_[root_type];
        std::size_t discovered = 1;
        std::size_t root_degree = 0;
        bool root_pending = true;
        std::size_t pending = 1;

        // Queue order does not affect the component, so the frontier is kept as
        // per-community counts and drained community by community.
        while (pending > 0) {
            std::size_t l = 0;
            while (frontier_[l] == 0) ++l;
            --frontier_[l];
            --pending;
            std::size_t found = 0;
            for (std::size_t m = 0; m < S; ++m) {
                if (remaining_[m] == 0) {
                    continue;
                }
                const double prob = p.kernel(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m)) / n;
                std::binomial_distribution<std::int64_t> draw(static_cast<std::int64_t>(remaining_[m]), prob);
                const auto k = static_cast<std::size_t>(draw(rng));
                remaining_[m] -= k;
                frontier_[m] += k;
                found += k;
            }
            pending += found;
            discovered += found;
            if (root_pending) {
                root_degree = found;
                root_pending = false;
            }
        }
        return {v, root_degree, discovered};
    }

    template <class URBG>
    ExplorationOutcome explore_chung_lu(Vertex v, URBG& rng) {
        const auto& w = model_->chung_lu().weights;
        const auto& order = model_->weight_order();
        const std::size_t n = model_->n();
        const double dn = static_cast<double>(n);
        if (++epoch_ == 0) {
            std::fill(stamp_.begin(), stamp_.end(), 0);
            epoch_ = 1;
        }
        queue_.clear();
        queue_.push_back(v);
        stamp_[v] = epoch_;
        std::size_t root_degree = 0;

        for (std::size_t head = 0; head < queue_.size(); ++head) {
            const Vertex u = queue_[head];
            const std::size_t before = queue_.size();
            std::size_t b = 0;
            double bound = std::min(1.0, w[u] * w[order[0]] / dn);
            while (b < n && bound > 0.0) {
                b += static_cast<std::size_t>(geometric_skip(rng, bound, static_cast<std::int64_t>(n)));
                if (b >= n) {
                    break;
                }
                const Vertex cand = order[b];
                const double q = std::min(1.0, w[u] * w[cand] / dn);
                if (uniform01(rng) < q / bound && stamp_[cand] != epoch_) {
                    stamp_[cand] = epoch_;
                    queue_.push_back(cand);
                }
                bound = q;
                ++b;
            }
            if (head == 0) {
                root_degree = queue_.size() - before;
            }
        }
        return {v, root_degree, queue_.size()};
    }

    const GraphModel* model_;
    std::vector<std::size_t> remaining_;
    std::vector<std::size_t> frontier_;
    std::vector<std::uint32_t> stamp_;
    std::uint32_t epoch_ = 0;
    std::vector<Vertex> queue_;
};

/// One-shot convenience wrapper around Explorer.
template <class URBG>
ExplorationOutcome lazy_explore(const GraphModel& model, Vertex v, URBG& rng) {
    Explorer explorer(model);
    return explorer.explore(v, rng);
}

/// Edge-list text format: one "u v" pair per line, 0-based, u < v, sorted.
inline void write_edge_list(std::ostream& out, const SampledGraph& graph) {
    for (const auto& [u, v] : graph.edges()) {
        out << u << ' ' << v << '\n';
    }
}

inline SampledGraph read_edge_list(std::istream& in, std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> edges;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::istringstream fields(line);
        long long u = -1;
        long long v = -1;
        if (!(fields >> u >> v) || u < 0 || v < 0 || u >= v) {
            throw ConfigError("edge list line " + std::to_string(line_no) +
                              ": expected \"u v\" with 0 <= u < v");
        }
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    return SampledGraph::from_edges(n, edges);
}

} // namespace locinf
