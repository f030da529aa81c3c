#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "locinf/errors.hpp"
#include "locinf/graph_models.hpp"

// Exact laws on tiny graphs by summing over all 2^(n(n-1)/2) edge subsets.
// Used as an independent reference for the samplers; shares nothing with them
// beyond edge_probability.

namespace locinf::enumeration {

inline constexpr std::size_t kMaxVertices = 6;

using OutcomeKey = std::pair<std::size_t, std::size_t>;  // (degree, component size)
using OutcomeLaw = std::map<OutcomeKey, double>;

/// Canonical pair order: (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::vector<std::pair<Vertex, Vertex>> pair_list(std::size_t n) {
    std::vector<std::pair<Vertex, Vertex>> pairs;
    for (Vertex i = 0; i < n; ++i) {
        for (Vertex j = i + 1; j < n; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

inline void check_small(const GraphModel& model) {
    if (model.n() > kMaxVertices) {
        throw CapacityError("exhaustive enumeration supports n <= " + std::to_string(kMaxVertices));
    }
}

/// Bitmask of a graph's edges in canonical pair order.
inline std::uint32_t graph_mask(const SampledGraph& g) {
    const auto pairs = pair_list(g.n);
    std::uint32_t mask = 0;
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        const auto& nbrs = g.adjacency[pairs[e].first];
        if (std::binary_search(nbrs.begin(), nbrs.end(), pairs[e].second)) {
            mask |= 1u << e;
        }
    }
    return mask;
}

/// Probability of every graph, indexed by graph_mask.
inline std::vector<double> graph_law(const GraphModel& model) {
    check_small(model);
    const auto pairs = pair_list(model.n());
    std::vector<double> probs(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        probs[e] = edge_probability(model, pairs[e].first, pairs[e].second);
    }
    std::vector<double> law(std::size_t{1} << pairs.size());
    for (std::uint32_t mask = 0; mask < law.size(); ++mask) {
        double pr = 1.0;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            pr *= (mask >> e & 1u) ? probs[e] : 1.0 - probs[e];
        }
        law[mask] = pr;
    }
    return law;
}

/// Joint law of (degree of v, size of v's component).
inline OutcomeLaw outcome_law(const GraphModel& model, Vertex v) {
    model.check_vertex(v);
    const auto law = graph_law(model);
    const auto pairs = pair_list(model.n());
    const std::size_t n = model.n();
    OutcomeLaw out;
    for (std::uint32_t mask = 0; mask < law.size(); ++mask) {
        std::size_t deg = 0;
        std::uint32_t reached = 1u << v;
        bool grew = true;
        for (std::size_t e = 0; e < pairs.size(); ++e) {
            if ((mask >> e & 1u) && (pairs[e].first == v || pairs[e].second == v)) {
                ++deg;
            }
        }
        while (grew) {
            grew = false;
            for (std::size_t e = 0; e < pairs.size(); ++e) {
                if (!(mask >> e & 1u)) continue;
                const std::uint32_t a = 1u << pairs[e].first;
                const std::uint32_t b = 1u << pairs[e].second;
                if (((reached & a) != 0) != ((reached & b) != 0)) {
                    reached |= a | b;
                    grew = true;
                }
            }
        }
        std::size_t size = 0;
        for (std::size_t i = 0; i < n; ++i) {
            size += reached >> i & 1u;
        }
        out[{deg, size}] += law[mask];
    }
    return out;
}

/// Total variation distance between two laws over the same key type.
template <class Key>
double total_variation(const std::map<Key, double>& p, const std::map<Key, double>& q) {
    std::set<Key> keys;
    for (const auto& [k, _] : p) keys.insert(k);
    for (const auto& [k, _] : q) keys.insert(k);
    double sum = 0.0;
    for (const auto& k : keys) {
        const auto ip = p.find(k);
        const auto iq = q.find(k);
        sum += std::abs((ip == p.end() ? 0.0 : ip->second) - (iq == q.end() ? 0.0 : iq->second));
    }
    return 0.5 * sum;
}

inline double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) {
        throw ShapeError("total_variation: size mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sum += std::abs(p[i] - q[i]);
    }
    return 0.5 * sum;
}

} // namespace locinf::enumeration
