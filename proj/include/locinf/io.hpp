#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "locinf/bandit.hpp"
#include "locinf/branching.hpp"
#include "locinf/experiment.hpp"
#include "locinf/graph_models.hpp"

// Serialization of solutions, traces and reports.
//
// Trace CSV (schema 1):
//   # schema=1
//   round,epoch,vertex,observed_degree,component_size,cumulative_regret
// epoch is 0 for single-instance policies and k >= 1 for the doubling policy.

namespace locinf::io {

using nlohmann::json;

inline constexpr int kCsvSchema = 1;

/// Shortest decimal text that round-trips, so identical runs give identical bytes.
inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

inline json to_json(const BranchingSolution& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["regime"] = to_string(s.regime);
    j["lambda_max"] = s.lambda_max;
    j["b"] = s.b;
    j["x"] = s.x.empty() ? json(nullptr) : json(s.x);
    j["rho"] = s.rho.empty() ? json(nullptr) : json(s.rho);
    return j;
}

inline BranchingSolution branching_from_json(const json& j) {
    BranchingSolution s;
    s.kind = j.at("kind").get<std::string>() == "sbm" ? ModelKind::Sbm : ModelKind::ChungLu;
    const std::string regime = j.at("regime").get<std::string>();
    s.regime = regime == "Subcritical" ? Regime::Subcritical
             : regime == "Supercritical" ? Regime::Supercritical
                                         : Regime::Critical;
    s.lambda_max = j.at("lambda_max").get<double>();
    s.b = j.at("b").get<std::vector<double>>();
    if (!j.at("x").is_null()) s.x = j.at("x").get<std::vector<double>>();
    if (!j.at("rho").is_null()) s.rho = j.at("rho").get<std::vector<double>>();
    return s;
}

/// Per-vertex vectors are summarized: distinct (c, mu) levels with their vertex counts.
inline json to_json(const GroundTruth& gt) {
    json j;
    j["source"] = to_string(gt.source);
    j["mc_samples"] = gt.mc_samples;
    j["asymptotic"] = gt.asymptotic;
    j["alpha"] = gt.alpha;
    j["n"] = gt.c.size();
    j["quantile_position"] = gt.quantile_position;
    j["c_star"] = gt.c_star;
    j["c_star_alpha"] = gt.c_star_alpha;
    j["mu_star"] = gt.mu_star;
    j["mu_star_alpha"] = gt.mu_star_alpha;
    j["v_star_alpha_size"] = gt.v_star_alpha.size();
    json levels = json::array();
    for (std::size_t v = 0; v < gt.c.size();) {
        std::size_t e = v + 1;
        while (e < gt.c.size() && gt.c[e] == gt.c[v] && gt.mu[e] == gt.mu[v]) ++e;
        levels.push_back({{"first_vertex", v}, {"count", e - v}, {"c", gt.c[v]}, {"c_se", gt.c_se[v]},
                          {"mu", gt.mu[v]}});
        v = e;
    }
    j["levels"] = levels;
    return j;
}

inline json to_json(const ValidationReport& r) {
    json j;
    j["regime"] = to_string(r.regime);
    j["lambda_max"] = r.lambda_max;
    j["mc_samples"] = r.mc_samples;
    j["gap_factor"] = r.gap_factor;
    j["degenerate_tie"] = r.degenerate_tie;
    j["argmax_agreement"] = r.argmax_agreement ? json(*r.argmax_agreement) : json(nullptr);
    j["argmax_confident"] = r.argmax_confident;
    j["all_gaps_hold"] = r.all_gaps_hold;
    json types = json::array();
    for (const auto& t : r.types) {
        types.push_back({{"representative", t.representative}, {"mu", t.mu}, {"c_hat", t.c_hat},
                         {"c_se", t.c_se}, {"prediction", t.prediction}});
    }
    j["types"] = types;
    json gaps = json::array();
    for (const auto& g : r.gaps) {
        gaps.push_back({{"representative", g.representative}, {"lhs", g.lhs}, {"bound", g.bound},
                        {"slack", g.slack}, {"holds", g.holds}});
    }
    j["gaps"] = gaps;
    return j;
}

inline void write_trace_csv(std::ostream& out, const RegretTrace& trace) {
    out << "# schema=" << kCsvSchema << '\n';
    out << "round,epoch,vertex,observed_degree,component_size,cumulative_regret\n";
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        const PullRecord& r = trace.records[i];
        out << r.round << ',' << r.epoch << ',' << r.vertex << ',' << r.degree << ',' << r.component_size << ','
            << format_real(trace.cumulative_regret[i]) << '\n';
    }
}

/// Rounds at which summaries report regret: T/10, T/2, T (at least 1, deduplicated).
inline std::vector<std::size_t> checkpoints(std::size_t horizon) {
    std::vector<std::size_t> out;
    for (std::size_t c : {horizon / 10, horizon / 2, horizon}) {
        c = std::max<std::size_t>(c, 1);
        if (out.empty() || out.back() != c) out.push_back(c);
    }
    return out;
}

struct CheckpointStats {
    std::size_t round = 0;
    double mean = 0.0;
    double stddev = 0.0;
};

inline std::vector<CheckpointStats> checkpoint_stats(const std::vector<RegretTrace>& traces, std::size_t horizon) {
    std::vector<CheckpointStats> out;
    for (std::size_t round : checkpoints(horizon)) {
        double sum = 0.0;
        double sum_sq = 0.0;
        for (const auto& t : traces) {
            const double r = t.cumulative_regret.at(round - 1);
            sum += r;
            sum_sq += r * r;
        }
        const double n = static_cast<double>(traces.size());
        const double mean = sum / n;
        const double var = traces.size() > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
        out.push_back({round, mean, std::sqrt(var)});
    }
    return out;
}

inline json summary_json(const PolicyConfig& policy, const GroundTruth& gt, const std::vector<RegretTrace>& traces) {
    json j;
    j["schema"] = kCsvSchema;
    j["policy"] = to_string(policy.kind);
    j["T"] = policy.horizon;
    j["alpha"] = policy.alpha;
    j["beta"] = policy.beta;
    j["replicates"] = traces.size();
    j["ground_truth_source"] = to_string(gt.source);
    j["c_star"] = gt.c_star;
    j["c_star_alpha"] = gt.c_star_alpha;
    json seeds = json::array();
    for (const auto& t : traces) seeds.push_back(t.seed);
    j["seeds"] = seeds;
    json cps = json::array();
    for (const auto& c : checkpoint_stats(traces, policy.horizon)) {
        cps.push_back({{"round", c.round}, {"mean_regret", c.mean}, {"stddev_regret", c.stddev}});
    }
    j["checkpoints"] = cps;
    return j;
}

} // namespace locinf::io
