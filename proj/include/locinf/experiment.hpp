#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locinf/bandit.hpp"
#include "locinf/branching.hpp"
#include "locinf/component_oracle.hpp"
#include "locinf/errors.hpp"
#include "locinf/graph_models.hpp"
#include "locinf/rng.hpp"

namespace locinf {

enum class GroundTruthMethod { BranchingPrediction, MonteCarlo };

inline const char* to_string(GroundTruthMethod m) {
    return m == GroundTruthMethod::BranchingPrediction ? "branching" : "monte_carlo";
}

/// Largest number of Monte Carlo strata used for a Chung–Lu model whose
/// weights take more distinct values than this.
inline constexpr std::size_t kMaxChungLuStrata = 64;

/// Expected component sizes c and the alpha-quantile baseline built on them.
/// All per-vertex vectors have length n.
struct GroundTruth {
    GroundTruthMethod source = GroundTruthMethod::BranchingPrediction;
    std::size_t mc_samples = 0;  // per type / stratum, 0 for predictions
    bool asymptotic = true;      // c drops the O(1/n) or o(n) correction
    std::vector<double> c;
    std::vector<double> c_se;    // zero for predictions
    std::vector<double> mu;      // exact expected degrees
    double alpha = 0.0;
    std::size_t quantile_position = 0;  // 1-based position ceil((1 - alpha) n) in ascending order
    double c_star = 0.0;
    double c_star_alpha = 0.0;
    double mu_star = 0.0;
    double mu_star_alpha = 0.0;  // min of mu over V*_alpha
    std::vector<Vertex> v_star_alpha;
};

/// ceil((1 - alpha) n); a product within 1e-9 of an integer counts as that integer.
inline std::size_t quantile_position(std::size_t n, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("quantile alpha must lie in (0, 1)");
    }
    const double r = (1.0 - alpha) * static_cast<double>(n);
    const double nearest = std::round(r);
    const double pos = std::abs(r - nearest) <= 1e-9 * std::max(1.0, r) ? nearest : std::ceil(r);
    return std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, n);
}

/// Fills the baseline fields of `gt` from gt.c and gt.mu.
inline void build_baseline(GroundTruth& gt, double alpha) {
    const std::size_t n = gt.c.size();
    if (n == 0) {
        throw DomainError("build_baseline: empty vertex set");
    }
    gt.alpha = alpha;
    gt.quantile_position = quantile_position(n, alpha);
    std::vector<Vertex> order(n);
    std::iota(order.begin(), order.end(), Vertex{0});
    std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) { return gt.c[a] < gt.c[b]; });
    gt.c_star = gt.c[order.back()];
    gt.c_star_alpha = gt.c[order[gt.quantile_position - 1]];
    gt.v_star_alpha.assign(order.begin() + static_cast<std::ptrdiff_t>(gt.quantile_position - 1), order.end());
    gt.mu_star = *std::max_element(gt.mu.begin(), gt.mu.end());
    gt.mu_star_alpha = std::numeric_limits<double>::infinity();
    for (Vertex v : gt.v_star_alpha) {
        gt.mu_star_alpha = std::min(gt.mu_star_alpha, gt.mu[v]);
    }
}

struct ComponentEstimate {
    double mean = 0.0;
    double se = 0.0;
    double mean_degree = 0.0;
    std::size_t samples = 0;
};

/// Mean and standard error of |C(v)| over independent lazy explorations.
template <class URBG>
ComponentEstimate estimate_component_mean(Explorer& explorer, Vertex v, std::size_t samples, URBG& rng) {
    if (samples == 0) {
        throw DomainError("Monte Carlo budget must be >= 1");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    double deg = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        const auto out = explorer.explore(v, rng);
        const auto size = static_cast<double>(out.component_size);
        sum += size;
        sum_sq += size * size;
        deg += static_cast<double>(out.degree);
    }
    const double n = static_cast<double>(samples);
    const double mean = sum / n;
    const double var = samples > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0)) : 0.0;
    return {mean, std::sqrt(var / n), deg / n, samples};
}

/// Monte Carlo strata of a model: one representative vertex per SBM community,
/// and for Chung–Lu one per distinct weight (or kMaxChungLuStrata evenly spaced
/// weight ranks when there are more distinct weights).
struct Stratum {
    Vertex representative = 0;
    std::vector<Vertex> members;
};

inline std::vector<Stratum> monte_carlo_strata(const GraphModel& model) {
    std::vector<Stratum> strata;
    if (model.kind() == ModelKind::Sbm) {
        for (std::size_t m = 0; m < model.community_sizes().size(); ++m) {
            Stratum s;
            s.representative = model.community_offsets()[m];
            s.members.resize(model.community_sizes()[m]);
            std::iota(s.members.begin(), s.members.end(), s.representative);
            strata.push_back(std::move(s));
        }
        return strata;
    }
    const auto& w = model.chung_lu().weights;
    const auto& order = model.weight_order();
    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end) in weight order
    for (std::size_t r = 0; r < order.size();) {
        std::size_t e = r + 1;
        while (e < order.size() && w[order[e]] == w[order[r]]) ++e;
        runs.emplace_back(r, e);
        r = e;
    }
    if (runs.size() <= kMaxChungLuStrata) {
        for (const auto& [b, e] : runs) {
            Stratum s;
            s.members.assign(order.begin() + static_cast<std::ptrdiff_t>(b),
                             order.begin() + static_cast<std::ptrdiff_t>(e));
            s.representative = order[b];
            std::sort(s.members.begin(), s.members.end());
            strata.push_back(std::move(s));
        }
        return strata;
    }
    // Representatives at evenly spaced weight ranks, both extremes included;
    // each vertex joins the stratum of the nearest representative rank.
    const std::size_t n = order.size();
    const std::size_t k = kMaxChungLuStrata;
    std::vector<std::size_t> rank(k);
    for (std::size_t s = 0; s < k; ++s) {
        rank[s] = (s * (n - 1) + (k - 1) / 2) / (k - 1);
    }
    std::size_t begin = 0;
    for (std::size_t s = 0; s < k; ++s) {
        const std::size_t end = s + 1 < k ? (rank[s] + rank[s + 1]) / 2 + 1 : n;
        Stratum st;
        st.representative = order[rank[s]];
        st.members.assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                          order.begin() + static_cast<std::ptrdiff_t>(end));
        std::sort(st.members.begin(), st.members.end());
        strata.push_back(std::move(st));
        begin = end;
    }
    return strata;
}

/// Expected component sizes and the alpha-quantile baseline.
///
/// BranchingPrediction broadcasts predicted_component_mean per type.
/// MonteCarlo runs `mc_samples` lazy explorations from each stratum
/// representative. Chung–Lu vertices inside a quantile stratum (only used when
/// weights are nearly all distinct) get c interpolated linearly in w between
/// neighbouring representatives.
template <class URBG>
GroundTruth compute_ground_truth(const GraphModel& model, double alpha, GroundTruthMethod method,
                                 std::size_t mc_samples, URBG& rng) {
    const std::size_t n = model.n();
    GroundTruth gt;
    gt.source = method;
    gt.asymptotic = method == GroundTruthMethod::BranchingPrediction;
    gt.mu.resize(n);
    for (Vertex v = 0; v < n; ++v) {
        gt.mu[v] = mean_degree(model, v);
    }
    gt.c.assign(n, 0.0);
    gt.c_se.assign(n, 0.0);

    if (method == GroundTruthMethod::BranchingPrediction) {
        const BranchingSolution sol = solve_branching(model);
        if (model.kind() == ModelKind::Sbm) {
            for (std::size_t m = 0; m < model.num_types(); ++m) {
                const double c = predicted_component_mean(model, sol, m);
                const std::size_t off = model.community_offsets()[m];
                std::fill_n(gt.c.begin() + static_cast<std::ptrdiff_t>(off), model.community_sizes()[m], c);
            }
        } else {
            for (Vertex v = 0; v < n; ++v) {
                gt.c[v] = predicted_component_mean(model, sol, v);
            }
        }
    } else {
        if (mc_samples == 0) {
            throw DomainError("compute_ground_truth: Monte Carlo budget must be >= 1");
        }
        gt.mc_samples = mc_samples;
        Explorer explorer(model);
        const auto strata = monte_carlo_strata(model);
        std::vector<ComponentEstimate> est;
        for (const Stratum& s : strata) {
            est.push_back(estimate_component_mean(explorer, s.representative, mc_samples, rng));
        }
        const bool interpolate = model.kind() == ModelKind::ChungLu && strata.size() == kMaxChungLuStrata &&
                                 strata.size() < n;
        if (!interpolate) {
            for (std::size_t s = 0; s < strata.size(); ++s) {
                for (Vertex v : strata[s].members) {
                    gt.c[v] = est[s].mean;
                    gt.c_se[v] = est[s].se;
                }
            }
        } else {
            // Representatives in increasing weight.
            const auto& w = model.chung_lu().weights;
            std::vector<std::size_t> idx(strata.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return w[strata[a].representative] < w[strata[b].representative];
            });
            for (Vertex v = 0; v < n; ++v) {
                const double wv = w[v];
                auto hi = std::lower_bound(idx.begin(), idx.end(), wv, [&](std::size_t s, double x) {
                    return w[strata[s].representative] < x;
                });
                if (hi == idx.begin()) {
                    gt.c[v] = est[*hi].mean;
                    gt.c_se[v] = est[*hi].se;
                } else if (hi == idx.end()) {
                    gt.c[v] = est[idx.back()].mean;
                    gt.c_se[v] = est[idx.back()].se;
                } else {
                    const std::size_t a = *(hi - 1);
                    const std::size_t b = *hi;
                    const double wa = w[strata[a].representative];
                    const double wb = w[strata[b].representative];
                    const double t = wb > wa ? (wv - wa) / (wb - wa) : 0.0;
                    gt.c[v] = est[a].mean + t * (est[b].mean - est[a].mean);
                    gt.c_se[v] = std::max(est[a].se, est[b].se);
                }
            }
        }
    }
    build_baseline(gt, alpha);
    return gt;
}

enum class PolicyKind { DUcbFixedHorizon, DUcbDouble, UniformBaseline };

inline const char* to_string(PolicyKind p) {
    switch (p) {
    case PolicyKind::DUcbFixedHorizon: return "ducb_fixed_T";
    case PolicyKind::DUcbDouble: return "ducb_double";
    case PolicyKind::UniformBaseline: return "uniform_baseline";
    }
    return "?";
}

struct PolicyConfig {
    PolicyKind kind = PolicyKind::DUcbFixedHorizon;
    std::size_t horizon = 1000;
    double alpha = 0.1;
    double beta = 2.0;
};

/// Per-round pulls with the cumulative alpha-quantile regret sum_t (c*_alpha - c_{A_t}).
struct RegretTrace {
    std::uint64_t seed = 0;
    ActionLog records;
    std::vector<double> cumulative_regret;
    std::vector<Vertex> initial_arms;  // V_0 (fixed horizon) or final V_k (doubling)
};

inline RegretTrace regret_trace_from_log(ActionLog log, const GroundTruth& gt, std::uint64_t seed = 0) {
    RegretTrace trace;
    trace.seed = seed;
    trace.cumulative_regret.reserve(log.size());
    double total = 0.0;
    for (const PullRecord& r : log) {
        if (r.vertex >= gt.c.size()) {
            throw IndexError("regret trace: vertex out of range");
        }
        total += gt.c_star_alpha - gt.c[r.vertex];
        trace.cumulative_regret.push_back(total);
    }
    trace.records = std::move(log);
    return trace;
}

/// Regret recomputed from pull counts: sum over arms of N_a(T) (c*_alpha - c_a).
inline double telescoped_regret(const RegretTrace& trace, const GroundTruth& gt) {
    std::vector<std::pair<Vertex, std::size_t>> counts;
    {
        std::vector<Vertex> pulled;
        pulled.reserve(trace.records.size());
        for (const auto& r : trace.records) pulled.push_back(r.vertex);
        std::sort(pulled.begin(), pulled.end());
        for (std::size_t i = 0; i < pulled.size();) {
            std::size_t j = i;
            while (j < pulled.size() && pulled[j] == pulled[i]) ++j;
            counts.emplace_back(pulled[i], j - i);
            i = j;
        }
    }
    double total = 0.0;
    for (const auto& [v, count] : counts) {
        total += static_cast<double>(count) * (gt.c_star_alpha - gt.c[v]);
    }
    return total;
}

/// One replicate: fresh i.i.d. graph per round, realized lazily around the pulled vertex.
inline RegretTrace run_replicate(const GraphModel& model, const GroundTruth& gt, const PolicyConfig& policy,
                                 std::uint64_t seed) {
    if (policy.horizon == 0) {
        throw DomainError("policy.T must be >= 1");
    }
    Rng arm_rng(derive_seed(seed, stream_id::kArmSelection));
    Rng env_rng(derive_seed(seed, stream_id::kEnvironment));
    Explorer explorer(model);
    auto env = [&](Vertex v) { return explorer.explore(v, env_rng); };

    ActionLog log;
    std::vector<Vertex> arms;
    switch (policy.kind) {
    case PolicyKind::DUcbFixedHorizon: {
        const std::size_t size =
            std::min({model.n(), policy.horizon,
                      subsample_size(std::max<double>(2.0, static_cast<double>(policy.horizon)), policy.alpha)});
        for (std::size_t v : sample_without_replacement(model.n(), size, arm_rng)) {
            arms.push_back(v);
        }
        auto run = run_ducb(arms, policy.horizon, env);
        log = std::move(run.log);
        break;
    }
    case PolicyKind::DUcbDouble: {
        auto run = run_ducb_double(model.n(), policy.horizon, policy.beta, policy.alpha, arm_rng, env);
        if (!run.schedule.epochs.empty()) {
            arms = run.schedule.epochs.back().arms;
        }
        log = std::move(run.log);
        break;
    }
    case PolicyKind::UniformBaseline: {
        std::uniform_int_distribution<Vertex> pick(0, model.n() - 1);
        log.reserve(policy.horizon);
        for (std::size_t t = 1; t <= policy.horizon; ++t) {
            const Vertex v = pick(arm_rng);
            const auto obs = env(v);
            log.push_back({t, 0, v, obs.degree, obs.component_size});
        }
        break;
    }
    }
    RegretTrace trace = regret_trace_from_log(std::move(log), gt, seed);
    trace.initial_arms = std::move(arms);
    return trace;
}

/// First instance-dependent bound of the fixed-horizon d-UCB regret, evaluated
/// on a realized arm set:
///   sum_{i in V0} Delta_i (mu*_alpha (18 + 27 log T) / delta_i^2 + 3) + Delta_max
/// with Delta_i = (c*_alpha - c_i)_+, delta_i = (mu*_alpha - mu_i)_+.
/// Infinite when some arm has Delta_i > 0 but delta_i = 0.
inline double fixed_horizon_regret_bound(const GroundTruth& gt, const std::vector<Vertex>& arms,
                                         std::size_t horizon) {
    const double log_t = std::log(static_cast<double>(std::max<std::size_t>(horizon, 2)));
    double delta_max = 0.0;
    for (double c : gt.c) {
        delta_max = std::max(delta_max, gt.c_star_alpha - c);
    }
    double bound = delta_max;
    for (Vertex v : arms) {
        const double gap_c = std::max(0.0, gt.c_star_alpha - gt.c[v]);
        if (gap_c == 0.0) {
            continue;
        }
        const double gap_mu = std::max(0.0, gt.mu_star_alpha - gt.mu[v]);
        if (gap_mu == 0.0) {
            return std::numeric_limits<double>::infinity();
        }
        bound += gap_c * (gt.mu_star_alpha * (18.0 + 27.0 * log_t) / (gap_mu * gap_mu) + 3.0);
    }
    return bound;
}

// ---------------------------------------------------------------------------
// Empirical check that the largest expected degree identifies the largest
// expected component.

struct TypeReport {
    Vertex representative = 0;
    double mu = 0.0;
    double c_hat = 0.0;
    double c_se = 0.0;
    double prediction = 0.0;  // branching prediction of c (NaN at criticality)
};

struct GapCheck {
    Vertex representative = 0;
    double lhs = 0.0;    // c*_hat - c_hat_a
    double bound = 0.0;  // factor * c*_hat * (mu* - mu_a)
    double slack = 0.0;  // 3 SE (+ asymptotic allowance when supercritical)
    bool holds = false;
};

struct ValidationReport {
    Regime regime = Regime::Subcritical;
    double lambda_max = 0.0;
    std::size_t mc_samples = 0;
    double gap_factor = 2.0;
    std::vector<TypeReport> types;
    bool degenerate_tie = false;     // several types share the largest mu
    std::optional<bool> argmax_agreement;  // unset on a degenerate tie
    bool argmax_confident = false;   // top c_hat separated from the runner-up by > 3 SE
    std::vector<GapCheck> gaps;
    bool all_gaps_hold = true;
};

/// Fraction of c* granted to the supercritical gap check for the o(n) term.
inline constexpr double kSupercriticalAllowance = 0.05;

/// Checks on one model:
///   (a) argmax of Monte Carlo c_hat agrees with argmax of the exact mu;
///   (b) c*_hat - c_hat_a <= factor c*_hat (mu* - mu_a) + slack for every a with mu_a < mu*,
///       factor 2 and slack 3 SE when subcritical, factor 1 and slack
///       3 SE + 0.05 c*_hat when supercritical.
/// SBMs must share one off-diagonal kernel entry k, and when supercritical also
/// have K_mm >= k; otherwise AssumptionViolation.
template <class URBG>
ValidationReport validate_propositions(const GraphModel& model, std::size_t mc_samples, URBG& rng) {
    if (mc_samples == 0) {
        throw DomainError("validate_propositions: Monte Carlo budget must be >= 1");
    }
    if (model.regime() == Regime::Critical) {
        throw RegimeError("validate_propositions: model is critical");
    }
    if (model.kind() == ModelKind::Sbm && model.num_types() > 1) {
        const auto k = common_off_diagonal(model);
        if (!k) {
            throw AssumptionViolation("Assumption 1 violated: off-diagonal kernel entries differ");
        }
        if (model.regime() == Regime::Supercritical) {
            const auto& K = model.sbm().kernel;
            for (Eigen::Index m = 0; m < K.rows(); ++m) {
                if (K(m, m) < *k) {
                    throw AssumptionViolation("Assumption 2 violated: K_mm < k for community " +
                                              std::to_string(m));
                }
            }
        }
    }

    ValidationReport report;
    report.regime = model.regime();
    report.lambda_max = model.lambda_max();
    report.mc_samples = mc_samples;
    const bool super = model.regime() == Regime::Supercritical;
    report.gap_factor = super ? 1.0 : 2.0;

    const BranchingSolution sol = solve_branching(model);
    Explorer explorer(model);
    for (const Stratum& s : monte_carlo_strata(model)) {
        TypeReport t;
        t.representative = s.representative;
        t.mu = mean_degree(model, s.representative);
        const auto est = estimate_component_mean(explorer, s.representative, mc_samples, rng);
        t.c_hat = est.mean;
        t.c_se = est.se;
        t.prediction = predicted_component_mean(model, sol, model.type_of(s.representative));
        report.types.push_back(t);
    }

    const auto& types = report.types;
    double mu_star = -std::numeric_limits<double>::infinity();
    for (const auto& t : types) mu_star = std::max(mu_star, t.mu);
    std::vector<std::size_t> mu_argmax;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (std::abs(types[i].mu - mu_star) <= 1e-12 * std::max(1.0, mu_star)) mu_argmax.push_back(i);
    }
    std::size_t c_arg = 0;
    for (std::size_t i = 1; i < types.size(); ++i) {
        if (types[i].c_hat > types[c_arg].c_hat) c_arg = i;
    }
    report.degenerate_tie = mu_argmax.size() > 1;
    if (!report.degenerate_tie) {
        report.argmax_agreement = mu_argmax.front() == c_arg;
    }
    report.argmax_confident = true;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (i == c_arg) continue;
        const double se = std::hypot(types[i].c_se, types[c_arg].c_se);
        if (types[c_arg].c_hat - types[i].c_hat <= 3.0 * se) report.argmax_confident = false;
    }

    const double c_star = types[c_arg].c_hat;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (!(types[i].mu < mu_star) || report.degenerate_tie) {
            continue;
        }
        GapCheck g;
        g.representative = types[i].representative;
        g.lhs = c_star - types[i].c_hat;
        g.bound = report.gap_factor * c_star * (mu_star - types[i].mu);
        g.slack = 3.0 * std::hypot(types[c_arg].c_se, types[i].c_se) +
                  (super ? kSupercriticalAllowance * c_star : 0.0);
        g.holds = g.lhs <= g.bound + g.slack;
        report.all_gaps_hold = report.all_gaps_hold && g.holds;
        report.gaps.push_back(g);
    }
    return report;
}

} // namespace locinf
