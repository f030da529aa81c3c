#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "locinf/component_oracle.hpp"
#include "locinf/errors.hpp"
#include "locinf/graph_models.hpp"
#include "locinf/rng.hpp"

namespace locinf {

/// Poisson divergence d(mu, mu') = mu' - mu + mu log(mu / mu'), with 0 log 0 = 0.
inline double kl_poisson(double mu, double mu_prime) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
        throw DomainError("kl_poisson: mu must be finite and >= 0");
    }
    if (!(mu_prime > 0.0) || !std::isfinite(mu_prime)) {
        throw DomainError("kl_poisson: mu' must be finite and > 0");
    }
    if (mu == 0.0) {
        return mu_prime;
    }
    return mu_prime - mu + mu * std::log(mu / mu_prime);
}

/// Exploration threshold f(t) = 3 log t, clamped at t = 2 so it stays positive.
inline double exploration_threshold(double t) {
    return 3.0 * std::log(std::max(t, 2.0));
}

inline constexpr double kIndexRelativeWidth = 1e-9;

/// Upper confidence index U = sup{mu >= mean : d(mean, mu) <= f(t) / pulls}.
///
/// Bracketed bisection down to a relative width of 1e-9, then a few safeguarded
/// Newton steps (d' = 1 - mean/mu) which bring d(mean, U) to the threshold at
/// machine precision. mean = 0 is solved exactly: d(0, mu) = mu.
inline double ucb_index(double mean_estimate, std::size_t pulls, double t) {
    if (!std::isfinite(mean_estimate) || !std::isfinite(t) || mean_estimate < 0.0) {
        throw DomainError("ucb_index: mean estimate and t must be finite, mean >= 0");
    }
    if (pulls == 0) {
        throw DomainError("ucb_index: pulls must be >= 1");
    }
    const double tau = exploration_threshold(t) / static_cast<double>(pulls);
    if (mean_estimate == 0.0) {
        return tau;
    }
    auto gap = [&](double mu) { return kl_poisson(mean_estimate, mu) - tau; };

    double lo = std::max(mean_estimate, std::numeric_limits<double>::min());
    double hi = mean_estimate + tau + 1.0;
    while (gap(hi) <= 0.0) {
        hi = mean_estimate + 2.0 * (hi - mean_estimate);
        if (!std::isfinite(hi)) {
            throw DomainError("ucb_index: could not bracket the index");
        }
    }
    while (hi - lo >= kIndexRelativeWidth * (1.0 + hi)) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? hi : lo) = mid;
    }
    double mu = 0.5 * (lo + hi);
    for (int step = 0; step < 4; ++step) {
        const double g = gap(mu);
        const double slope = 1.0 - mean_estimate / mu;
        if (g == 0.0 || slope <= 0.0) {
            break;
        }
        const double next = mu - g / slope;
        if (!(next >= lo && next <= hi)) {
            break;
        }
        mu = next;
    }
    return mu;
}

/// Statistics of one arm: pull count and integer degree total.
struct ArmStats {
    Vertex vertex = 0;
    std::size_t pulls = 0;
    std::uint64_t degree_sum = 0;

    double mean_degree_estimate() const {
        return pulls == 0 ? 0.0 : static_cast<double>(degree_sum) / static_cast<double>(pulls);
    }
};

/// Running state of one d-UCB instance over a fixed arm set.
///
/// round counts observations so far. The first |arms| rounds pull each arm once
/// in listed order; afterwards the arm with the largest index is pulled.
class DUcbState {
public:
    explicit DUcbState(std::vector<Vertex> arm_set) {
        arms_.reserve(arm_set.size());
        for (Vertex v : arm_set) {
            if (!slot_.emplace(v, arms_.size()).second) {
                throw DomainError("d-UCB: duplicate arm " + std::to_string(v));
            }
            arms_.push_back(ArmStats{v, 0, 0});
        }
    }

    const std::vector<ArmStats>& arms() const { return arms_; }
    std::size_t round() const { return round_; }
    bool initialized() const { return round_ >= arms_.size(); }

    const ArmStats& arm(Vertex v) const { return arms_[slot(v)]; }

    std::size_t slot(Vertex v) const {
        const auto it = slot_.find(v);
        if (it == slot_.end()) {
            throw UnknownArmError("d-UCB: vertex " + std::to_string(v) + " is not an arm");
        }
        return it->second;
    }

    void record(Vertex v, std::size_t observed_degree) {
        ArmStats& a = arms_[slot(v)];
        ++a.pulls;
        a.degree_sum += observed_degree;
        ++round_;
    }

private:
    std::vector<ArmStats> arms_;
    std::unordered_map<Vertex, std::size_t> slot_;
    std::size_t round_ = 0;
};

/// Arm maximizing the index at the current round; ties go to fewer pulls, then lower id.
inline Vertex select_arm(const DUcbState& state) {
    if (state.arms().empty()) {
        throw EmptyArmsError("select_arm: empty arm set");
    }
    const double t = static_cast<double>(state.round());
    const ArmStats* best = nullptr;
    double best_index = -std::numeric_limits<double>::infinity();
    for (const ArmStats& a : state.arms()) {
        if (a.pulls == 0) {
            throw DomainError("select_arm: arm " + std::to_string(a.vertex) + " was never pulled");
        }
        const double index = ucb_index(a.mean_degree_estimate(), a.pulls, t);
        const bool better =
            best == nullptr || index > best_index ||
            (index == best_index &&
             (a.pulls < best->pulls || (a.pulls == best->pulls && a.vertex < best->vertex)));
        if (better) {
            best = &a;
            best_index = index;
        }
    }
    return best->vertex;
}

/// Running-mean update: N <- N + 1, mean <- (N mean + Y) / (N + 1).
inline void update(DUcbState& state, Vertex v, std::size_t observed_degree) {
    state.record(v, observed_degree);
}

/// Next arm to pull: the first never-pulled arm during initialization, else select_arm.
inline Vertex next_arm(const DUcbState& state) {
    if (!state.initialized()) {
        return state.arms()[state.round()].vertex;
    }
    return select_arm(state);
}

/// ceil(log T / log(1 / (1 - alpha))). A ratio within 1e-9 of an integer is
/// treated as that integer so exact cases are not pushed up by rounding.
inline std::size_t subsample_size(double horizon, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw DomainError("subsample_size: alpha must lie in (0, 1)");
    }
    if (!(horizon >= 2.0) || !std::isfinite(horizon)) {
        throw DomainError("subsample_size: T must be >= 2");
    }
    const double ratio = std::log(horizon) / -std::log1p(-alpha);
    const double nearest = std::round(ratio);
    const double size = std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio) ? nearest : std::ceil(ratio);
    return std::max<std::size_t>(1, static_cast<std::size_t>(size));
}

/// E[exp(s D_v)] of the degree of v: a product of independent Bernoulli MGFs.
inline double degree_mgf(const GraphModel& model, Vertex v, double s) {
    model.check_vertex(v);
    const double em1 = std::expm1(s);
    double log_mgf = 0.0;
    for (Vertex j = 0; j < model.n(); ++j) {
        if (j != v) log_mgf += std::log1p(edge_probability(model, v, j) * em1);
    }
    return std::exp(log_mgf);
}

/// E[exp(s X)] for X ~ Poisson(mean).
inline double poisson_mgf(double mean, double s) {
    if (!(mean >= 0.0)) throw DomainError("poisson_mgf: mean must be >= 0");
    return std::exp(mean * std::expm1(s));
}

/// One pull as written to the action log.
struct PullRecord {
    std::size_t round = 0;  // 1-based
    std::size_t epoch = 0;  // 0 for single-instance policies
    Vertex vertex = 0;
    std::size_t degree = 0;
    std::size_t component_size = 0;
};

using ActionLog = std::vector<PullRecord>;

struct DUcbRun {
    ActionLog log;
    DUcbState state;
};

namespace detail {

template <class Env>
void play_rounds(DUcbState& state, std::size_t rounds, std::size_t first_round, std::size_t epoch, Env& env,
                 ActionLog& log) {
    for (std::size_t r = 0; r < rounds; ++r) {
        const Vertex v = next_arm(state);
        const ExplorationOutcome obs = env(v);
        update(state, v, obs.degree);
        log.push_back({first_round + r, epoch, v, obs.degree, obs.component_size});
    }
}

} // namespace detail

/// d-UCB(V_0) for T rounds. `env(v)` returns the ExplorationOutcome of pulling v
/// in a fresh graph; only its degree reaches the policy.
template <class Env>
DUcbRun run_ducb(const std::vector<Vertex>& arm_set, std::size_t horizon, Env&& env) {
    if (arm_set.empty()) {
        throw EmptyArmsError("run_ducb: empty arm set");
    }
    if (arm_set.size() > horizon) {
        throw CapacityError("run_ducb: " + std::to_string(arm_set.size()) + " arms exceed horizon " +
                            std::to_string(horizon));
    }
    DUcbRun run{{}, DUcbState(arm_set)};
    run.log.reserve(horizon);
    detail::play_rounds(run.state, horizon, 1, 0, env, run.log);
    return run;
}

/// One epoch of the doubling schedule: rounds [first_round, last_round].
struct Epoch {
    std::size_t k = 0;
    std::size_t first_round = 0;
    std::size_t last_round = 0;
    std::vector<Vertex> batch;  // U_k
    std::vector<Vertex> arms;   // V_k = V_{k-1} ∪ U_k
};

struct EpochSchedule {
    double beta = 2.0;
    double alpha = 0.5;
    std::size_t batch_size = 0;
    std::vector<Epoch> epochs;
};

/// beta^k rounded to an integer when within 1e-9 of one, else ceiled.
inline std::size_t epoch_boundary(double beta, std::size_t k) {
    const double value = std::pow(beta, static_cast<double>(k));
    const double nearest = std::round(value);
    if (std::abs(value - nearest) <= 1e-9 * std::max(1.0, value)) {
        return static_cast<std::size_t>(nearest);
    }
    return static_cast<std::size_t>(std::ceil(value));
}

/// Round ranges [beta^{k-1}, beta^k - 1] for k = 1, 2, ..., the last one cut at T.
inline std::vector<std::pair<std::size_t, std::size_t>> epoch_ranges(std::size_t horizon, double beta) {
    if (!(beta >= 2.0) || !std::isfinite(beta)) {
        throw DomainError("doubling schedule: beta must be >= 2");
    }
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    for (std::size_t k = 1;; ++k) {
        const std::size_t first = epoch_boundary(beta, k - 1);
        if (first > horizon) {
            break;
        }
        const std::size_t last = std::min(horizon, epoch_boundary(beta, k) - 1);
        ranges.emplace_back(first, last);
    }
    return ranges;
}

struct DUcbDoubleRun {
    ActionLog log;
    EpochSchedule schedule;
    std::vector<DUcbState> epoch_states;  // final statistics of each epoch's fresh instance
};

/// d-UCB-double(beta): epoch k adds a uniform batch U_k of
/// ceil(log beta / log(1/(1-alpha))) vertices (without replacement from V,
/// capped at n) to the arm set and runs a fresh d-UCB instance on V_k for the
/// epoch's rounds. An epoch shorter than |V_k| ends inside initialization.
template <class URBG, class Env>
DUcbDoubleRun run_ducb_double(std::size_t n, std::size_t horizon, double beta, double alpha, URBG& rng,
                              Env&& env) {
    if (n == 0) {
        throw EmptyArmsError("run_ducb_double: empty vertex set");
    }
    DUcbDoubleRun out;
    out.schedule.beta = beta;
    out.schedule.alpha = alpha;
    const auto ranges = epoch_ranges(horizon, beta);
    out.schedule.batch_size = subsample_size(beta, alpha);
    out.log.reserve(horizon);

    std::vector<Vertex> arms;
    std::unordered_map<Vertex, bool> in_arms;
    for (std::size_t k = 1; k <= ranges.size(); ++k) {
        Epoch epoch;
        epoch.k = k;
        epoch.first_round = ranges[k - 1].first;
        epoch.last_round = ranges[k - 1].second;
        for (std::size_t v : sample_without_replacement(n, out.schedule.batch_size, rng)) {
            epoch.batch.push_back(v);
            if (in_arms.emplace(v, true).second) {
                arms.push_back(v);
            }
        }
        epoch.arms = arms;

        DUcbState state(arms);
        detail::play_rounds(state, epoch.last_round - epoch.first_round + 1, epoch.first_round, k, env, out.log);
        out.epoch_states.push_back(std::move(state));
        out.schedule.epochs.push_back(std::move(epoch));
    }
    return out;
}

} // namespace locinf
