#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locinf/errors.hpp"
#include "locinf/graph_models.hpp"
#include "locinf/rng.hpp"

namespace locinf {

inline constexpr double kFixedPointTolerance = 1e-12;
inline constexpr double kFixedPointResidual = 1e-10;
inline constexpr std::size_t kFixedPointMaxIterations = 1000000;
inline constexpr std::size_t kDefaultSurvivalCap = 10000;

/// Branching-process summary of a model. Vectors are indexed by type:
/// communities for an SBM, vertices for Chung–Lu.
///
///   b    mean offspring per type (row sums of the kernel)
///   x    expected total progeny; filled only when subcritical
///   rho  survival probabilities; zeros when subcritical, filled when
///        supercritical, empty when critical
struct BranchingSolution {
    ModelKind kind = ModelKind::Sbm;
    std::vector<double> b;
    std::vector<double> x;
    std::vector<double> rho;
    double lambda_max = 0.0;
    Regime regime = Regime::Subcritical;
};

/// Phi(f)_j = 1 - exp(-(kernel f)_j).
inline std::vector<double> phi(const Eigen::MatrixXd& kernel, std::span<const double> f) {
    if (kernel.rows() != kernel.cols() || kernel.cols() != static_cast<Eigen::Index>(f.size())) {
        throw ShapeError("phi: kernel is " + std::to_string(kernel.rows()) + "x" +
                         std::to_string(kernel.cols()) + " but f has " + std::to_string(f.size()) +
                         " entries");
    }
    for (double v : f) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw DomainError("phi: f must lie in [0,1]^S");
        }
    }
    const Eigen::VectorXd af = kernel * Eigen::Map<const Eigen::VectorXd>(f.data(), kernel.cols());
    std::vector<double> out(f.size());
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = -std::expm1(-af(static_cast<Eigen::Index>(j)));
    }
    return out;
}

namespace detail {

// Phi for the rank-one Chung–Lu kernel A = w w^T / n, in O(n).
inline void phi_rank_one(const std::vector<double>& w, double n, const std::vector<double>& f,
                         std::vector<double>& out) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        s += w[j] * f[j];
    }
    out.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        out[i] = -std::expm1(-w[i] * s / n);
    }
}

inline void apply_phi(const GraphModel& model, const std::vector<double>& f, std::vector<double>& out) {
    if (model.kind() == ModelKind::Sbm) {
        out = phi(model.reduced_kernel(), f);
    } else {
        phi_rank_one(model.chung_lu().weights, static_cast<double>(model.n()), f, out);
    }
}

inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace detail

/// b_i = sum_j A_ij over types.
inline std::vector<double> mean_offspring(const GraphModel& model) {
    if (model.kind() == ModelKind::Sbm) {
        const Eigen::VectorXd rows = model.reduced_kernel().rowwise().sum();
        return {rows.data(), rows.data() + rows.size()};
    }
    const auto& w = model.chung_lu().weights;
    const double scale = model.weight_sum() / static_cast<double>(model.n());
    std::vector<double> b(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        b[i] = w[i] * scale;
    }
    return b;
}

/// True when every off-diagonal kernel entry equals a common k (within 1e-12).
inline std::optional<double> common_off_diagonal(const GraphModel& model) {
    if (model.kind() != ModelKind::Sbm) {
        return std::nullopt;
    }
    const auto& K = model.sbm().kernel;
    if (K.rows() < 2) {
        return std::nullopt;
    }
    const double k = K(0, 1);
    for (Eigen::Index l = 0; l < K.rows(); ++l) {
        for (Eigen::Index m = 0; m < K.cols(); ++m) {
            if (l != m && std::abs(K(l, m) - k) > 1e-12) {
                return std::nullopt;
            }
        }
    }
    return k;
}

/// Closed-form progeny for an SBM with a common off-diagonal kernel entry k:
/// x_m = (1 + k alpha^T x) / (1 - alpha_m gamma_m) with gamma_m = K_mm - k.
/// Writing s = alpha^T x gives s = Q / (1 - k Q), Q = sum_m alpha_m / (1 - alpha_m gamma_m).
/// Returns nullopt when the off-diagonal entries differ.
inline std::optional<std::vector<double>> closed_form_progeny(const GraphModel& model) {
    const auto k = common_off_diagonal(model);
    if (!k) {
        return std::nullopt;
    }
    if (model.regime() != Regime::Subcritical) {
        throw RegimeError("closed_form_progeny: model is not subcritical");
    }
    const auto& p = model.sbm();
    const std::size_t S = p.alpha.size();
    std::vector<double> denom(S);
    double q = 0.0;
    for (std::size_t m = 0; m < S; ++m) {
        const auto mi = static_cast<Eigen::Index>(m);
        denom[m] = 1.0 - p.alpha[m] * (p.kernel(mi, mi) - *k);
        q += p.alpha[m] / denom[m];
    }
    const double s = q / (1.0 - *k * q);
    std::vector<double> x(S);
    for (std::size_t m = 0; m < S; ++m) {
        x[m] = (1.0 + *k * s) / denom[m];
    }
    return x;
}

/// Expected total progeny x solving x = e + A x (subcritical only).
///
/// SBM: the S x S system (I - M) x = e by LU with full pivoting; under a common
/// off-diagonal kernel entry the result is cross-checked against the closed form.
/// Chung–Lu: x_i = 1 + w_i s / n with s = sum_j w_j / (1 - lambda_max).
inline std::vector<double> expected_total_progeny(const GraphModel& model) {
    if (model.regime() != Regime::Subcritical) {
        throw RegimeError(std::string("expected_total_progeny: regime is ") + to_string(model.regime()) +
                          "; total progeny diverges");
    }
    if (model.kind() == ModelKind::ChungLu) {
        const auto& w = model.chung_lu().weights;
        const double n = static_cast<double>(model.n());
        const double s = model.weight_sum() / (1.0 - model.lambda_max());
        std::vector<double> x(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            x[i] = 1.0 + w[i] * s / n;
        }
        return x;
    }

    const Eigen::MatrixXd& M = model.reduced_kernel();
    const Eigen::MatrixXd system = Eigen::MatrixXd::Identity(M.rows(), M.cols()) - M;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) {
        throw NumericalError("expected_total_progeny: (I - M) is singular");
    }
    const Eigen::VectorXd sol = lu.solve(Eigen::VectorXd::Ones(M.rows()));
    std::vector<double> x(sol.data(), sol.data() + sol.size());

    if (const auto closed = closed_form_progeny(model)) {
        for (std::size_t m = 0; m < x.size(); ++m) {
            if (std::abs((*closed)[m] - x[m]) > 1e-9 * std::max(1.0, std::abs(x[m]))) {
                throw NumericalError("expected_total_progeny: elimination and closed form disagree");
            }
        }
    }
    return x;
}

/// Survival probabilities: the maximal fixed point of Phi.
///
/// Iterates f <- Phi(f) from f0 = eps a, where a is the Perron vector of the
/// kernel and eps = (1 - 1/lambda_max) / max(a). Phi(f0) >= f0 there, so the
/// iterates increase monotonically to the maximal fixed point.
inline std::vector<double> survival_probabilities(const GraphModel& model) {
    if (model.regime() != Regime::Supercritical) {
        throw RegimeError(std::string("survival_probabilities: regime is ") + to_string(model.regime()) +
                          "; survival probability is zero or undefined");
    }
    const auto& a = model.perron_vector();
    const double a_max = *std::max_element(a.begin(), a.end());
    const double eps = (1.0 - 1.0 / model.lambda_max()) / a_max;
    std::vector<double> seed(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        seed[i] = eps * a[i];
    }

    std::vector<double> f = seed;
    std::vector<double> next;
    std::size_t it = 0;
    for (; it < kFixedPointMaxIterations; ++it) {
        detail::apply_phi(model, f, next);
        const double change = detail::sup_distance(next, f);
        f.swap(next);
        if (change < kFixedPointTolerance) {
            break;
        }
    }
    if (it == kFixedPointMaxIterations) {
        throw NumericalError("survival_probabilities: no convergence after " + std::to_string(it) +
                             " iterations");
    }
    detail::apply_phi(model, f, next);
    if (detail::sup_distance(next, f) >= kFixedPointResidual) {
        throw NumericalError("survival_probabilities: residual above tolerance after " +
                             std::to_string(it) + " iterations");
    }
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < seed[i] || !(f[i] > 0.0 && f[i] < 1.0)) {
            throw NumericalError("survival_probabilities: iterate left (seed, 1)");
        }
    }
    return f;
}

inline BranchingSolution solve_branching(const GraphModel& model) {
    BranchingSolution sol;
    sol.kind = model.kind();
    sol.b = mean_offspring(model);
    sol.lambda_max = model.lambda_max();
    sol.regime = model.regime();
    switch (model.regime()) {
    case Regime::Subcritical:
        sol.x = expected_total_progeny(model);
        sol.rho.assign(model.num_types(), 0.0);
        break;
    case Regime::Supercritical:
        sol.rho = survival_probabilities(model);
        break;
    case Regime::Critical:
        break;
    }
    return sol;
}

/// Asymptotic prediction of E|C(v)| for a vertex of the given type.
///
/// Subcritical: x_type. Supercritical: rho_type * n * (mass of the giant
/// component), with mass sum_m alpha_m rho_m (SBM) or the vertex average of rho
/// (Chung–Lu). Both ignore O(1/n) resp. o(n) corrections.
inline double predicted_component_mean(const GraphModel& model, const BranchingSolution& sol,
                                       std::size_t type) {
    if (sol.regime != model.regime() || sol.kind != model.kind()) {
        throw RegimeError("predicted_component_mean: solution does not belong to this model");
    }
    if (type >= model.num_types()) {
        throw IndexError("predicted_component_mean: type out of range");
    }
    if (model.regime() == Regime::Subcritical) {
        return sol.x[type];
    }
    if (model.regime() == Regime::Critical) {
        throw RegimeError("predicted_component_mean: no prediction at criticality");
    }
    double giant = 0.0;
    if (model.kind() == ModelKind::Sbm) {
        const auto& alpha = model.sbm().alpha;
        for (std::size_t m = 0; m < alpha.size(); ++m) {
            giant += alpha[m] * sol.rho[m];
        }
    } else {
        for (double r : sol.rho) {
            giant += r;
        }
        giant /= static_cast<double>(sol.rho.size());
    }
    return sol.rho[type] * static_cast<double>(model.n()) * giant;
}

struct ProgenyOutcome {
    std::size_t total = 0;     // valid when !cap_exceeded
    bool cap_exceeded = false;
};

/// Monte Carlo multi-type Poisson Galton–Watson process W_A(start).
///
/// Generation by generation: the Z_l individuals of type l jointly produce
/// Poisson(sum_l Z_l A_lm) children of type m. For Chung–Lu the children of a
/// generation number Poisson((sum w / n) * sum of parent weights) and each picks
/// its type proportionally to w. Exceeding `cap` individuals ends the run with
/// cap_exceeded, which serves as the survival proxy.
class ProgenySimulator {
public:
    explicit ProgenySimulator(const GraphModel& model) : model_(&model) {
        if (model.kind() == ModelKind::ChungLu) {
            const auto& w = model.chung_lu().weights;
            pick_type_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
        }
    }

    template <class URBG>
    ProgenyOutcome run(std::size_t start_type, std::size_t cap, URBG& rng) {
        if (cap == 0) {
            throw DomainError("simulate_total_progeny: cap must be >= 1");
        }
        if (start_type >= model_->num_types()) {
            throw IndexError("simulate_total_progeny: start type out of range");
        }
        return model_->kind() == ModelKind::Sbm ? run_sbm(start_type, cap, rng)
                                                : run_chung_lu(start_type, cap, rng);
    }

private:
    template <class URBG>
    ProgenyOutcome run_sbm(std::size_t start_type, std::size_t cap, URBG& rng) {
        const Eigen::MatrixXd& M = model_->reduced_kernel();
        const auto S = static_cast<std::size_t>(M.rows());
        std::vector<double> generation(S, 0.0);
        std::vector<double> next(S, 0.0);
        generation[start_type] = 1.0;
        std::size_t total = 1;
        while (true) {
            std::size_t born = 0;
            for (std::size_t m = 0; m < S; ++m) {
                double mean = 0.0;
                for (std::size_t l = 0; l < S; ++l) {
                    mean += generation[l] * M(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(m));
                }
                std::poisson_distribution<std::int64_t> draw(mean);
                const auto k = mean > 0.0 ? static_cast<std::size_t>(draw(rng)) : 0;
                next[m] = static_cast<double>(k);
                born += k;
            }
            if (born == 0) {
                return {total, false};
            }
            total += born;
            if (total > cap) {
                return {0, true};
            }
            generation.swap(next);
        }
    }

    template <class URBG>
    ProgenyOutcome run_chung_lu(std::size_t start_type, std::size_t cap, URBG& rng) {
        const auto& w = model_->chung_lu().weights;
        const double scale = model_->weight_sum() / static_cast<double>(model_->n());
        double parent_weight = w[start_type];
        std::size_t total = 1;
        while (true) {
            std::poisson_distribution<std::int64_t> draw(scale * parent_weight);
            const auto born = static_cast<std::size_t>(draw(rng));
            if (born == 0) {
                return {total, false};
            }
            total += born;
            if (total > cap) {
                return {0, true};
            }
            parent_weight = 0.0;
            for (std::size_t c = 0; c < born; ++c) {
                parent_weight += w[pick_type_(rng)];
            }
        }
    }

    const GraphModel* model_;
    std::discrete_distribution<std::size_t> pick_type_;
};

template <class URBG>
ProgenyOutcome simulate_total_progeny(const GraphModel& model, std::size_t start_type, std::size_t cap,
                                      URBG& rng) {
    ProgenySimulator sim(model);
    return sim.run(start_type, cap, rng);
}

} // namespace locinf
