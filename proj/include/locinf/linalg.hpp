#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "locinf/errors.hpp"

namespace locinf {

struct DominantEigenpair {
    double value = 0.0;
    Eigen::VectorXd vector;  // unit 2-norm, componentwise nonnegative
    std::size_t iterations = 0;
    bool used_fallback = false;
};

inline constexpr double kPowerIterationTolerance = 1e-12;
inline constexpr std::size_t kPowerIterationMaxIterations = 100000;
inline constexpr Eigen::Index kDenseEigenFallbackLimit = 64;

/// Perron eigenpair of a symmetric matrix with strictly positive entries.
///
/// Runs power iteration until the Rayleigh quotient changes by less than
/// `kPowerIterationTolerance` relative to its magnitude. When the spectral gap
/// is too small to converge within the iteration cap, matrices up to
/// `kDenseEigenFallbackLimit` rows fall back to a dense self-adjoint eigensolve;
/// larger ones raise NumericalError.
inline DominantEigenpair dominant_eigenpair(const Eigen::MatrixXd& sym) {
    if (sym.rows() != sym.cols() || sym.rows() == 0) {
        throw ShapeError("dominant_eigenpair: matrix must be square and non-empty");
    }
    const Eigen::Index dim = sym.rows();
    Eigen::VectorXd v = Eigen::VectorXd::Constant(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
    double lambda = v.dot(sym * v);

    for (std::size_t it = 1; it <= kPowerIterationMaxIterations; ++it) {
        Eigen::VectorXd next = sym * v;
        const double norm = next.norm();
        if (!(norm > 0.0) || !std::isfinite(norm)) {
            throw NumericalError("dominant_eigenpair: iterate degenerated");
        }
        next /= norm;
        const double next_lambda = next.dot(sym * next);
        const bool converged =
            std::abs(next_lambda - lambda) <= kPowerIterationTolerance * std::abs(next_lambda) &&
            (next - v).lpNorm<Eigen::Infinity>() <= 1e-10;
        v = std::move(next);
        lambda = next_lambda;
        if (converged) {
            return {lambda, v.cwiseAbs(), it, false};
        }
    }

    if (dim > kDenseEigenFallbackLimit) {
        throw NumericalError("dominant_eigenpair: power iteration did not converge in " +
                             std::to_string(kPowerIterationMaxIterations) + " iterations");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("dominant_eigenpair: dense eigensolve failed");
    }
    const Eigen::Index top = dim - 1;  // eigenvalues sorted ascending
    Eigen::VectorXd vec = solver.eigenvectors().col(top).cwiseAbs();
    return {solver.eigenvalues()(top), vec / vec.norm(), kPowerIterationMaxIterations, true};
}

} // namespace locinf
