#pragma once

#include <vector>

#include <Eigen/Dense>

#include "locinf/graph_models.hpp"

namespace testing_models {

inline locinf::GraphModel sbm(std::size_t n, std::vector<double> alpha, std::vector<double> k_rowmajor) {
    const auto s = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd k(s, s);
    for (Eigen::Index i = 0; i < s; ++i)
        for (Eigen::Index j = 0; j < s; ++j) k(i, j) = k_rowmajor[static_cast<std::size_t>(i * s + j)];
    return locinf::classify_regime(locinf::SbmParams{n, std::move(alpha), k});
}

// x = (4, 3), lambda = (5 + sqrt 5) / 10
inline locinf::GraphModel subcritical(std::size_t n = 1000) { return sbm(n, {0.5, 0.5}, {1.2, 0.4, 0.4, 0.8}); }

inline locinf::GraphModel supercritical(std::size_t n = 5000) { return sbm(n, {0.5, 0.5}, {3, 1, 1, 2}); }

inline locinf::GraphModel single(std::size_t n, double k) { return sbm(n, {1.0}, {k}); }

inline locinf::GraphModel chung_lu(std::vector<double> w) {
    const std::size_t n = w.size();
    return locinf::classify_regime(locinf::ChungLuParams{n, std::move(w)});
}

} // namespace testing_models
