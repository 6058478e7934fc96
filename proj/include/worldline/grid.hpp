#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace worldline {

/// Uniform world-line parameter mesh on [gamma_i, gamma_f].
struct Grid {
    int n_gamma = 0;
    double gamma_i = 0.0;
    double gamma_f = 1.0;
    double d_gamma = 0.0;
    Eigen::VectorXd nodes;
};

/// Builds the equidistant grid with spacing (gamma_f - gamma_i)/(n_gamma - 1).
/// Operator-order minimum sizes are checked downstream in build_sbp().
inline Grid build_grid(double gamma_i, double gamma_f, int n_gamma) {
    if (!(gamma_f > gamma_i)) {
        throw std::invalid_argument("build_grid: gamma_f must exceed gamma_i");
    }
    if (n_gamma < 2) {
        throw std::invalid_argument("build_grid: need at least two nodes");
    }
    Grid g;
    g.n_gamma = n_gamma;
    g.gamma_i = gamma_i;
    g.gamma_f = gamma_f;
    g.d_gamma = (gamma_f - gamma_i) / static_cast<double>(n_gamma - 1);
    g.nodes.resize(n_gamma);
    for (int k = 0; k < n_gamma; ++k) {
        g.nodes[k] = gamma_i + g.d_gamma * static_cast<double>(k);
    }
    g.nodes[n_gamma - 1] = gamma_f;
    return g;
}

}  // namespace worldline
