#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "worldline/grid.hpp"

namespace worldline {

enum class SbpOrder { SBP21, SBP42 };

inline int min_nodes(SbpOrder order) {
    return order == SbpOrder::SBP21 ? 4 : 8;
}

/// First-derivative SBP operator pair on a uniform grid.
///
/// D approximates d/dgamma, H is the diagonal positive quadrature norm and
/// B = diag(-1, 0, ..., 0, 1).  The pair satisfies the summation-by-parts
/// identity HD + (HD)^T = B, the discrete analogue of integration by parts.
/// D_reg = D + epsilon * H^{-1} Ds^T Ds adds null-space-preserving artificial
/// dissipation built from undivided differences Ds of order s (s = 2 for
/// SBP21, s = 3 for SBP42); D_reg -> D as epsilon -> 0.
struct SbpOperatorSet {
    SbpOrder order = SbpOrder::SBP21;
    int n = 0;
    double d_gamma = 0.0;
    double epsilon = 0.0;
    Eigen::MatrixXd D;
    Eigen::VectorXd H;      // diagonal of the norm matrix
    Eigen::MatrixXd D_reg;  // equals D when epsilon == 0

    Eigen::MatrixXd B() const {
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
        b(0, 0) = -1.0;
        b(n - 1, n - 1) = 1.0;
        return b;
    }
};

namespace detail {

inline Eigen::MatrixXd sbp21_derivative(int n, double h) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    D(0, 0) = -1.0 / h;
    D(0, 1) = 1.0 / h;
    for (int i = 1; i < n - 1; ++i) {
        D(i, i - 1) = -0.5 / h;
        D(i, i + 1) = 0.5 / h;
    }
    D(n - 1, n - 2) = -1.0 / h;
    D(n - 1, n - 1) = 1.0 / h;
    return D;
}

// Standard diagonal-norm fourth-order closure (four boundary rows).
inline Eigen::MatrixXd sbp42_derivative(int n, double h) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
    const double top[4][6] = {
        {-24.0 / 17.0, 59.0 / 34.0, -4.0 / 17.0, -3.0 / 34.0, 0.0, 0.0},
        {-1.0 / 2.0, 0.0, 1.0 / 2.0, 0.0, 0.0, 0.0},
        {4.0 / 43.0, -59.0 / 86.0, 0.0, 59.0 / 86.0, -4.0 / 43.0, 0.0},
        {3.0 / 98.0, 0.0, -59.0 / 98.0, 0.0, 32.0 / 49.0, -4.0 / 49.0}};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 6; ++j) {
            D(i, j) = top[i][j] / h;
            D(n - 1 - i, n - 1 - j) = -top[i][j] / h;
        }
    }
    for (int i = 4; i < n - 4; ++i) {
        D(i, i - 2) = 1.0 / (12.0 * h);
        D(i, i - 1) = -2.0 / (3.0 * h);
        D(i, i + 1) = 2.0 / (3.0 * h);
        D(i, i + 2) = -1.0 / (12.0 * h);
    }
    return D;
}

// Undivided difference of order s, rows (n - s) x n, binomial stencil.
inline Eigen::MatrixXd undivided_difference(int n, int s) {
    Eigen::MatrixXd Ds = Eigen::MatrixXd::Zero(n - s, n);
    // binomial coefficients with alternating sign, e.g. s=2: (1,-2,1)
    Eigen::VectorXd w(s + 1);
    w[0] = 1.0;
    for (int j = 0; j < s; ++j) {
        for (int k = j + 1; k > 0; --k) {
            w[k] = (k <= j ? w[k] : 0.0) - w[k - 1];
        }
    }
    for (int i = 0; i + s < n; ++i) {
        for (int j = 0; j <= s; ++j) {
            Ds(i, i + j) = w[s - j];
        }
    }
    return Ds;
}

}  // namespace detail

inline SbpOperatorSet build_sbp(SbpOrder order, const Grid& grid) {
    const int n = grid.n_gamma;
    if (n < min_nodes(order)) {
        throw std::invalid_argument("build_sbp: grid too small for operator order");
    }
    SbpOperatorSet ops;
    ops.order = order;
    ops.n = n;
    ops.d_gamma = grid.d_gamma;
    ops.epsilon = 0.0;
    const double h = grid.d_gamma;
    if (order == SbpOrder::SBP21) {
        ops.D = detail::sbp21_derivative(n, h);
        ops.H = Eigen::VectorXd::Constant(n, h);
        ops.H[0] = 0.5 * h;
        ops.H[n - 1] = 0.5 * h;
    } else {
        ops.D = detail::sbp42_derivative(n, h);
        ops.H = Eigen::VectorXd::Constant(n, h);
        const double hw[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
        for (int i = 0; i < 4; ++i) {
            ops.H[i] = hw[i] * h;
            ops.H[n - 1 - i] = hw[i] * h;
        }
    }
    ops.D_reg = ops.D;
    return ops;
}

/// Returns a copy of `ops` with D_reg = D + epsilon * H^{-1} Ds^T Ds.
inline SbpOperatorSet build_regularized(const SbpOperatorSet& ops, double epsilon) {
    if (epsilon < 0.0) {
        throw std::invalid_argument("build_regularized: epsilon must be non-negative");
    }
    SbpOperatorSet out = ops;
    out.epsilon = epsilon;
    if (epsilon == 0.0) {
        out.D_reg = ops.D;
        return out;
    }
    const int s = ops.order == SbpOrder::SBP21 ? 2 : 3;
    const Eigen::MatrixXd Ds = detail::undivided_difference(ops.n, s);
    out.D_reg = ops.D + epsilon * ops.H.cwiseInverse().asDiagonal() * (Ds.transpose() * Ds);
    return out;
}

/// Discrete delta at node k (1-based): d_k = H^{-1} e_k, so f^T H d_k = f[k].
struct LiftingVector {
    int k = 1;  // 1-based node index
    Eigen::VectorXd values;
};

inline LiftingVector lifting(const SbpOperatorSet& ops, int k) {
    if (k < 1 || k > ops.n) {
        throw std::out_of_range("lifting: node index out of range");
    }
    LiftingVector d;
    d.k = k;
    d.values = Eigen::VectorXd::Zero(ops.n);
    d.values[k - 1] = 1.0 / ops.H[k - 1];
    return d;
}

}  // namespace worldline
