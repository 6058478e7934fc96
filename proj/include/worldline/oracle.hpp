#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <stdexcept>

#include "worldline/problem.hpp"

namespace worldline {

/// High-accuracy reference solution of the continuum Euler-Lagrange system
///   d/dgamma[(c^2 + 2V(x)/m) tdot] = 0,   xddot = -(V'(x)/m) tdot^2,
/// sampled at the coarse grid nodes.  error_bound is a step-doubling
/// (Richardson) estimate of the max-norm error in (t, x).
struct OracleSolution {
    Eigen::VectorXd t;
    Eigen::VectorXd x;
    Eigen::VectorXd tdot;
    Eigen::VectorXd xdot;
    double error_bound = 0.0;
    double first_integral_drift = 0.0;  // max deviation of (c^2+2V/m) tdot
    int steps_used = 0;
};

namespace detail {

using State4 = std::array<double, 4>;  // (t, tdot, x, xdot)

inline State4 el_rhs(const State4& y, const ProblemSpec& spec) {
    const double c2 = spec.physics.c * spec.physics.c;
    const double m = spec.physics.m;
    const double dV = spec.potential.deriv(y[2]);
    const double M = c2 + 2.0 * spec.potential.value(y[2]) / m;
    State4 f;
    f[0] = y[1];
    f[1] = -2.0 * dV * y[3] * y[1] / (m * M);
    f[2] = y[3];
    f[3] = -dV / m * y[1] * y[1];
    return f;
}

inline State4 rk4_step(const State4& y, double h, const ProblemSpec& spec) {
    auto axpy = [](const State4& a, double s, const State4& b) {
        State4 r;
        for (int i = 0; i < 4; ++i) r[i] = a[i] + s * b[i];
        return r;
    };
    const State4 k1 = el_rhs(y, spec);
    const State4 k2 = el_rhs(axpy(y, 0.5 * h, k1), spec);
    const State4 k3 = el_rhs(axpy(y, 0.5 * h, k2), spec);
    const State4 k4 = el_rhs(axpy(y, h, k3), spec);
    State4 r;
    for (int i = 0; i < 4; ++i) {
        r[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return r;
}

/// Integrates with `substeps` RK4 steps per coarse interval and records the
/// state at every coarse node.
inline void integrate_on_grid(const ProblemSpec& spec, int substeps, OracleSolution& out,
                              double* drift) {
    const Grid& g = spec.grid;
    const int n = g.n_gamma;
    out.t.resize(n);
    out.x.resize(n);
    out.tdot.resize(n);
    out.xdot.resize(n);
    State4 y = {spec.initial.t_i, spec.initial.tdot_i, spec.initial.x_i, spec.initial.xdot_i};
    const double c2 = spec.physics.c * spec.physics.c;
    const double m = spec.physics.m;
    const double q0 = spec.continuum_charge();
    double max_drift = 0.0;
    auto record = [&](int k) {
        out.t[k] = y[0];
        out.tdot[k] = y[1];
        out.x[k] = y[2];
        out.xdot[k] = y[3];
        const double q = (c2 + 2.0 * spec.potential.value(y[2]) / m) * y[1];
        max_drift = std::max(max_drift, std::abs(q - q0));
    };
    record(0);
    const double h = g.d_gamma / static_cast<double>(substeps);
    for (int k = 1; k < n; ++k) {
        for (int s = 0; s < substeps; ++s) {
            y = rk4_step(y, h, spec);
            if (!std::isfinite(y[0]) || !std::isfinite(y[2])) {
                throw std::runtime_error("oracle: non-finite state during integration");
            }
        }
        record(k);
    }
    if (drift) *drift = max_drift;
}

}  // namespace detail

inline OracleSolution oracle_solve(const ProblemSpec& spec, int n_dense = 0) {
    spec.validate();
    const int n = spec.grid.n_gamma;
    int substeps = 4;
    if (n_dense > 0) {
        substeps = std::max(1, (n_dense + n - 2) / (n - 1));
    }
    OracleSolution coarse, fine;
    double drift = 0.0;
    detail::integrate_on_grid(spec, substeps, coarse, nullptr);
    detail::integrate_on_grid(spec, 2 * substeps, fine, &drift);
    double err = std::max((coarse.t - fine.t).lpNorm<Eigen::Infinity>(),
                          (coarse.x - fine.x).lpNorm<Eigen::Infinity>()) /
                 15.0;
    const int max_doublings = 14;
    int doublings = 0;
    while (err > 1e-11 && doublings < max_doublings) {
        substeps *= 2;
        coarse = fine;
        detail::integrate_on_grid(spec, 2 * substeps, fine, &drift);
        err = std::max((coarse.t - fine.t).lpNorm<Eigen::Infinity>(),
                       (coarse.x - fine.x).lpNorm<Eigen::Infinity>()) /
              15.0;
        ++doublings;
    }
    fine.error_bound = err;
    fine.first_integral_drift = drift;
    fine.steps_used = 2 * substeps * (n - 1);
    return fine;
}

struct ConvergenceRow {
    int n_gamma = 0;
    double h = 0.0;
    double err_t = 0.0;
    double err_x = 0.0;
    bool solved = false;
    double epsilon_used = 0.0;
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double fitted_order = 0.0;  // least-squares slope of log(err) vs log(h)
    bool all_solved = true;
};

}  // namespace worldline
