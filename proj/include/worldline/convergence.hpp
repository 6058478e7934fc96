#pragma once

#include <cmath>
#include <vector>

#include "worldline/oracle.hpp"
#include "worldline/solver.hpp"

namespace worldline {

/// Solves the problem on each grid size, compares the forward branch against
/// the ODE oracle at the nodes and fits the convergence order from the
/// max-norm errors.
inline ConvergenceStudy convergence_study(const ProblemSpec& base, SbpOrder order,
                                          const std::vector<int>& n_list,
                                          const SolverSettings& settings) {
    ConvergenceStudy study;
    std::vector<double> log_h, log_e;
    for (int n : n_list) {
        ConvergenceRow row;
        row.n_gamma = n;
        ProblemSpec spec = base;
        spec.grid = build_grid(base.grid.gamma_i, base.grid.gamma_f, n);
        row.h = spec.grid.d_gamma;
        SbpOperatorSet ops = build_sbp(order, spec.grid);
        PhysicalSolution sol = solve_physical(ops, spec, settings);
        if (sol.solve.converged && sol.physical) {
            OracleSolution oracle = oracle_solve(spec);
            row.err_t = (sol.t - oracle.t).lpNorm<Eigen::Infinity>();
            row.err_x = (sol.x - oracle.x).lpNorm<Eigen::Infinity>();
            row.solved = true;
            row.epsilon_used = sol.solve.epsilon_used;
            const double err = std::max(row.err_t, row.err_x);
            if (err > 0.0) {
                log_h.push_back(std::log(row.h));
                log_e.push_back(std::log(err));
            }
        } else {
            study.all_solved = false;
        }
        study.rows.push_back(row);
    }
    // least-squares slope
    if (log_h.size() >= 2) {
        const double k = static_cast<double>(log_h.size());
        double sh = 0.0, se = 0.0, shh = 0.0, she = 0.0;
        for (std::size_t i = 0; i < log_h.size(); ++i) {
            sh += log_h[i];
            se += log_e[i];
            shh += log_h[i] * log_h[i];
            she += log_h[i] * log_e[i];
        }
        study.fitted_order = (k * she - sh * se) / (k * shh - sh * sh);
    }
    return study;
}

}  // namespace worldline
