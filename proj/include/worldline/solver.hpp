#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "worldline/action.hpp"

namespace worldline {

struct SolverSettings {
    double residual_tol = 1e-12;   // max-norm of the full gradient
    int max_iters = 200;
    double damping = 0.5;          // backtracking factor
    double min_step = 1e-10;       // smallest line-search step
    // decreasing regularization strengths; the solver picks the smallest one
    // whose Newton matrix is numerically nonsingular (rcond >= 1e-12)
    std::vector<double> epsilon_ladder;
    double rcond_floor = 1e-12;

    std::vector<double> ladder_for(double d_gamma) const {
        if (!epsilon_ladder.empty()) return epsilon_ladder;
        const double h = d_gamma;
        return {h, h * h, h * h * h, 0.0};
    }

    void validate() const {
        if (!(residual_tol > 0.0)) throw std::invalid_argument("solver: residual_tol must be positive");
        if (!(damping > 0.0 && damping < 1.0)) throw std::invalid_argument("solver: damping must be in (0,1)");
        if (max_iters < 1) throw std::invalid_argument("solver: max_iters must be positive");
    }
};

struct SolveResult {
    UnknownVector z_star;
    double residual_norm = 0.0;
    int iterations = 0;
    double epsilon_used = 0.0;
    bool converged = false;
    bool epsilon_escalated = false;
    std::string message;
    std::vector<double> residual_history;
};

/// Linear ramps from the initial data on both branches, all multipliers zero.
/// Satisfies the four initial-condition constraints exactly (D is exact on
/// linear functions) and the connecting conditions trivially.
inline UnknownVector initial_guess(const ProblemSpec& spec) {
    const Grid& g = spec.grid;
    UnknownVector z(g.n_gamma);
    const Eigen::VectorXd ramp_t =
        Eigen::VectorXd::Constant(g.n_gamma, spec.initial.t_i) +
        spec.initial.tdot_i * (g.nodes.array() - g.gamma_i).matrix();
    const Eigen::VectorXd ramp_x =
        Eigen::VectorXd::Constant(g.n_gamma, spec.initial.x_i) +
        spec.initial.xdot_i * (g.nodes.array() - g.gamma_i).matrix();
    z.t1() = ramp_t;
    z.t2() = ramp_t;
    z.x1() = ramp_x;
    z.x2() = ramp_x;
    return z;
}

namespace detail {

struct NewtonAttempt {
    bool converged = false;
    bool singular = false;
    bool line_search_failed = false;
    bool non_finite = false;
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> history;
};

/// Damped Newton on grad(z) = 0 with residual-norm backtracking.  The action
/// is an indefinite saddle, so progress is measured on the gradient max-norm
/// only, never on the action value.
inline NewtonAttempt newton_iterate(UnknownVector& z, const SbpOperatorSet& ops,
                                    const ProblemSpec& spec, const SolverSettings& s) {
    NewtonAttempt out;
    Eigen::VectorXd g = assemble_gradient(z, ops, spec);
    double res = g.lpNorm<Eigen::Infinity>();
    out.history.push_back(res);
    if (!std::isfinite(res)) {
        out.non_finite = true;
        return out;
    }
    for (int it = 0; it < s.max_iters; ++it) {
        if (res <= s.residual_tol) {
            // one polishing step if it still improves the residual
            const Eigen::MatrixXd Hs = assemble_hessian(z, ops, spec);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(Hs);
            if (lu.rcond() >= s.rcond_floor) {
                const Eigen::VectorXd step = lu.solve(-g);
                UnknownVector z_try(z.n_gamma(), z.raw() + step);
                const Eigen::VectorXd g_try = assemble_gradient(z_try, ops, spec);
                const double res_try = g_try.lpNorm<Eigen::Infinity>();
                if (std::isfinite(res_try) && res_try < res) {
                    z = z_try;
                    g = g_try;
                    res = res_try;
                    out.history.push_back(res);
                }
            }
            out.converged = true;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        const Eigen::MatrixXd Hs = assemble_hessian(z, ops, spec);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(Hs);
        if (lu.rcond() < s.rcond_floor) {
            out.singular = true;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        const Eigen::VectorXd step = lu.solve(-g);
        if (!step.allFinite()) {
            out.non_finite = true;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= s.min_step) {
            UnknownVector z_try(z.n_gamma(), z.raw() + alpha * step);
            const Eigen::VectorXd g_try = assemble_gradient(z_try, ops, spec);
            const double res_try = g_try.lpNorm<Eigen::Infinity>();
            if (std::isfinite(res_try) && res_try < res) {
                z = z_try;
                g = g_try;
                res = res_try;
                accepted = true;
                break;
            }
            alpha *= s.damping;
        }
        if (!accepted) {
            out.line_search_failed = true;
            out.residual = res;
            out.iterations = it;
            return out;
        }
        out.history.push_back(res);
    }
    out.residual = res;
    out.iterations = s.max_iters;
    out.converged = res <= s.residual_tol;
    return out;
}

}  // namespace detail

/// Newton solve at the regularization already baked into `ops.D_reg`; the
/// epsilon ladder is not consulted.  Used for continuation studies.
inline SolveResult newton_solve_fixed(const UnknownVector& z0, const SbpOperatorSet& ops,
                                      const ProblemSpec& spec, const SolverSettings& settings) {
    settings.validate();
    spec.validate();
    SolveResult result;
    UnknownVector z = z0;
    detail::NewtonAttempt a = detail::newton_iterate(z, ops, spec, settings);
    result.z_star = z;
    result.residual_norm = a.residual;
    result.iterations = a.iterations;
    result.epsilon_used = ops.epsilon;
    result.converged = a.converged;
    result.residual_history = a.history;
    if (a.singular) result.message = "Newton matrix numerically singular";
    if (a.line_search_failed) result.message = "line search failed";
    if (a.non_finite) result.message = "non-finite values encountered";
    return result;
}

/// Finds the critical point of the discrete action.  Tries the smallest
/// regularization first (default 0); if the Newton matrix is numerically
/// singular or the iteration stalls, ascends the epsilon ladder and then
/// re-descends with warm starts, reporting the epsilon actually used.
inline SolveResult newton_solve(const UnknownVector& z0, const SbpOperatorSet& base_ops,
                                const ProblemSpec& spec, const SolverSettings& settings) {
    settings.validate();
    spec.validate();
    std::vector<double> ladder = settings.ladder_for(spec.grid.d_gamma);  // decreasing
    SolveResult result;
    result.z_star = z0;

    // first attempt: smallest rung directly
    {
        const double eps = ladder.back();
        SbpOperatorSet ops = build_regularized(base_ops, eps);
        UnknownVector z = z0;
        detail::NewtonAttempt a = detail::newton_iterate(z, ops, spec, settings);
        if (a.converged) {
            result.z_star = z;
            result.residual_norm = a.residual;
            result.iterations = a.iterations;
            result.epsilon_used = eps;
            result.converged = true;
            result.residual_history = a.history;
            return result;
        }
        if (a.non_finite) {
            result.message = "non-finite values encountered at epsilon=" + std::to_string(eps);
        }
    }

    // escalation: solve from the largest rung down, warm-starting each rung
    result.epsilon_escalated = true;
    UnknownVector z = z0;
    bool have_solution = false;
    double eps_used = ladder.front();
    detail::NewtonAttempt last;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double eps = ladder[i];
        SbpOperatorSet ops = build_regularized(base_ops, eps);
        UnknownVector z_rung = have_solution ? z : z0;
        detail::NewtonAttempt a = detail::newton_iterate(z_rung, ops, spec, settings);
        if (a.converged) {
            z = z_rung;
            have_solution = true;
            eps_used = eps;
            last = a;
        } else if (have_solution) {
            break;  // keep the smallest epsilon that converged
        }
    }
    if (have_solution) {
        result.z_star = z;
        result.residual_norm = last.residual;
        result.iterations = last.iterations;
        result.epsilon_used = eps_used;
        result.converged = true;
        result.residual_history = last.history;
        result.message = "epsilon ladder engaged, epsilon=" + std::to_string(eps_used);
        return result;
    }
    result.converged = false;
    result.residual_norm = last.residual;
    if (result.message.empty()) {
        result.message = "Newton iteration failed on every epsilon rung";
    }
    return result;
}

struct PhysicalSolution {
    SolveResult solve;
    Eigen::VectorXd t;  // forward branch
    Eigen::VectorXd x;
    double branch_gap_t = 0.0;
    double branch_gap_x = 0.0;
    bool physical = false;
};

/// Solves and checks the physical limit: forward and backward branches must
/// coincide.  On a coincidence failure the solve is retried once from a
/// deterministically perturbed guess.
inline PhysicalSolution solve_physical(const SbpOperatorSet& ops, const ProblemSpec& spec,
                                       const SolverSettings& settings) {
    PhysicalSolution out;
    const double gap_tol = 100.0 * settings.residual_tol;
    UnknownVector guess = initial_guess(spec);
    for (int attempt = 0; attempt < 2; ++attempt) {
        out.solve = newton_solve(guess, ops, spec, settings);
        if (out.solve.converged) {
            const UnknownVector& z = out.solve.z_star;
            out.branch_gap_t = (z.t1() - z.t2()).lpNorm<Eigen::Infinity>();
            out.branch_gap_x = (z.x1() - z.x2()).lpNorm<Eigen::Infinity>();
            out.t = z.t1();
            out.x = z.x1();
            out.physical = out.branch_gap_t <= gap_tol && out.branch_gap_x <= gap_tol;
            if (out.physical) return out;
        }
        // deterministic perturbation of the interior nodes
        guess = initial_guess(spec);
        const int n = guess.n_gamma();
        for (int k = 1; k < n - 1; ++k) {
            const double bump = 1e-3 * std::sin(2.5 * static_cast<double>(k));
            guess.t1()[k] += bump;
            guess.t2()[k] += bump;
            guess.x1()[k] -= bump;
            guess.x2()[k] -= bump;
        }
    }
    return out;
}

}  // namespace worldline
