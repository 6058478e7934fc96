#pragma once

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "worldline/convergence.hpp"
#include "worldline/diagnostics.hpp"
#include "worldline/reporting.hpp"

namespace worldline {

struct CriterionResult {
    std::string name;
    bool passed = false;
    std::string details;
};

namespace acceptance_detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline std::string fmt(double x) {
    std::ostringstream os;
    os.precision(3);
    os << std::scientific << x;
    return os.str();
}

struct Check {
    bool ok = true;
    std::ostringstream details;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            details << " FAILED[" << what << "]";
        }
    }
    void note(const std::string& what) { details << " " << what; }
};

inline ProblemSpec paper_problem(const PotentialSpec& pot, int n) {
    ProblemSpec spec;
    spec.grid = build_grid(0.0, 1.0, n);
    spec.potential = pot;
    spec.initial = {0.0, 1.0, 1.0, 0.1};
    return spec;
}

// ---------------------------------------------------------------------------
// 1. operator suite: SBP identity and polynomial exactness, n up to 512
// ---------------------------------------------------------------------------
inline CriterionResult criterion_operator_suite() {
    Check c;
    const auto t0 = Clock::now();
    double worst_identity = 0.0, worst_accuracy = 0.0, worst_quadrature = 0.0;
    for (int n : {8, 16, 32, 64, 128, 256, 512}) {
        const Grid grid = build_grid(0.0, 1.0, n);
        for (SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
            const SbpOperatorSet ops = build_sbp(order, grid);
            const Eigen::MatrixXd HD = ops.H.asDiagonal() * ops.D;
            worst_identity =
                std::max(worst_identity, (HD + HD.transpose() - ops.B()).cwiseAbs().maxCoeff());
            const int closure = order == SbpOrder::SBP21 ? 1 : 4;
            const int p_int = order == SbpOrder::SBP21 ? 2 : 4;
            const int p_bnd = order == SbpOrder::SBP21 ? 1 : 2;
            for (int p = 0; p <= p_int; ++p) {
                Eigen::VectorXd f(n), df(n);
                for (int k = 0; k < n; ++k) {
                    f[k] = std::pow(grid.nodes[k], p);
                    df[k] = p == 0 ? 0.0 : p * std::pow(grid.nodes[k], p - 1);
                }
                const Eigen::VectorXd err = ops.D * f - df;
                for (int k = 0; k < n; ++k) {
                    const bool boundary_row = k < closure || k >= n - closure;
                    if (p <= (boundary_row ? p_bnd : p_int)) {
                        worst_accuracy = std::max(worst_accuracy, std::abs(err[k]));
                    }
                }
            }
            // quadrature exactness up to the compatible degree
            const int q_deg = order == SbpOrder::SBP21 ? 1 : 3;
            for (int p = 0; p <= q_deg; ++p) {
                double integral = 0.0;
                for (int k = 0; k < n; ++k) integral += ops.H[k] * std::pow(grid.nodes[k], p);
                worst_quadrature =
                    std::max(worst_quadrature, std::abs(integral - 1.0 / (p + 1.0)));
            }
        }
    }
    const double secs = seconds_since(t0);
    c.require(worst_identity <= 1e-13, "SBP identity <= 1e-13");
    c.require(worst_accuracy <= 1e-12, "polynomial exactness <= 1e-12");
    c.require(worst_quadrature <= 1e-13, "quadrature exactness");
    c.require(secs < 1.0, "runtime < 1 s");
    c.note("identity=" + fmt(worst_identity) + " accuracy=" + fmt(worst_accuracy) +
           " quadrature=" + fmt(worst_quadrature) + " time=" + fmt(secs) + "s");
    return {"1 operator suite", c.ok, c.details.str()};
}

// ---------------------------------------------------------------------------
// 2. analytic gradient/Hessian vs central finite differences
// ---------------------------------------------------------------------------
inline CriterionResult criterion_derivative_consistency() {
    Check c;
    const auto t0 = Clock::now();
    std::mt19937 rng(20240811u);
    std::uniform_real_distribution<double> unif(-0.5, 0.5);
    const std::vector<PotentialSpec> pots = {
        PotentialSpec::free(), PotentialSpec::linear(0.25), PotentialSpec::quartic(0.25),
        PotentialSpec::polynomial({0.0, 0.1, 0.05, 0.0, 0.25})};
    double worst_g = 0.0, worst_h = 0.0;
    const int n = 16;
    for (const auto& pot : pots) {
        ProblemSpec spec = paper_problem(pot, n);
        const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
        for (int trial = 0; trial < 20; ++trial) {
            UnknownVector z = initial_guess(spec);
            for (Eigen::Index i = 0; i < z.size(); ++i) z.raw()[i] += unif(rng);
            const double step = 1e-6;
            const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
            Eigen::VectorXd g_fd(z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                UnknownVector zp = z, zm = z;
                zp.raw()[i] += step;
                zm.raw()[i] -= step;
                g_fd[i] =
                    (assemble_action(zp, ops, spec) - assemble_action(zm, ops, spec)) / (2 * step);
            }
            const double rel_g = (g - g_fd).lpNorm<Eigen::Infinity>() /
                                 std::max(1.0, g.lpNorm<Eigen::Infinity>());
            worst_g = std::max(worst_g, rel_g);

            const Eigen::MatrixXd Hs = assemble_hessian(z, ops, spec);
            Eigen::MatrixXd H_fd(z.size(), z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                UnknownVector zp = z, zm = z;
                zp.raw()[i] += step;
                zm.raw()[i] -= step;
                H_fd.col(i) = (assemble_gradient(zp, ops, spec) - assemble_gradient(zm, ops, spec)) /
                              (2 * step);
            }
            const double rel_h =
                (Hs - H_fd).cwiseAbs().maxCoeff() / std::max(1.0, Hs.cwiseAbs().maxCoeff());
            worst_h = std::max(worst_h, rel_h);
        }
    }
    const double secs = seconds_since(t0);
    c.require(worst_g <= 1e-6, "gradient FD relative error <= 1e-6");
    c.require(worst_h <= 1e-5, "Hessian FD relative error <= 1e-5");
    c.require(secs < 10.0, "runtime < 10 s");
    c.note("grad=" + fmt(worst_g) + " hess=" + fmt(worst_h) + " time=" + fmt(secs) + "s");
    return {"2 derivative consistency", c.ok, c.details.str()};
}

// ---------------------------------------------------------------------------
// 3 + 5. paper quartic runs, both operators, and the AMR property
// ---------------------------------------------------------------------------
struct QuarticRunChecks {
    CriterionResult main;
    CriterionResult amr;
};

inline QuarticRunChecks criterion_paper_quartic() {
    Check c, c_amr;
    const auto t0 = Clock::now();
    for (SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        const std::string tag = order == SbpOrder::SBP21 ? "SBP21" : "SBP42";
        ProblemSpec spec = paper_problem(PotentialSpec::quartic(0.25), 32);
        const SbpOperatorSet ops = build_sbp(order, spec.grid);
        SolverSettings settings;
        const PhysicalSolution sol = solve_physical(ops, spec, settings);
        c.require(sol.solve.converged && sol.solve.residual_norm <= 1e-12,
                  tag + " residual <= 1e-12");
        if (!sol.solve.converged) continue;
        const SbpOperatorSet dops = build_regularized(ops, sol.solve.epsilon_used);
        const DiagnosticsReport rep = run_diagnostics(sol.solve.z_star, dops, spec);
        const int n = spec.grid.n_gamma;
        double qdev = 0.0;
        for (int k = 0; k < n; ++k) qdev = std::max(qdev, std::abs(rep.Q[k] - rep.Q[0]));
        c.require(qdev <= 1e-9, tag + " (a) charge constancy <= 1e-9");
        c.require(std::abs(rep.Q[0] - 1.5) <= 1e-10, tag + " (b) |Q_1 - 1.5| <= 1e-10");
        c.require(std::abs(rep.lambda[1]) <= 1e-10, tag + " (c) |lambda_2| <= 1e-10");
        c.require(rep.dG_t.cwiseAbs().maxCoeff() <= 1e-9, tag + " (d) dG_t <= 1e-9 everywhere");
        const double dgx_interior = rep.dG_x.head(n - 1).cwiseAbs().maxCoeff();
        const double dgx_last = std::abs(rep.dG_x[n - 1]);
        c.require(dgx_interior <= 1e-9 && dgx_last > 1e-9,
                  tag + " (e) dG_x localized to last node");
        c.note(tag + ":dG_x[N]=" + fmt(rep.dG_x[n - 1]));
        // (f) naive residuals confined to exactly the last two nodes
        const struct {
            const Eigen::VectorXd* r;
            const char* which;
        } naive[] = {{&rep.dG_t_naive, "t"}, {&rep.dG_x_naive, "x"}};
        for (const auto& nv : naive) {
            const double before = nv.r->head(n - 2).cwiseAbs().maxCoeff();
            c.require(before <= 1e-9, tag + " (f) naive dG_" + nv.which +
                                          " zero before last two nodes, max=" + fmt(before));
            c.require(std::abs((*nv.r)[n - 2]) > 1e-9 && std::abs((*nv.r)[n - 1]) > 1e-9,
                      tag + " (f) naive dG_" + std::string(nv.which) +
                          " nonzero at last two nodes");
        }
        c.require(rep.branch_gap_x <= 1e-9, tag + " (g) branch gap <= 1e-9");
        c.note(tag + ":qdev=" + fmt(qdev) + " l2=" + fmt(rep.lambda[1]) +
               " gap=" + fmt(rep.branch_gap_x));

        // 5. AMR property on the same solve
        c_amr.require(rep.amr.ratio > 1.01, tag + " spacing ratio > 1.01");
        c_amr.require(std::abs(rep.amr.min_spacing_index - rep.amr.max_curvature_index) <= 2,
                      tag + " min spacing within 2 nodes of max curvature");
        c_amr.note(tag + ":ratio=" + fmt(rep.amr.ratio) + " idx=(" +
                   std::to_string(rep.amr.min_spacing_index) + "," +
                   std::to_string(rep.amr.max_curvature_index) + ")");
    }
    const double secs = seconds_since(t0);
    c.require(secs < 30.0, "runtime < 30 s");
    QuarticRunChecks out;
    out.main = {"3 paper quartic run", c.ok, c.details.str()};
    out.amr = {"5 emergent AMR", c_amr.ok, c_amr.details.str()};
    return out;
}

// ---------------------------------------------------------------------------
// 4. linear potential: charge criteria verbatim
// ---------------------------------------------------------------------------
inline CriterionResult criterion_linear_potential() {
    Check c;
    const auto t0 = Clock::now();
    for (SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        const std::string tag = order == SbpOrder::SBP21 ? "SBP21" : "SBP42";
        ProblemSpec spec = paper_problem(PotentialSpec::linear(0.25), 32);
        const SbpOperatorSet ops = build_sbp(order, spec.grid);
        SolverSettings settings;
        const PhysicalSolution sol = solve_physical(ops, spec, settings);
        c.require(sol.solve.converged && sol.solve.residual_norm <= 1e-12,
                  tag + " residual <= 1e-12");
        if (!sol.solve.converged) continue;
        const SbpOperatorSet dops = build_regularized(ops, sol.solve.epsilon_used);
        const DiagnosticsReport rep = run_diagnostics(sol.solve.z_star, dops, spec);
        double qdev = 0.0;
        for (int k = 0; k < spec.grid.n_gamma; ++k) {
            qdev = std::max(qdev, std::abs(rep.Q[k] - rep.Q[0]));
        }
        c.require(qdev <= 1e-9, tag + " (a) charge constancy <= 1e-9");
        c.require(std::abs(rep.Q[0] - 1.5) <= 1e-10, tag + " (b) |Q_1 - 1.5| <= 1e-10");
        c.require(std::abs(rep.lambda[1]) <= 1e-10, tag + " (c) |lambda_2| <= 1e-10");
        c.note(tag + ":qdev=" + fmt(qdev));
    }
    const double secs = seconds_since(t0);
    c.require(secs < 30.0, "runtime < 30 s");
    return {"4 linear potential", c.ok, c.details.str()};
}

// ---------------------------------------------------------------------------
// 6. convergence against the ODE oracle
// ---------------------------------------------------------------------------
inline CriterionResult criterion_convergence() {
    Check c;
    const auto t0 = Clock::now();
    ProblemSpec spec = paper_problem(PotentialSpec::quartic(0.25), 32);
    const OracleSolution oracle = oracle_solve(spec);
    c.require(oracle.first_integral_drift <= 1e-10, "oracle first-integral drift <= 1e-10");
    c.require(oracle.error_bound <= 1e-10, "oracle error bound <= 1e-10");
    SolverSettings settings;
    const std::vector<int> n_list = {16, 32, 64, 128};
    const ConvergenceStudy s21 = convergence_study(spec, SbpOrder::SBP21, n_list, settings);
    const ConvergenceStudy s42 = convergence_study(spec, SbpOrder::SBP42, n_list, settings);
    c.require(s21.all_solved && s42.all_solved, "all refinement solves converged");
    c.require(s21.fitted_order >= 1.8, "SBP21 fitted order >= 1.8");
    c.require(s42.fitted_order >= 2.5, "SBP42 fitted order >= 2.5");
    const double secs = seconds_since(t0);
    c.require(secs < 120.0, "runtime < 2 min");
    c.note("orders=(" + fmt(s21.fitted_order) + "," + fmt(s42.fitted_order) +
           ") drift=" + fmt(oracle.first_integral_drift) + " time=" + fmt(secs) + "s");
    return {"6 convergence order", c.ok, c.details.str()};
}

// ---------------------------------------------------------------------------
// 7. free particle equals the analytic ramp
// ---------------------------------------------------------------------------
inline CriterionResult criterion_free_particle() {
    Check c;
    const auto t0 = Clock::now();
    double worst_traj = 0.0, worst_q = 0.0;
    for (SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        for (int n : {8, 16, 32, 64, 128}) {
            ProblemSpec spec = paper_problem(PotentialSpec::free(), n);
            const SbpOperatorSet ops = build_sbp(order, spec.grid);
            SolverSettings settings;
            const PhysicalSolution sol = solve_physical(ops, spec, settings);
            c.require(sol.solve.converged, "free solve converged");
            if (!sol.solve.converged) continue;
            const Eigen::VectorXd ramp_t = spec.grid.nodes;
            const Eigen::VectorXd ramp_x =
                Eigen::VectorXd::Constant(n, 1.0) + 0.1 * spec.grid.nodes;
            worst_traj = std::max(worst_traj, (sol.t - ramp_t).lpNorm<Eigen::Infinity>());
            worst_traj = std::max(worst_traj, (sol.x - ramp_x).lpNorm<Eigen::Infinity>());
            const SbpOperatorSet dops = build_regularized(ops, sol.solve.epsilon_used);
            const Eigen::VectorXd Q = noether_charge(sol.solve.z_star, dops, spec);
            worst_q = std::max(worst_q, (Q.array() - 1.0).abs().maxCoeff());
        }
    }
    const double secs = seconds_since(t0);
    c.require(worst_traj <= 1e-12, "trajectory equals ramp <= 1e-12");
    c.require(worst_q <= 1e-12, "charge equals c^2 tdot_i <= 1e-12");
    c.require(secs < 5.0, "runtime < 5 s");
    c.note("traj=" + fmt(worst_traj) + " charge=" + fmt(worst_q) + " time=" + fmt(secs) + "s");
    return {"7 free particle", c.ok, c.details.str()};
}

}  // namespace acceptance_detail

/// Runs the full acceptance suite; one result per criterion.
inline std::vector<CriterionResult> run_acceptance_suite() {
    namespace ad = acceptance_detail;
    std::vector<CriterionResult> results;
    results.push_back(ad::criterion_operator_suite());
    results.push_back(ad::criterion_derivative_consistency());
    ad::QuarticRunChecks q = ad::criterion_paper_quartic();
    results.push_back(q.main);
    results.push_back(ad::criterion_linear_potential());
    results.push_back(q.amr);
    results.push_back(ad::criterion_convergence());
    results.push_back(ad::criterion_free_particle());
    return results;
}

}  // namespace worldline
