#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "worldline/config.hpp"
#include "worldline/convergence.hpp"
#include "worldline/diagnostics.hpp"

namespace worldline {

enum class RunStatus { Converged = 0, ConfigError = 1, NotConverged = 2 };

struct RunArtifacts {
    RunStatus status = RunStatus::Converged;
    PhysicalSolution solution;
    DiagnosticsReport diagnostics;
    std::string trajectory_csv;
    std::string summary_text;
    std::string config_echo_text;
    std::string out_dir;
};

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path.string() + "'");
    f << content;
}

inline std::string matrix_text(const Eigen::MatrixXd& M) {
    std::ostringstream out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            out << (j ? " " : "") << fmt17(M(i, j));
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace detail

/// Combined trajectory/diagnostics table, comma separated, 17 significant
/// digits, one row per grid node.
inline std::string trajectory_table(const Grid& grid, const UnknownVector& z,
                                    const DiagnosticsReport& rep) {
    using detail::fmt17;
    std::ostringstream out;
    out << "k,gamma,t,x,dt_spacing,Q,delta_E,dG_t,dG_x,dG_t_naive,dG_x_naive\n";
    for (int k = 0; k < grid.n_gamma; ++k) {
        out << k << ',' << fmt17(grid.nodes[k]) << ',' << fmt17(z.t1()[k]) << ','
            << fmt17(z.x1()[k]) << ',' << fmt17(rep.amr.dt_spacing[k]) << ',' << fmt17(rep.Q[k])
            << ',' << fmt17(rep.delta_E[k]) << ',' << fmt17(rep.dG_t[k]) << ','
            << fmt17(rep.dG_x[k]) << ',' << fmt17(rep.dG_t_naive[k]) << ','
            << fmt17(rep.dG_x_naive[k]) << "\n";
    }
    return out.str();
}

inline std::string summary_text(const RunConfig& cfg, const PhysicalSolution& sol,
                                const DiagnosticsReport& rep) {
    using detail::fmt17;
    const int n = cfg.n_gamma;
    std::ostringstream out;
    out << "converged = " << (sol.solve.converged ? 1 : 0) << "\n";
    out << "physical = " << (sol.physical ? 1 : 0) << "\n";
    out << "residual_norm = " << fmt17(sol.solve.residual_norm) << "\n";
    out << "iterations = " << sol.solve.iterations << "\n";
    out << "epsilon_used = " << fmt17(sol.solve.epsilon_used) << "\n";
    out << "epsilon_escalated = " << (sol.solve.epsilon_escalated ? 1 : 0) << "\n";
    for (int j = 0; j < 8; ++j) {
        out << "lambda_" << (j + 1) << " = " << fmt17(rep.lambda[j]) << "\n";
    }
    double qdev = 0.0;
    for (int k = 0; k < n; ++k) qdev = std::max(qdev, std::abs(rep.Q[k] - rep.Q[0]));
    out << "Q_1 = " << fmt17(rep.Q[0]) << "\n";
    out << "continuum_charge = " << fmt17(rep.continuum_charge) << "\n";
    out << "max_charge_dev = " << fmt17(qdev) << "\n";
    out << "max_abs_delta_E = " << fmt17(rep.delta_E.cwiseAbs().maxCoeff()) << "\n";
    out << "max_abs_dG_t = " << fmt17(rep.dG_t.cwiseAbs().maxCoeff()) << "\n";
    out << "max_abs_dG_x_interior = " << fmt17(rep.dG_x.head(n - 1).cwiseAbs().maxCoeff()) << "\n";
    out << "dG_x_last_node = " << fmt17(rep.dG_x[n - 1]) << "\n";
    out << "branch_gap_t = " << fmt17(rep.branch_gap_t) << "\n";
    out << "branch_gap_x = " << fmt17(rep.branch_gap_x) << "\n";
    out << "amr_ratio = " << fmt17(rep.amr.ratio) << "\n";
    out << "amr_min_spacing_index = " << rep.amr.min_spacing_index << "\n";
    out << "amr_max_curvature_index = " << rep.amr.max_curvature_index << "\n";
    out << "t_final = " << fmt17(sol.solve.z_star.t1()[n - 1]) << "\n";
    out << "x_final = " << fmt17(sol.solve.z_star.x1()[n - 1]) << "\n";
    out << "\n[config]\n" << config_echo(cfg);
    return out.str();
}

/// Extracts the [config] section of a summary for round-trip checks.
inline std::string summary_config_section(const std::string& summary) {
    const auto pos = summary.find("[config]\n");
    if (pos == std::string::npos) return {};
    return summary.substr(pos + 9);
}

/// Solve + diagnostics + artifact files.  Artifacts are written even on
/// non-convergence so failures stay inspectable.
inline RunArtifacts run(const RunConfig& cfg, bool write_files = true) {
    RunArtifacts art;
    art.out_dir = cfg.out_dir;
    const ProblemSpec spec = cfg.to_problem();
    SbpOperatorSet ops = build_sbp(cfg.order, spec.grid);
    art.solution = solve_physical(ops, spec, cfg.to_solver_settings());
    const SbpOperatorSet diag_ops = build_regularized(ops, art.solution.solve.epsilon_used);
    art.diagnostics = run_diagnostics(art.solution.solve.z_star, diag_ops, spec, cfg.diag);
    art.trajectory_csv = trajectory_table(spec.grid, art.solution.solve.z_star, art.diagnostics);
    art.summary_text = summary_text(cfg, art.solution, art.diagnostics);
    art.config_echo_text = config_echo(cfg);
    art.status = art.solution.solve.converged && art.solution.physical ? RunStatus::Converged
                                                                       : RunStatus::NotConverged;
    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir);
        detail::write_file(std::filesystem::path(cfg.out_dir) / "trajectory.csv",
                           art.trajectory_csv);
        detail::write_file(std::filesystem::path(cfg.out_dir) / "summary.txt", art.summary_text);
    }
    return art;
}

/// Refinement sweep: one row per grid size with oracle errors and the fitted
/// order appended.
inline std::string sweep_table(const RunConfig& cfg, SbpOrder order, const std::vector<int>& n_list,
                               bool* all_solved = nullptr) {
    using detail::fmt17;
    const ProblemSpec base = cfg.to_problem();
    const ConvergenceStudy study = convergence_study(base, order, n_list, cfg.to_solver_settings());
    if (all_solved) *all_solved = study.all_solved;
    std::ostringstream out;
    out << "n,h,err_t,err_x,solved,epsilon_used\n";
    for (const auto& r : study.rows) {
        out << r.n_gamma << ',' << fmt17(r.h) << ',' << fmt17(r.err_t) << ',' << fmt17(r.err_x)
            << ',' << (r.solved ? 1 : 0) << ',' << fmt17(r.epsilon_used) << "\n";
    }
    out << "fitted_order," << fmt17(study.fitted_order) << "\n";
    return out.str();
}

inline void dump_operators(const RunConfig& cfg) {
    const Grid grid = build_grid(cfg.gamma_i, cfg.gamma_f, cfg.n_gamma);
    SbpOperatorSet ops = build_sbp(cfg.order, grid);
    const double eps = cfg.epsilon_auto ? 0.0 : cfg.epsilon;
    ops = build_regularized(ops, eps);
    std::filesystem::create_directories(cfg.out_dir);
    detail::write_file(std::filesystem::path(cfg.out_dir) / "D.txt", detail::matrix_text(ops.D));
    Eigen::MatrixXd H = ops.H.asDiagonal();
    detail::write_file(std::filesystem::path(cfg.out_dir) / "H.txt", detail::matrix_text(H));
    detail::write_file(std::filesystem::path(cfg.out_dir) / "D_reg.txt",
                       detail::matrix_text(ops.D_reg));
}

}  // namespace worldline
