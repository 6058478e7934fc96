#include <catch_amalgamated.hpp>

#include <cmath>

#include "worldline/diagnostics.hpp"
#include "worldline/solver.hpp"

using namespace worldline;

namespace {

ProblemSpec paper_spec(const PotentialSpec& pot, int n = 32) {
    ProblemSpec spec;
    spec.grid = build_grid(0.0, 1.0, n);
    spec.potential = pot;
    spec.initial = {0.0, 1.0, 1.0, 0.1};
    return spec;
}

}  // namespace

TEST_CASE("initial guess is the constraint-satisfying ramp") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
    const UnknownVector z = initial_guess(spec);
    SECTION("t vectors equal the grid nodes for t_i=0, tdot_i=1") {
        REQUIRE((z.t1() - spec.grid.nodes).lpNorm<Eigen::Infinity>() == 0.0);
        REQUIRE((z.t2() - spec.grid.nodes).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SECTION("zero initial velocity gives constant x") {
        ProblemSpec s2 = spec;
        s2.initial.xdot_i = 0.0;
        const UnknownVector z2 = initial_guess(s2);
        REQUIRE((z2.x1().array() - 1.0).abs().maxCoeff() == 0.0);
    }
    SECTION("all lambda-gradient components vanish at the guess") {
        const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
        const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
        REQUIRE(g.tail(8).lpNorm<Eigen::Infinity>() <= 1e-14);
    }
}

TEST_CASE("free particle converges in one Newton step to the exact ramp") {
    for (const SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        const ProblemSpec spec = paper_spec(PotentialSpec::free());
        const SbpOperatorSet ops = build_sbp(order, spec.grid);
        SolverSettings settings;
        const SolveResult r = newton_solve(initial_guess(spec), ops, spec, settings);
        REQUIRE(r.converged);
        REQUIRE(r.iterations <= 3);
        REQUIRE(r.epsilon_used == 0.0);
        const Eigen::VectorXd ramp_x =
            Eigen::VectorXd::Constant(32, 1.0) + 0.1 * spec.grid.nodes;
        REQUIRE((r.z_star.x1() - ramp_x).lpNorm<Eigen::Infinity>() <= 1e-12);
        REQUIRE((r.z_star.t1() - spec.grid.nodes).lpNorm<Eigen::Infinity>() <= 1e-12);
    }
}

TEST_CASE("paper quartic configuration converges with tiny lambda_2") {
    for (const SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
        const SbpOperatorSet ops = build_sbp(order, spec.grid);
        SolverSettings settings;
        const SolveResult r = newton_solve(initial_guess(spec), ops, spec, settings);
        REQUIRE(r.converged);
        REQUIRE(r.residual_norm <= 1e-12);
        REQUIRE(std::abs(r.z_star.lambda()[1]) <= 1e-10);
        // all eight constraints satisfied at convergence
        const Eigen::VectorXd g = assemble_gradient(r.z_star, ops, spec);
        REQUIRE(g.tail(8).lpNorm<Eigen::Infinity>() <= settings.residual_tol);
    }
}

TEST_CASE("residual decreases strictly between accepted iterates") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    SolverSettings settings;
    const SolveResult r = newton_solve(initial_guess(spec), ops, spec, settings);
    REQUIRE(r.residual_history.size() >= 2);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i) {
        REQUIRE(r.residual_history[i] < r.residual_history[i - 1]);
    }
}

TEST_CASE("repeated solves are bit-identical") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP42, spec.grid);
    SolverSettings settings;
    const SolveResult a = newton_solve(initial_guess(spec), ops, spec, settings);
    const SolveResult b = newton_solve(initial_guess(spec), ops, spec, settings);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    REQUIRE(a.z_star.raw() == b.z_star.raw());
}

TEST_CASE("epsilon continuation: warm-started rungs differ by O(epsilon)") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
    const SbpOperatorSet base = build_sbp(SbpOrder::SBP21, spec.grid);
    SolverSettings settings;
    const double h = spec.grid.d_gamma;
    const std::vector<double> ladder = {h, h * h, h * h * h, 0.0};
    UnknownVector z = initial_guess(spec);
    Eigen::VectorXd prev;
    double prev_eps = 0.0;
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const SbpOperatorSet ops = build_regularized(base, ladder[i]);
        const SolveResult r = newton_solve_fixed(z, ops, spec, settings);
        REQUIRE(r.converged);
        if (i > 0) {
            const double dz = (r.z_star.raw() - prev).lpNorm<Eigen::Infinity>();
            REQUIRE(dz <= 10.0 * prev_eps);  // continuation smoothness
        }
        prev = r.z_star.raw();
        prev_eps = ladder[i];
        z = r.z_star;
    }
}

TEST_CASE("fixed-epsilon solve honours the requested regularization") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25), 16);
    const SbpOperatorSet base = build_sbp(SbpOrder::SBP21, spec.grid);
    const double eps = 0.01;
    const SbpOperatorSet ops = build_regularized(base, eps);
    SolverSettings settings;
    const SolveResult r = newton_solve_fixed(initial_guess(spec), ops, spec, settings);
    REQUIRE(r.converged);
    REQUIRE(r.epsilon_used == eps);
    // the dissipative rung must differ from the unregularized solution
    const SolveResult r0 = newton_solve(initial_guess(spec), base, spec, settings);
    REQUIRE((r.z_star.raw() - r0.z_star.raw()).lpNorm<Eigen::Infinity>() > 1e-10);
}

TEST_CASE("solve_physical verifies the branch-coincidence limit") {
    for (const auto& pot :
         {PotentialSpec::free(), PotentialSpec::linear(0.25), PotentialSpec::quartic(0.25)}) {
        const ProblemSpec spec = paper_spec(pot);
        const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
        SolverSettings settings;
        const PhysicalSolution sol = solve_physical(ops, spec, settings);
        REQUIRE(sol.solve.converged);
        REQUIRE(sol.physical);
        REQUIRE(sol.branch_gap_t <= 100.0 * settings.residual_tol);
        REQUIRE(sol.branch_gap_x <= 100.0 * settings.residual_tol);
    }
}

TEST_CASE("paper quartic run lands t_f near one") {
    const ProblemSpec spec = paper_spec(PotentialSpec::quartic(0.25));
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    SolverSettings settings;
    const PhysicalSolution sol = solve_physical(ops, spec, settings);
    REQUIRE(sol.physical);
    REQUIRE(sol.t[31] > 0.5);
    REQUIRE(sol.t[31] < 1.5);
}

TEST_CASE("free particle final time is exact") {
    const ProblemSpec spec = paper_spec(PotentialSpec::free());
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    SolverSettings settings;
    const PhysicalSolution sol = solve_physical(ops, spec, settings);
    REQUIRE(sol.physical);
    REQUIRE(sol.t[31] == Catch::Approx(1.0).margin(1e-13));
}

TEST_CASE("settings validation") {
    SolverSettings s;
    s.damping = 1.5;
    const ProblemSpec spec = paper_spec(PotentialSpec::free(), 8);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    REQUIRE_THROWS_AS(newton_solve(initial_guess(spec), ops, spec, s), std::invalid_argument);
    s = SolverSettings{};
    s.residual_tol = -1.0;
    REQUIRE_THROWS_AS(newton_solve(initial_guess(spec), ops, spec, s), std::invalid_argument);
}
