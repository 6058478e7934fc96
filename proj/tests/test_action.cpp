#include <catch_amalgamated.hpp>

#include <random>

#include "worldline/action.hpp"
#include "worldline/solver.hpp"

using namespace worldline;

namespace {

ProblemSpec make_spec(const PotentialSpec& pot, int n) {
    ProblemSpec spec;
    spec.grid = build_grid(0.0, 1.0, n);
    spec.potential = pot;
    spec.initial = {0.0, 1.0, 1.0, 0.1};
    return spec;
}

// branch-symmetric state with smooth interior wiggles; multipliers zero
UnknownVector symmetric_state(const ProblemSpec& spec, unsigned seed) {
    UnknownVector z = initial_guess(spec);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-0.3, 0.3);
    const int n = z.n_gamma();
    for (int k = 0; k < n; ++k) {
        const double bt = unif(rng), bx = unif(rng);
        z.t1()[k] += bt;
        z.t2()[k] = z.t1()[k];
        z.x1()[k] += bx;
        z.x2()[k] = z.x1()[k];
    }
    return z;
}

}  // namespace

TEST_CASE("metric_diag") {
    const PhysicsParams phys;
    SECTION("quartic kappa=1/4 at x=1 gives 1.5") {
        const Eigen::VectorXd x = Eigen::VectorXd::Ones(6);
        const Eigen::VectorXd w = metric_diag(x, phys, PotentialSpec::quartic(0.25));
        for (int k = 0; k < 6; ++k) REQUIRE(w[k] == Catch::Approx(1.5).margin(1e-15));
    }
    SECTION("free potential gives c^2") {
        PhysicsParams p2;
        p2.c = 3.0;
        const Eigen::VectorXd x = Eigen::VectorXd::Random(5);
        const Eigen::VectorXd w = metric_diag(x, p2, PotentialSpec::free());
        for (int k = 0; k < 5; ++k) REQUIRE(w[k] == Catch::Approx(9.0).margin(1e-15));
    }
    SECTION("linear at x=0 gives c^2") {
        const Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
        const Eigen::VectorXd w = metric_diag(x, phys, PotentialSpec::linear(0.25));
        for (int k = 0; k < 4; ++k) REQUIRE(w[k] == Catch::Approx(1.0).margin(1e-15));
    }
}

TEST_CASE("potential derivative consistency (central differences)") {
    const std::vector<PotentialSpec> pots = {PotentialSpec::linear(0.7),
                                             PotentialSpec::quartic(0.25),
                                             PotentialSpec::polynomial({1.0, -0.5, 0.25, 0.125})};
    const double h = 1e-5;
    for (const auto& pot : pots) {
        for (double x : {-1.3, -0.2, 0.0, 0.4, 1.7}) {
            const double fd = (pot.value(x + h) - pot.value(x - h)) / (2.0 * h);
            REQUIRE(pot.deriv(x) == Catch::Approx(fd).margin(1e-8));
            const double fd2 = (pot.deriv(x + h) - pot.deriv(x - h)) / (2.0 * h);
            REQUIRE(pot.second_deriv(x) == Catch::Approx(fd2).margin(1e-8));
        }
    }
}

TEST_CASE("action value identities") {
    const ProblemSpec spec = make_spec(PotentialSpec::quartic(0.25), 12);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);

    SECTION("branch-symmetric state with zero multipliers evaluates to zero") {
        const UnknownVector z = symmetric_state(spec, 7);
        REQUIRE(assemble_action(z, ops, spec) == Catch::Approx(0.0).margin(1e-13));
    }
    SECTION("only the lambda_1 term survives at a branch-symmetric point") {
        UnknownVector z = symmetric_state(spec, 8);
        z.t1()[0] = 0.3;
        z.t2()[0] = 0.3;  // keep branches identical
        z.lambda()[0] = 2.0;
        // t_i = 0, so the lambda_1 term contributes 2 * 0.3; everything else cancels
        REQUIRE(assemble_action(z, ops, spec) == Catch::Approx(0.6).margin(1e-13));
    }
    SECTION("constant time shift of both branches changes the value by lambda_1 c") {
        UnknownVector z = symmetric_state(spec, 9);
        std::mt19937 rng(10);
        std::uniform_real_distribution<double> unif(-1.0, 1.0);
        for (int j = 0; j < 8; ++j) z.lambda()[j] = unif(rng);
        const double before = assemble_action(z, ops, spec);
        const double shift = 0.37;
        UnknownVector zs = z;
        zs.t1() += Eigen::VectorXd::Constant(12, shift);
        zs.t2() += Eigen::VectorXd::Constant(12, shift);
        const double after = assemble_action(zs, ops, spec);
        const double expect = z.lambda()[0] * shift;
        REQUIRE(after - before ==
                Catch::Approx(expect).margin(1e-12 * std::max(1.0, std::abs(expect))));
        // same for the spatial shift and lambda_3
        UnknownVector zx = z;
        zx.x1() += Eigen::VectorXd::Constant(12, shift);
        zx.x2() += Eigen::VectorXd::Constant(12, shift);
        // x-shift also changes the potential terms unless V is free
        ProblemSpec free_spec = make_spec(PotentialSpec::free(), 12);
        const double b2 = assemble_action(z, ops, free_spec);
        const double a2 = assemble_action(zx, ops, free_spec);
        const double expect_x = z.lambda()[2] * shift;
        REQUIRE(a2 - b2 ==
                Catch::Approx(expect_x).margin(1e-12 * std::max(1.0, std::abs(expect_x))));
    }
    SECTION("swapping branches negates the action at zero multipliers") {
        UnknownVector z = symmetric_state(spec, 11);
        std::mt19937 rng(12);
        std::uniform_real_distribution<double> unif(-0.2, 0.2);
        for (int k = 0; k < 12; ++k) {
            z.t2()[k] += unif(rng);  // desymmetrize
            z.x2()[k] += unif(rng);
        }
        UnknownVector zswap = z;
        zswap.t1() = z.t2();
        zswap.t2() = z.t1();
        zswap.x1() = z.x2();
        zswap.x2() = z.x1();
        const double a = assemble_action(z, ops, spec);
        const double b = assemble_action(zswap, ops, spec);
        REQUIRE(b == Catch::Approx(-a).margin(1e-12 * std::max(1.0, std::abs(a))));
    }
}

TEST_CASE("lambda gradient block equals the constraint residuals bit for bit") {
    const ProblemSpec spec = make_spec(PotentialSpec::quartic(0.25), 10);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    UnknownVector z = initial_guess(spec);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.raw()[i] += unif(rng);
    const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
    const int n = z.n_gamma();
    const auto& D = ops.D;
    REQUIRE(g[4 * n + 0] == z.t1()[0] - spec.initial.t_i);
    REQUIRE(g[4 * n + 1] == D.row(0).dot(z.t1()) - spec.initial.tdot_i);
    REQUIRE(g[4 * n + 2] == z.x1()[0] - spec.initial.x_i);
    REQUIRE(g[4 * n + 3] == D.row(0).dot(z.x1()) - spec.initial.xdot_i);
    REQUIRE(g[4 * n + 4] == z.t1()[n - 1] - z.t2()[n - 1]);
    REQUIRE(g[4 * n + 5] == D.row(n - 1).dot(z.t1()) - D.row(n - 1).dot(z.t2()));
    REQUIRE(g[4 * n + 6] == z.x1()[n - 1] - z.x2()[n - 1]);
    REQUIRE(g[4 * n + 7] == D.row(n - 1).dot(z.x1()) - D.row(n - 1).dot(z.x2()));
}

TEST_CASE("lambda block vanishes at a constraint-satisfying point") {
    const ProblemSpec spec = make_spec(PotentialSpec::quartic(0.25), 14);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    const UnknownVector z = initial_guess(spec);
    const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
    REQUIRE(g.segment(4 * 14, 8).lpNorm<Eigen::Infinity>() <= 1e-14);
}

TEST_CASE("gradient and Hessian match finite differences") {
    const std::vector<PotentialSpec> pots = {
        PotentialSpec::free(), PotentialSpec::linear(0.25), PotentialSpec::quartic(0.25),
        PotentialSpec::polynomial({0.0, 0.2, -0.1, 0.0, 0.25})};
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> unif(-0.4, 0.4);
    for (const SbpOrder order : {SbpOrder::SBP21, SbpOrder::SBP42}) {
        for (const auto& pot : pots) {
            const int n = order == SbpOrder::SBP21 ? 16 : 12;
            const ProblemSpec spec = make_spec(pot, n);
            const SbpOperatorSet base = build_sbp(order, spec.grid);
            const SbpOperatorSet ops = build_regularized(base, 0.5 * spec.grid.d_gamma);
            UnknownVector z = initial_guess(spec);
            for (Eigen::Index i = 0; i < z.size(); ++i) z.raw()[i] += unif(rng);
            const double step = 1e-6;

            const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
            Eigen::VectorXd g_fd(z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                UnknownVector zp = z, zm = z;
                zp.raw()[i] += step;
                zm.raw()[i] -= step;
                g_fd[i] = (assemble_action(zp, ops, spec) - assemble_action(zm, ops, spec)) /
                          (2.0 * step);
            }
            const double rel_g =
                (g - g_fd).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
            CAPTURE(static_cast<int>(pot.kind));
            REQUIRE(rel_g <= 1e-6);

            const Eigen::MatrixXd Hs = assemble_hessian(z, ops, spec);
            REQUIRE((Hs - Hs.transpose()).cwiseAbs().maxCoeff() <=
                    1e-12 * std::max(1.0, Hs.cwiseAbs().maxCoeff()));
            Eigen::MatrixXd H_fd(z.size(), z.size());
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                UnknownVector zp = z, zm = z;
                zp.raw()[i] += step;
                zm.raw()[i] -= step;
                H_fd.col(i) =
                    (assemble_gradient(zp, ops, spec) - assemble_gradient(zm, ops, spec)) /
                    (2.0 * step);
            }
            const double rel_h =
                (Hs - H_fd).cwiseAbs().maxCoeff() / std::max(1.0, Hs.cwiseAbs().maxCoeff());
            REQUIRE(rel_h <= 1e-5);
        }
    }
}

TEST_CASE("free potential makes the Hessian independent of the state") {
    const ProblemSpec spec = make_spec(PotentialSpec::free(), 12);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    UnknownVector za = initial_guess(spec), zb = initial_guess(spec);
    for (Eigen::Index i = 0; i < za.size(); ++i) {
        za.raw()[i] += unif(rng);
        zb.raw()[i] += unif(rng);
    }
    const Eigen::MatrixXd Ha = assemble_hessian(za, ops, spec);
    const Eigen::MatrixXd Hb = assemble_hessian(zb, ops, spec);
    REQUIRE((Ha - Hb).cwiseAbs().maxCoeff() <= 1e-12 * Ha.cwiseAbs().maxCoeff());
}

TEST_CASE("t1 gradient block is the quadratic-form derivative at free potential") {
    ProblemSpec spec = make_spec(PotentialSpec::free(), 10);
    spec.backward_branch_fluxes = false;  // isolate the kinetic term
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, spec.grid);
    std::mt19937 rng(6);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    UnknownVector z = initial_guess(spec);
    for (int k = 0; k < 10; ++k) z.t1()[k] = unif(rng);
    const double c2 = spec.physics.c * spec.physics.c;
    const Eigen::VectorXd expect =
        ops.D_reg.transpose() * (c2 * ops.H.cwiseProduct(ops.D_reg * z.t1()));
    const Eigen::VectorXd g = assemble_gradient(z, ops, spec);
    REQUIRE((g.head(10) - expect).lpNorm<Eigen::Infinity>() <=
            1e-13 * std::max(1.0, expect.lpNorm<Eigen::Infinity>()));
}

TEST_CASE("dimension mismatches are rejected") {
    const ProblemSpec spec = make_spec(PotentialSpec::free(), 12);
    const SbpOperatorSet ops = build_sbp(SbpOrder::SBP21, build_grid(0.0, 1.0, 10));
    const UnknownVector z = initial_guess(spec);
    REQUIRE_THROWS_AS(assemble_action(z, ops, spec), std::invalid_argument);
    REQUIRE_THROWS_AS(assemble_gradient(z, ops, spec), std::invalid_argument);
    REQUIRE_THROWS_AS(assemble_hessian(z, ops, spec), std::invalid_argument);
}
