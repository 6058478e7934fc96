#pragma once

#include <Eigen/Core>

#include <stdexcept>

#include "worldline/problem.hpp"
#include "worldline/sbp_operators.hpp"
#include "worldline/unknown_vector.hpp"

namespace worldline {

struct ActionEvaluation {
    double value = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

namespace detail {

inline void check_dims(const UnknownVector& z, const SbpOperatorSet& ops,
                       const ProblemSpec& spec) {
    if (z.n_gamma() != ops.n || ops.n != spec.grid.n_gamma) {
        throw std::invalid_argument("action: dimension mismatch between z, ops and spec");
    }
}

/// The eight constraint residuals, in lambda order.  Kinetic terms use D_reg;
/// constraints always use the plain D.
inline Eigen::Matrix<double, 8, 1> constraint_residuals(const UnknownVector& z,
                                                        const SbpOperatorSet& ops,
                                                        const ProblemSpec& spec) {
    const int n = ops.n;
    const auto& D = ops.D;
    const InitialData& id = spec.initial;
    Eigen::Matrix<double, 8, 1> c;
    c[0] = z.t1()[0] - id.t_i;
    c[1] = D.row(0).dot(z.t1()) - id.tdot_i;
    c[2] = z.x1()[0] - id.x_i;
    c[3] = D.row(0).dot(z.x1()) - id.xdot_i;
    c[4] = z.t1()[n - 1] - z.t2()[n - 1];
    c[5] = D.row(n - 1).dot(z.t1()) - D.row(n - 1).dot(z.t2());
    c[6] = z.x1()[n - 1] - z.x2()[n - 1];
    c[7] = D.row(n - 1).dot(z.x1()) - D.row(n - 1).dot(z.x2());
    return c;
}

}  // namespace detail

inline double assemble_action(const UnknownVector& z, const SbpOperatorSet& ops,
                              const ProblemSpec& spec) {
    detail::check_dims(z, ops, spec);
    const auto& Dr = ops.D_reg;
    const auto& h = ops.H;

    const Eigen::VectorXd u1 = Dr * z.t1();
    const Eigen::VectorXd v1 = Dr * z.x1();
    const Eigen::VectorXd u2 = Dr * z.t2();
    const Eigen::VectorXd v2 = Dr * z.x2();
    const Eigen::VectorXd M1 = metric_diag(z.x1(), spec.physics, spec.potential);
    const Eigen::VectorXd M2 = metric_diag(z.x2(), spec.physics, spec.potential);

    double value = 0.5 * (u1.dot(h.cwiseProduct(M1.cwiseProduct(u1))) - v1.dot(h.cwiseProduct(v1)));
    value -= 0.5 * (u2.dot(h.cwiseProduct(M2.cwiseProduct(u2))) - v2.dot(h.cwiseProduct(v2)));

    value += z.lambda().dot(detail::constraint_residuals(z, ops, spec));

    if (spec.backward_branch_fluxes) {
        const double qc = spec.continuum_charge();
        value += -qc * (z.t2()[0] - z.t1()[0]) + spec.initial.xdot_i * (z.x2()[0] - z.x1()[0]);
    }
    return value;
}

inline Eigen::VectorXd assemble_gradient(const UnknownVector& z, const SbpOperatorSet& ops,
                                         const ProblemSpec& spec) {
    detail::check_dims(z, ops, spec);
    const int n = ops.n;
    const auto& D = ops.D;
    const auto& Dr = ops.D_reg;
    const auto& h = ops.H;
    const double m = spec.physics.m;

    const Eigen::VectorXd u1 = Dr * z.t1();
    const Eigen::VectorXd v1 = Dr * z.x1();
    const Eigen::VectorXd u2 = Dr * z.t2();
    const Eigen::VectorXd v2 = Dr * z.x2();
    const Eigen::VectorXd x1 = z.x1();
    const Eigen::VectorXd x2 = z.x2();
    const Eigen::VectorXd M1 = metric_diag(x1, spec.physics, spec.potential);
    const Eigen::VectorXd M2 = metric_diag(x2, spec.physics, spec.potential);
    Eigen::VectorXd dV1(n), dV2(n);
    for (int k = 0; k < n; ++k) {
        dV1[k] = spec.potential.deriv(x1[k]);
        dV2[k] = spec.potential.deriv(x2[k]);
    }

    Eigen::VectorXd g = Eigen::VectorXd::Zero(z.size());
    const auto lam = z.lambda();

    auto gt1 = g.segment(z.off_t1(), n);
    auto gx1 = g.segment(z.off_x1(), n);
    auto gt2 = g.segment(z.off_t2(), n);
    auto gx2 = g.segment(z.off_x2(), n);

    gt1 = Dr.transpose() * h.cwiseProduct(M1.cwiseProduct(u1));
    gx1 = -(Dr.transpose() * h.cwiseProduct(v1)) + (dV1 / m).cwiseProduct(h.cwiseProduct(u1.cwiseProduct(u1)));
    gt2 = -(Dr.transpose() * h.cwiseProduct(M2.cwiseProduct(u2)));
    gx2 = Dr.transpose() * h.cwiseProduct(v2) - (dV2 / m).cwiseProduct(h.cwiseProduct(u2.cwiseProduct(u2)));

    // lambda couplings into the field blocks
    gt1[0] += lam[0];
    gt1 += lam[1] * D.row(0).transpose();
    gx1[0] += lam[2];
    gx1 += lam[3] * D.row(0).transpose();
    gt1[n - 1] += lam[4];
    gt1 += lam[5] * D.row(n - 1).transpose();
    gt2[n - 1] -= lam[4];
    gt2 -= lam[5] * D.row(n - 1).transpose();
    gx1[n - 1] += lam[6];
    gx1 += lam[7] * D.row(n - 1).transpose();
    gx2[n - 1] -= lam[6];
    gx2 -= lam[7] * D.row(n - 1).transpose();

    if (spec.backward_branch_fluxes) {
        const double qc = spec.continuum_charge();
        gt1[0] += qc;
        gt2[0] -= qc;
        gx1[0] -= spec.initial.xdot_i;
        gx2[0] += spec.initial.xdot_i;
    }

    // the lambda block is exactly the constraint residual vector
    g.segment(z.off_lambda(), 8) = detail::constraint_residuals(z, ops, spec);
    return g;
}

inline Eigen::MatrixXd assemble_hessian(const UnknownVector& z, const SbpOperatorSet& ops,
                                        const ProblemSpec& spec) {
    detail::check_dims(z, ops, spec);
    const int n = ops.n;
    const auto& D = ops.D;
    const auto& Dr = ops.D_reg;
    const auto& h = ops.H;
    const double m = spec.physics.m;

    const Eigen::VectorXd u1 = Dr * z.t1();
    const Eigen::VectorXd u2 = Dr * z.t2();
    const Eigen::VectorXd x1 = z.x1();
    const Eigen::VectorXd x2 = z.x2();
    const Eigen::VectorXd M1 = metric_diag(x1, spec.physics, spec.potential);
    const Eigen::VectorXd M2 = metric_diag(x2, spec.physics, spec.potential);
    Eigen::VectorXd dV1(n), dV2(n), d2V1(n), d2V2(n);
    for (int k = 0; k < n; ++k) {
        dV1[k] = spec.potential.deriv(x1[k]);
        dV2[k] = spec.potential.deriv(x2[k]);
        d2V1[k] = spec.potential.second_deriv(x1[k]);
        d2V2[k] = spec.potential.second_deriv(x2[k]);
    }

    const Eigen::Index N = z.size();
    Eigen::MatrixXd Hs = Eigen::MatrixXd::Zero(N, N);
    const int ot1 = z.off_t1(), ox1 = z.off_x1(), ot2 = z.off_t2(), ox2 = z.off_x2(),
              ol = z.off_lambda();

    const Eigen::MatrixXd K = Dr.transpose() * h.asDiagonal() * Dr;

    Hs.block(ot1, ot1, n, n) = Dr.transpose() * (h.cwiseProduct(M1)).asDiagonal() * Dr;
    Hs.block(ot2, ot2, n, n) = -(Dr.transpose() * (h.cwiseProduct(M2)).asDiagonal() * Dr);
    Hs.block(ox1, ox1, n, n) = -K;
    Hs.block(ox1, ox1, n, n) += ((d2V1 / m).cwiseProduct(h.cwiseProduct(u1.cwiseProduct(u1)))).asDiagonal();
    Hs.block(ox2, ox2, n, n) = K;
    Hs.block(ox2, ox2, n, n) -= ((d2V2 / m).cwiseProduct(h.cwiseProduct(u2.cwiseProduct(u2)))).asDiagonal();

    // metric/velocity cross blocks
    const Eigen::MatrixXd C1 = Dr.transpose() * (h.cwiseProduct((2.0 / m) * dV1).cwiseProduct(u1)).asDiagonal();
    const Eigen::MatrixXd C2 = Dr.transpose() * (h.cwiseProduct((2.0 / m) * dV2).cwiseProduct(u2)).asDiagonal();
    Hs.block(ot1, ox1, n, n) = C1;
    Hs.block(ox1, ot1, n, n) = C1.transpose();
    Hs.block(ot2, ox2, n, n) = -C2;
    Hs.block(ox2, ot2, n, n) = -C2.transpose();

    // constraint Jacobian border
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(8, N);
    J(0, ot1 + 0) = 1.0;
    J.row(1).segment(ot1, n) = D.row(0);
    J(2, ox1 + 0) = 1.0;
    J.row(3).segment(ox1, n) = D.row(0);
    J(4, ot1 + n - 1) = 1.0;
    J(4, ot2 + n - 1) = -1.0;
    J.row(5).segment(ot1, n) = D.row(n - 1);
    J.row(5).segment(ot2, n) = -D.row(n - 1);
    J(6, ox1 + n - 1) = 1.0;
    J(6, ox2 + n - 1) = -1.0;
    J.row(7).segment(ox1, n) = D.row(n - 1);
    J.row(7).segment(ox2, n) = -D.row(n - 1);

    Hs.block(ol, 0, 8, N) = J;
    Hs.block(0, ol, N, 8) = J.transpose();
    return Hs;
}

}  // namespace worldline
