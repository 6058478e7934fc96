#pragma once

#include "worldline/grid.hpp"
#include "worldline/physics.hpp"

namespace worldline {

/// Everything that defines one initial value problem instance.
///
/// `backward_branch_fluxes` controls the two fixed linear action terms
///   -Q_c (t2[0] - t1[0]) + xdot_i (x2[0] - x1[0]),  Q_c = tdot_i (c^2 + 2V(x_i)/m),
/// which impose the backward branch's natural boundary data at gamma_i weakly.
/// Without them the backward branch's stationarity at the first node forces an
/// unphysical zero-flux condition and the doubled system has no critical point
/// on the physical (branch-coincident) manifold.
struct ProblemSpec {
    Grid grid;
    PhysicsParams physics;
    PotentialSpec potential;
    InitialData initial;
    bool backward_branch_fluxes = true;

    /// Continuum Noether charge fixed by the initial data.
    double continuum_charge() const {
        const double c2 = physics.c * physics.c;
        return initial.tdot_i * (c2 + 2.0 * potential.value(initial.x_i) / physics.m);
    }

    void validate() const {
        physics.validate();
        initial.validate();
    }
};

}  // namespace worldline
