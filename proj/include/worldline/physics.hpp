#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace worldline {

struct PhysicsParams {
    double c = 1.0;  // speed of light
    double m = 1.0;  // particle mass

    void validate() const {
        if (!(c > 0.0)) throw std::invalid_argument("physics: c must be positive");
        if (!(m > 0.0)) throw std::invalid_argument("physics: m must be positive");
    }
};

enum class PotentialKind { Free, Linear, Quartic, Polynomial };

/// External potential V(x) with derivatives.  Linear: V = alpha x,
/// quartic: V = kappa x^4, polynomial: V = sum_p coeffs[p] x^p.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::Free;
    double strength = 0.0;               // alpha or kappa
    std::vector<double> coeffs;          // polynomial coefficients, ascending

    static PotentialSpec free() { return {}; }
    static PotentialSpec linear(double alpha) {
        return {PotentialKind::Linear, alpha, {}};
    }
    static PotentialSpec quartic(double kappa) {
        return {PotentialKind::Quartic, kappa, {}};
    }
    static PotentialSpec polynomial(std::vector<double> c) {
        return {PotentialKind::Polynomial, 0.0, std::move(c)};
    }

    double value(double x) const {
        switch (kind) {
            case PotentialKind::Free: return 0.0;
            case PotentialKind::Linear: return strength * x;
            case PotentialKind::Quartic: return strength * x * x * x * x;
            case PotentialKind::Polynomial: {
                double v = 0.0;
                for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * x + *it;
                return v;
            }
        }
        return 0.0;
    }

    double deriv(double x) const {
        switch (kind) {
            case PotentialKind::Free: return 0.0;
            case PotentialKind::Linear: return strength;
            case PotentialKind::Quartic: return 4.0 * strength * x * x * x;
            case PotentialKind::Polynomial: {
                double v = 0.0;
                for (int p = static_cast<int>(coeffs.size()) - 1; p >= 1; --p) {
                    v = v * x + static_cast<double>(p) * coeffs[p];
                }
                return v;
            }
        }
        return 0.0;
    }

    double second_deriv(double x) const {
        switch (kind) {
            case PotentialKind::Free: return 0.0;
            case PotentialKind::Linear: return 0.0;
            case PotentialKind::Quartic: return 12.0 * strength * x * x;
            case PotentialKind::Polynomial: {
                double v = 0.0;
                for (int p = static_cast<int>(coeffs.size()) - 1; p >= 2; --p) {
                    v = v * x + static_cast<double>(p * (p - 1)) * coeffs[p];
                }
                return v;
            }
        }
        return 0.0;
    }
};

struct InitialData {
    double t_i = 0.0;
    double x_i = 0.0;
    double tdot_i = 1.0;
    double xdot_i = 0.0;

    void validate() const {
        if (!(tdot_i > 0.0)) {
            throw std::invalid_argument("initial data: tdot_i must be positive");
        }
    }
};

/// Diagonal metric weight g00 = c^2 + 2 V(x_k)/m, evaluated elementwise.
inline Eigen::VectorXd metric_diag(const Eigen::VectorXd& x, const PhysicsParams& physics,
                                   const PotentialSpec& potential) {
    Eigen::VectorXd w(x.size());
    const double c2 = physics.c * physics.c;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        w[k] = c2 + 2.0 * potential.value(x[k]) / physics.m;
    }
    return w;
}

}  // namespace worldline
