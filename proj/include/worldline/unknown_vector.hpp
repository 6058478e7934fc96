#pragma once

#include <Eigen/Core>

#include <stdexcept>

namespace worldline {

/// The 4n+8 unknowns of the doubled-branch saddle problem, packed as
/// (t1, x1, t2, x2, lambda_1..lambda_8).  lambda_1..4 enforce the initial
/// conditions on the forward branch, lambda_5..8 the connecting conditions
/// at gamma_f.
class UnknownVector {
public:
    UnknownVector() = default;
    explicit UnknownVector(int n_gamma)
        : n_(n_gamma), data_(Eigen::VectorXd::Zero(4 * n_gamma + 8)) {}
    UnknownVector(int n_gamma, Eigen::VectorXd raw) : n_(n_gamma), data_(std::move(raw)) {
        if (data_.size() != 4 * n_ + 8) {
            throw std::invalid_argument("UnknownVector: raw size mismatch");
        }
    }

    int n_gamma() const { return n_; }
    Eigen::Index size() const { return data_.size(); }

    Eigen::VectorXd& raw() { return data_; }
    const Eigen::VectorXd& raw() const { return data_; }

    auto t1() { return data_.segment(0, n_); }
    auto x1() { return data_.segment(n_, n_); }
    auto t2() { return data_.segment(2 * n_, n_); }
    auto x2() { return data_.segment(3 * n_, n_); }
    auto lambda() { return data_.segment(4 * n_, 8); }

    auto t1() const { return data_.segment(0, n_); }
    auto x1() const { return data_.segment(n_, n_); }
    auto t2() const { return data_.segment(2 * n_, n_); }
    auto x2() const { return data_.segment(3 * n_, n_); }
    auto lambda() const { return data_.segment(4 * n_, 8); }

    // block offsets for assembling gradients/Hessians
    int off_t1() const { return 0; }
    int off_x1() const { return n_; }
    int off_t2() const { return 2 * n_; }
    int off_x2() const { return 3 * n_; }
    int off_lambda() const { return 4 * n_; }

private:
    int n_ = 0;
    Eigen::VectorXd data_;
};

}  // namespace worldline
