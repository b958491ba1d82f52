#pragma once

#include <Eigen/Dense>

#include "uiobs/errors.hpp"

namespace uiobs {

/// Tolerance for SVD-based rank decisions: a singular value counts towards
/// the rank if it exceeds max(absolute, relative * sigma_max).
struct RankTolerance {
    double relative = 1e-9;
    double absolute = 0.0;

    void validate() const {
        if (relative < 0.0 || absolute < 0.0 || (relative == 0.0 && absolute == 0.0))
            throw DimensionError("RankTolerance: both entries must be >= 0 and not both zero");
    }
};

/// Number of singular values above the tolerance threshold.
int numerical_rank_impl(const Eigen::MatrixXd& M, RankTolerance tol);
int numerical_rank_impl(const Eigen::MatrixXcd& M, RankTolerance tol);

template <typename Derived>
int numerical_rank(const Eigen::MatrixBase<Derived>& M, RankTolerance tol = {}) {
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex)
        return numerical_rank_impl(Eigen::MatrixXcd(M), tol);
    else
        return numerical_rank_impl(Eigen::MatrixXd(M), tol);
}

/// Minimum 2-norm row vector zeta with zeta * W = b.
/// Throws InconsistentError if b is not in the row space of W within tolerance.
Eigen::RowVectorXd min_norm_row_combination(const Eigen::MatrixXd& W,
                                            const Eigen::RowVectorXd& b,
                                            RankTolerance tol = {});

/// Solves H * beta = w for square nonsingular H.
/// Throws SingularError if the condition estimate exceeds cond_threshold.
Eigen::VectorXd solve_square(const Eigen::MatrixXd& H, const Eigen::VectorXd& w,
                             double cond_threshold = 1e12);

/// 2-norm condition estimate (sigma_max / sigma_min; infinity if rank deficient).
double condition_estimate(const Eigen::MatrixXd& M);

}  // namespace uiobs
