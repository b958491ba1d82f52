#include "uiobs/linalg.hpp"

#include <limits>

namespace uiobs {

namespace {

template <typename Mat>
int rank_impl(const Mat& M, RankTolerance tol) {
    tol.validate();
    if (M.size() == 0) return 0;
    if (!M.allFinite()) throw DimensionError("numerical_rank: matrix has non-finite entries");
    Eigen::JacobiSVD<Mat> svd(M);
    const auto& sv = svd.singularValues();
    const double threshold = std::max(tol.absolute, tol.relative * sv(0));
    int r = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k)
        if (sv(k) > threshold) ++r;
    return r;
}

}  // namespace

int numerical_rank_impl(const Eigen::MatrixXd& M, RankTolerance tol) { return rank_impl(M, tol); }
int numerical_rank_impl(const Eigen::MatrixXcd& M, RankTolerance tol) { return rank_impl(M, tol); }

Eigen::RowVectorXd min_norm_row_combination(const Eigen::MatrixXd& W,
                                            const Eigen::RowVectorXd& b,
                                            RankTolerance tol) {
    tol.validate();
    if (W.cols() != b.cols())
        throw DimensionError("min_norm_row_combination: column count mismatch");
    if (W.cols() == 0) return Eigen::RowVectorXd::Zero(W.rows());

    // zeta * W = b  <=>  W^T zeta^T = b^T; the pseudoinverse gives the
    // minimum-norm solution.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(W.transpose(),
                                          Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    const double threshold = std::max(tol.absolute, tol.relative * smax);
    svd.setThreshold(smax > 0.0 ? threshold / smax : 1.0);
    Eigen::VectorXd zeta = svd.solve(b.transpose());

    const double residual = (zeta.transpose() * W - b).norm();
    const double scale = std::max(1.0, b.norm());
    if (residual > 1e-8 * scale + threshold)
        throw InconsistentError("min_norm_row_combination: b is not in the row space of W");
    return zeta.transpose();
}

Eigen::VectorXd solve_square(const Eigen::MatrixXd& H, const Eigen::VectorXd& w,
                             double cond_threshold) {
    if (H.rows() != H.cols()) throw DimensionError("solve_square: matrix not square");
    if (H.rows() != w.size()) throw DimensionError("solve_square: size mismatch");
    if (H.rows() == 0) return Eigen::VectorXd();

    if (condition_estimate(H) > cond_threshold)
        throw SingularError("solve_square: condition estimate exceeds threshold");
    return H.fullPivLu().solve(w);
}

double condition_estimate(const Eigen::MatrixXd& M) {
    if (M.size() == 0) return 1.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return sv(0) / smin;
}

}  // namespace uiobs
