#include "uiobs/model.hpp"

#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

namespace uiobs {

void LtiSystem::validate(RankTolerance tol) const {
    const int nn = n(), mm = m(), pp = p();
    if (nn < 1) throw DimensionError("LtiSystem: n must be >= 1");
    if (A.rows() != A.cols()) throw DimensionError("LtiSystem: A must be square");
    if (B.rows() != nn) throw DimensionError("LtiSystem: B row count != n");
    if (D.rows() != nn) throw DimensionError("LtiSystem: D row count != n");
    if (C.cols() != nn) throw DimensionError("LtiSystem: C column count != n");
    if (pp < 1) throw DimensionError("LtiSystem: p must be >= 1");
    if (F && (F->rows() != pp || F->cols() != mm))
        throw DimensionError("LtiSystem: F must be p x m");
    if (bounds.size() != mm) throw DimensionError("LtiSystem: bounds size != m");
    if (!A.allFinite() || !B.allFinite() || !D.allFinite() || !C.allFinite() ||
        (F && !F->allFinite()))
        throw DimensionError("LtiSystem: matrices must be finite");
    for (int i = 0; i < mm; ++i)
        if (!(bounds(i) > 0.0)) throw DimensionError("LtiSystem: bounds must be positive");
    if (mm > 0 && numerical_rank(D, tol) != mm)
        throw DimensionError("LtiSystem: columns of D must be linearly independent");
    if (numerical_rank(C, tol) != pp)
        throw DimensionError("LtiSystem: rows of C must be linearly independent");
}

Eigen::MatrixXcd rosenbrock(const LtiSystem& sys, std::complex<double> s) {
    const int n = sys.n(), m = sys.m(), p = sys.p();
    Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(n + p, n + m);
    P.topLeftCorner(n, n) = s * Eigen::MatrixXcd::Identity(n, n) - sys.A.cast<std::complex<double>>();
    P.topRightCorner(n, m) = -sys.D.cast<std::complex<double>>();
    P.bottomLeftCorner(p, n) = sys.C.cast<std::complex<double>>();
    return P;
}

namespace {

// Candidate points where rank P(s) can drop: spectrum of A, finite generalized
// eigenvalues of the square pencil (p == m), and fixed pseudo-random probes.
std::vector<std::complex<double>> rank_drop_candidates(const LtiSystem& sys) {
    std::vector<std::complex<double>> cand;
    const int n = sys.n(), m = sys.m(), p = sys.p();

    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        cand.push_back(es.eigenvalues()(i));

    if (p == m && m > 0) {
        // P(s) = s * N - M with N = [[I, 0], [0, 0]]; invariant zeros are the
        // finite generalized eigenvalues of (M, N).
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + p, n + m);
        M.topLeftCorner(n, n) = sys.A;
        M.topRightCorner(n, m) = sys.D;
        M.bottomLeftCorner(p, n) = -sys.C;
        Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n + p, n + m);
        N.topLeftCorner(n, n).setIdentity();
        Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(M, N, false);
        const auto& alphas = ges.alphas();
        const auto& betas = ges.betas();
        const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < alphas.size(); ++i) {
            if (std::abs(betas(i)) > 1e-12 * scale &&
                std::isfinite(std::abs(alphas(i) / betas(i))))
                cand.push_back(alphas(i) / betas(i));
        }
    }

    std::mt19937 rng(0x5eed);
    std::normal_distribution<double> dist(0.0, 1.0);
    const double spread = std::max(1.0, sys.A.cwiseAbs().maxCoeff());
    for (int i = 0; i < 50; ++i)
        cand.emplace_back(spread * dist(rng), spread * dist(rng));
    return cand;
}

}  // namespace

StrongObservabilityResult is_strongly_observable(const LtiSystem& sys, RankTolerance tol) {
    sys.validate(tol);
    if (sys.has_feedthrough())
        throw DimensionError(
            "is_strongly_observable: system has direct feedthrough; "
            "apply eliminate_feedthrough first");
    const int n = sys.n(), m = sys.m(), p = sys.p();
    if (m > p)
        throw DimensionError(
            "is_strongly_observable: m > p, rank P(s) can never reach n + m");

    for (const auto& s : rank_drop_candidates(sys)) {
        if (numerical_rank(rosenbrock(sys, s), tol) < n + m)
            return {false, s};
    }
    return {true, std::nullopt};
}

bool check_observer_matching(const LtiSystem& sys, RankTolerance tol) {
    sys.validate(tol);
    if (sys.m() == 0) return true;
    const Eigen::MatrixXd CD = sys.C * sys.D;
    return numerical_rank(CD, tol) == numerical_rank(sys.D, tol);
}

FeedthroughReduction eliminate_feedthrough(const LtiSystem& sys, RankTolerance tol) {
    sys.validate(tol);
    const int n = sys.n(), m = sys.m(), p = sys.p();
    Eigen::MatrixXd F = sys.F ? *sys.F : Eigen::MatrixXd::Zero(p, m);

    FeedthroughReduction red;
    red.m_F = numerical_rank(F, tol);
    const int mF = red.m_F;
    if (mF == p)
        throw UnsupportedError(
            "eliminate_feedthrough: rank F = p leaves no unknown-input-free outputs");

    if (mF == 0) {
        red.U = Eigen::MatrixXd::Identity(p, p);
        red.V = Eigen::MatrixXd::Identity(m, m);
        red.D0 = Eigen::MatrixXd::Zero(n, 0);
        red.C0 = Eigen::MatrixXd::Zero(0, n);
        red.reduced = sys;
        red.reduced.F.reset();
        return red;
    }

    // U F V = [[I_mF, 0], [0, 0]] with the singular values folded into U.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(F, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::MatrixXd scale = Eigen::MatrixXd::Identity(p, p);
    for (int i = 0; i < mF; ++i) scale(i, i) = 1.0 / svd.singularValues()(i);
    red.U = scale * svd.matrixU().transpose();
    red.V = svd.matrixV();

    const Eigen::MatrixXd Dt = sys.D * red.V;     // [D0 D1]
    const Eigen::MatrixXd Ct = red.U * sys.C;     // [C0; C1]
    red.D0 = Dt.leftCols(mF);
    red.C0 = Ct.topRows(mF);

    red.reduced.A = sys.A - red.D0 * red.C0;
    red.reduced.B = sys.B;
    red.reduced.D = Dt.rightCols(m - mF);
    red.reduced.C = Ct.bottomRows(p - mF);
    // Bounds for Delta_tilde = V^-1 Delta, conservatively |V^-1| * L.
    const Eigen::MatrixXd Vinv_abs = red.V.inverse().cwiseAbs();
    const Eigen::VectorXd tilde_bounds = Vinv_abs * sys.bounds;
    red.reduced.bounds = tilde_bounds.tail(m - mF);
    red.reduced.F.reset();
    red.reduced.validate(tol);
    return red;
}

}  // namespace uiobs
