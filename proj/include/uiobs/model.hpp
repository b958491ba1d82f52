#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "uiobs/linalg.hpp"

namespace uiobs {

/// Continuous-time LTI system
///   x' = A x + B u + D Delta,   y = C x (+ F Delta),
/// with unknown inputs Delta bounded by |Delta_i| <= bounds(i).
struct LtiSystem {
    Eigen::MatrixXd A;                 // n x n
    Eigen::MatrixXd B;                 // n x q (q may be 0)
    Eigen::MatrixXd D;                 // n x m (m may be 0)
    Eigen::MatrixXd C;                 // p x n
    std::optional<Eigen::MatrixXd> F;  // p x m direct feedthrough
    Eigen::VectorXd bounds;            // m amplitude bounds, each > 0

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(D.cols()); }
    int p() const { return static_cast<int>(C.rows()); }
    int q() const { return static_cast<int>(B.cols()); }

    bool has_feedthrough() const { return F && F->cwiseAbs().maxCoeff() > 0.0; }

    /// Checks dimensions, finiteness, rank D = m, rank C = p, bounds > 0.
    void validate(RankTolerance tol = {}) const;
};

/// Rosenbrock matrix P(s) = [[sI - A, -D], [C, 0]], size (n+p) x (n+m).
Eigen::MatrixXcd rosenbrock(const LtiSystem& sys, std::complex<double> s);

struct StrongObservabilityResult {
    bool strongly_observable = false;
    // On failure: a point s where rank P(s) < n + m.
    std::optional<std::complex<double>> witness;

    explicit operator bool() const { return strongly_observable; }
};

/// Tests rank P(s) = n + m over the candidate drop points (invariant zeros of
/// the pencil, eigenvalues of A, and a fixed set of random probes).
/// The system must be feedthrough-free; apply eliminate_feedthrough first.
StrongObservabilityResult is_strongly_observable(const LtiSystem& sys, RankTolerance tol = {});

/// Observer matching condition rank(C D) = rank(D).
bool check_observer_matching(const LtiSystem& sys, RankTolerance tol = {});

/// Result of the direct-feedthrough elimination.
struct FeedthroughReduction {
    LtiSystem reduced;    // feedthrough-free equivalent with m - m_F unknown inputs
    Eigen::MatrixXd U;    // p x p output transform, U*F*V = [[I_mF, 0], [0, 0]]
    Eigen::MatrixXd V;    // m x m input transform
    int m_F = 0;          // rank of F
    Eigen::MatrixXd D0;   // n x m_F known-input matrix (multiplies y_tilde_0)
    Eigen::MatrixXd C0;   // m_F x n recovery matrix for the consumed outputs
};

/// Reformulates a system with direct feedthrough as a feedthrough-free system
/// with m - rank(F) unknown inputs. F = 0 returns the system unchanged with
/// identity transforms. Rejects the degenerate case p = rank(F).
FeedthroughReduction eliminate_feedthrough(const LtiSystem& sys, RankTolerance tol = {});

}  // namespace uiobs
