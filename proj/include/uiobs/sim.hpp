#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "uiobs/observer.hpp"

namespace uiobs {

/// amplitude * sin(omega t + phase)
struct Sinusoid {
    double amplitude = 0.0;
    double omega = 0.0;
    double phase = 0.0;
};

/// Scalar signal: offset plus a sum of sinusoids.
struct SignalSpec {
    double offset = 0.0;
    std::vector<Sinusoid> sinusoids;

    double eval(double t) const;
    double eval_rate(double t) const;  // time derivative
    double amplitude_bound() const;    // |offset| + sum |amplitudes|
};

/// u = -[K h] * (xhat; delta_hat); h compensates the matched disturbance.
struct FeedbackSpec {
    Eigen::MatrixXd K;  // q x n
    Eigen::VectorXd h;  // q
};

struct ControlSpec {
    std::vector<SignalSpec> open_loop;     // per control input; empty = u = 0
    std::optional<FeedbackSpec> feedback;  // overrides open_loop when present
};

struct Scenario {
    LtiSystem plant;
    NormalFormResult nf;
    ObserverConfig observer;
    Eigen::VectorXd x0;      // plant initial state
    Eigen::VectorXd xhat0;   // observer initial state, transformed coordinates
    std::vector<SignalSpec> disturbance;  // one per unknown input
    ControlSpec control;
    double step = 1e-4;
    double horizon = 10.0;

    void validate() const;
};

struct Trace {
    std::vector<double> times;
    std::vector<Eigen::VectorXd> x;             // plant state
    std::vector<Eigen::VectorXd> xhat_original; // T * xhat (original coordinates)
    std::vector<Eigen::VectorXd> eta;           // x - xhat_original (leading n_plant entries)
    std::vector<Eigen::VectorXd> y;
    std::vector<double> delta_hat;              // empty unless reconstructing

    int samples() const { return static_cast<int>(times.size()); }
};

Eigen::VectorXd eval_disturbance(const std::vector<SignalSpec>& spec, double t);
Eigen::VectorXd eval_disturbance_rate(const std::vector<SignalSpec>& spec, double t);

/// Forward-Euler simulation of plant + observer at the configured step.
/// The estimation-error dynamics (which do not depend on u) are integrated on
/// an internal 10x finer grid so that the discontinuous injection's
/// discretization chattering stays well below the reported accuracy; the
/// observer trajectory is recovered exactly via xhat = x - T*ebar. Throws
/// Diverged when any state magnitude exceeds 1e12.
Trace simulate(const Scenario& sc);

/// Augments the plant state by the scalar unknown input; the new unknown
/// input is its derivative, bounded by ddot_bound.
LtiSystem augment_for_input_reconstruction(const LtiSystem& sys, double ddot_bound,
                                           RankTolerance tol = {});

/// Scenario for an augmented system: records delta_hat (estimate of the
/// original unknown input) and optionally closes the loop via sc.control.feedback.
Trace closed_loop_simulate(const Scenario& sc);

/// Eigenvalues of A - B K.
Eigen::VectorXcd nominal_eigen_check(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                                     const Eigen::MatrixXd& K);

/// First time after which |eta_i| < tol * max(1, |x_i|) holds componentwise
/// for a trailing window; returns nullopt when never settled.
std::optional<double> settling_time(const Trace& tr, double tol, double window = 1.0);

}  // namespace uiobs
