#pragma once

#include <vector>

#include <Eigen/Dense>

#include "uiobs/normalform.hpp"

namespace uiobs {

enum class InjectionKind { Discontinuous, ContinuousHomogeneous };

/// Observer in transformed coordinates:
///   xhat' = Abar xhat + Bbar u + Pi sigma + l(sigma),  sigma = ybar - Cbar xhat.
struct ObserverConfig {
    Eigen::MatrixXd Abar, Bbar, Cbar;
    std::vector<int> mu;
    Eigen::MatrixXd Pi;                     // n x p linear injection
    std::vector<std::vector<double>> gains; // gains[j] = (kappa_{j,0}, ..., kappa_{j,mu_j-1})
    std::vector<InjectionKind> kinds;       // per subsystem; empty = all discontinuous
    double q = -0.5;                        // homogeneity degree for the continuous variant

    int n() const { return static_cast<int>(Abar.rows()); }
    int p() const { return static_cast<int>(Cbar.rows()); }

    /// Checks dimensions, gain positivity, q range, and (for continuous
    /// subsystems) that no unknown input acts on the block.
    void validate(const Eigen::MatrixXd& Dbar) const;
};

/// Signed power |v|^gamma * sign(v) with sign(0) = 0.
double signed_power(double v, double gamma);

/// Pi with column j equal to the alpha column of block j of Abar.
Eigen::MatrixXd build_linear_injection(const Eigen::MatrixXd& Abar,
                                       const std::vector<int>& mu);

/// Stacked nonlinear injection l(sigma) for all subsystems.
Eigen::VectorXd nonlinear_injection(const Eigen::VectorXd& sigma_y,
                                    const ObserverConfig& cfg);

struct GainConditionResult {
    bool satisfied = false;
    std::vector<double> margins;  // kappa_{j,0} - sum_i L_i |dbar_terminal,i| per subsystem

    explicit operator bool() const { return satisfied; }
};

/// Convergence condition kappa_{j,0} > sum_i L_i |dbar_{terminal row of j, i}|.
GainConditionResult check_gain_condition(const ObserverConfig& cfg,
                                         const Eigen::MatrixXd& Dbar,
                                         const Eigen::VectorXd& bounds);

/// Standard differentiator gain cascade kappa_k = lambda_k * L^((mu_j-k)/mu_j)
/// for chain order mu_j <= 6; returns (kappa_0, ..., kappa_{mu_j-1}).
std::vector<double> default_gains(int mu_j, double L_eff);

/// Right-hand side of the observer dynamics.
Eigen::VectorXd observer_rhs(const Eigen::VectorXd& xhat, const Eigen::VectorXd& ybar,
                             const Eigen::VectorXd& u, const ObserverConfig& cfg);

/// Convenience: full config from a transform result plus gains.
ObserverConfig make_observer(const NormalFormResult& nf,
                             const std::vector<std::vector<double>>& gains,
                             InjectionKind kind = InjectionKind::Discontinuous,
                             double q = -0.5);

}  // namespace uiobs
