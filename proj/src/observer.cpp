#include "uiobs/observer.hpp"

#include <cmath>
#include <numeric>

namespace uiobs {

double signed_power(double v, double gamma) {
    if (v == 0.0) return 0.0;
    if (gamma == 0.0) return v > 0.0 ? 1.0 : -1.0;
    return std::pow(std::abs(v), gamma) * (v > 0.0 ? 1.0 : -1.0);
}

void ObserverConfig::validate(const Eigen::MatrixXd& Dbar) const {
    const int nn = n(), pp = p();
    if (static_cast<int>(mu.size()) != pp)
        throw DimensionError("ObserverConfig: mu size != p");
    if (std::accumulate(mu.begin(), mu.end(), 0) != nn)
        throw DimensionError("ObserverConfig: mu does not sum to n");
    if (Abar.cols() != nn || Cbar.cols() != nn || Bbar.rows() != nn ||
        Pi.rows() != nn || Pi.cols() != pp)
        throw DimensionError("ObserverConfig: matrix dimension mismatch");
    if (static_cast<int>(gains.size()) != pp)
        throw DimensionError("ObserverConfig: one gain list per subsystem required");
    for (int j = 0; j < pp; ++j) {
        if (static_cast<int>(gains[j].size()) != mu[j])
            throw DimensionError("ObserverConfig: gain list j must have mu_j entries");
        for (double k : gains[j])
            if (!(k > 0.0)) throw DimensionError("ObserverConfig: gains must be positive");
    }
    if (!kinds.empty() && static_cast<int>(kinds.size()) != pp)
        throw DimensionError("ObserverConfig: kinds must be empty or size p");
    if (!(q > -1.0 && q < 0.0))
        throw DimensionError("ObserverConfig: homogeneity degree q must lie in (-1, 0)");
    if (Dbar.size() != 0 && Dbar.rows() == nn) {
        int off = 0;
        for (int j = 0; j < pp; ++j) {
            const bool cont = !kinds.empty() && kinds[j] == InjectionKind::ContinuousHomogeneous;
            if (cont && Dbar.middleRows(off, mu[j]).cwiseAbs().maxCoeff() > 0.0)
                throw DimensionError(
                    "ObserverConfig: continuous injection requires a disturbance-free subsystem");
            off += mu[j];
        }
    }
}

Eigen::MatrixXd build_linear_injection(const Eigen::MatrixXd& Abar,
                                       const std::vector<int>& mu) {
    const int n = static_cast<int>(Abar.rows());
    const int p = static_cast<int>(mu.size());
    Eigen::MatrixXd Pi(n, p);
    int off = 0;
    for (int j = 0; j < p; ++j) {
        Pi.col(j) = Abar.col(off);
        off += mu[j];
    }
    return Pi;
}

Eigen::VectorXd nonlinear_injection(const Eigen::VectorXd& sigma_y,
                                    const ObserverConfig& cfg) {
    const int p = cfg.p();
    Eigen::VectorXd l = Eigen::VectorXd::Zero(cfg.n());
    int off = 0;
    for (int j = 0; j < p; ++j) {
        const int nu = cfg.mu[j];
        const double s = sigma_y(j);
        const bool cont =
            !cfg.kinds.empty() && cfg.kinds[j] == InjectionKind::ContinuousHomogeneous;
        for (int i = 0; i < nu; ++i) {
            // row i of the block carries gain kappa_{j, nu-1-i}
            const double kappa = cfg.gains[j][nu - 1 - i];
            double gamma;
            if (cont) {
                // dilation coefficients r_k = 1 - (nu - k) q, exponent r_{i+2}/r_1
                const double r1 = 1.0 - (nu - 1.0) * cfg.q;
                gamma = (1.0 - (nu - (i + 2.0)) * cfg.q) / r1;
            } else {
                gamma = static_cast<double>(nu - 1 - i) / nu;
            }
            l(off + i) = kappa * signed_power(s, gamma);
        }
        off += nu;
    }
    return l;
}

GainConditionResult check_gain_condition(const ObserverConfig& cfg,
                                         const Eigen::MatrixXd& Dbar,
                                         const Eigen::VectorXd& bounds) {
    GainConditionResult res;
    res.satisfied = true;
    int off = 0;
    for (int j = 0; j < cfg.p(); ++j) {
        off += cfg.mu[j];
        double worst = 0.0;
        for (int i = 0; i < Dbar.cols(); ++i)
            worst += bounds(i) * std::abs(Dbar(off - 1, i));
        const double margin = cfg.gains[j][0] - worst;
        res.margins.push_back(margin);
        if (!(margin > 0.0)) res.satisfied = false;
    }
    return res;
}

std::vector<double> default_gains(int mu_j, double L_eff) {
    // Base cascade for robust exact differentiators up to order 5.
    static const double lambda[6] = {1.1, 1.5, 2.0, 3.0, 5.0, 8.0};
    if (mu_j < 1 || mu_j > 6)
        throw UnsupportedError("default_gains: chain order must be in 1..6");
    const double L = std::max(L_eff, 1e-6);
    std::vector<double> kappa(mu_j);
    for (int k = 0; k < mu_j; ++k)
        kappa[k] = lambda[k] * std::pow(L, static_cast<double>(mu_j - k) / mu_j);
    return kappa;
}

Eigen::VectorXd observer_rhs(const Eigen::VectorXd& xhat, const Eigen::VectorXd& ybar,
                             const Eigen::VectorXd& u, const ObserverConfig& cfg) {
    const Eigen::VectorXd sigma = ybar - cfg.Cbar * xhat;
    Eigen::VectorXd dx = cfg.Abar * xhat + cfg.Pi * sigma + nonlinear_injection(sigma, cfg);
    if (u.size() > 0) dx += cfg.Bbar * u;
    return dx;
}

ObserverConfig make_observer(const NormalFormResult& nf,
                             const std::vector<std::vector<double>>& gains,
                             InjectionKind kind, double q) {
    ObserverConfig cfg;
    cfg.Abar = nf.Abar;
    cfg.Bbar = nf.Bbar;
    cfg.Cbar = nf.Cbar;
    cfg.mu = nf.mu;
    cfg.Pi = build_linear_injection(nf.Abar, nf.mu);
    cfg.gains = gains;
    cfg.q = q;
    if (kind != InjectionKind::Discontinuous)
        cfg.kinds.assign(nf.mu.size(), kind);
    cfg.validate(nf.Dbar);
    return cfg;
}

}  // namespace uiobs
