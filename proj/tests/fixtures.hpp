#pragma once

#include <random>

#include "uiobs/normalform.hpp"

namespace fixtures {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Lateral-motion light-aircraft model: n = 7, q = 2 control inputs, m = 1
// unknown input (rudder actuator fault), p = 2 outputs (roll rate, yaw angle).
inline uiobs::LtiSystem aircraft() {
    uiobs::LtiSystem sys;
    sys.A = MatrixXd{{-0.3, 0, -33, 9.81, 0, -5.4, 0},
                     {-0.1, -8.3, 3.75, 0, 0, 0, -28.6},
                     {0.37, 0, -0.64, 0, 0, -9.5, 0},
                     {0, 1, 0, 0, 0, 0, 0},
                     {0, 0, 1, 0, 0, 0, 0},
                     {0, 0, 0, 0, 0, -10, 0},
                     {0, 0, 0, 0, 0, 0, -5}};
    sys.B = MatrixXd{{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {20, 0}, {0, 10}};
    sys.D = MatrixXd{{0}, {0}, {0}, {0}, {0}, {20}, {0}};
    sys.C = MatrixXd{{0, 1, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0}};
    sys.bounds = VectorXd::Constant(1, 0.02);
    return sys;
}

inline MatrixXd aircraft_Gamma() { return MatrixXd{{-0.2708, 1}, {1, 0}}; }

inline VectorXd aircraft_t4() {
    return VectorXd{{-1.6452, 0, 0, 0.7529, 0, -0.0641, 0.0058}};
}
inline VectorXd aircraft_t7() { return VectorXd{{0, 0, 0, 0, 0, -0.0285, 0}}; }

constexpr double aircraft_beta_123 = -14.9336;

inline MatrixXd aircraft_T() {
    return MatrixXd{{-20.2951, -3.6294, 8.2259, -1.6452, -10.5207, 0.1539, 0},
                    {0, 0, 0, 0, 1, 0, 0},
                    {18.4529, 1, 0, 0, -2.8241, 0.2708, 0},
                    {0, 0, 0, 0.7529, 0, 0, 0},
                    {1, 0, 0, 0, 0.2708, 0, 0},
                    {21.5113, -2.1511, 0.2151, -0.0641, -2.8502, 0.285, -0.0285},
                    {-0.719, 0.1438, -0.0288, 0.0058, 0, 0, 0}};
}

inline MatrixXd aircraft_Abar() {
    return MatrixXd{{-6.4019, 1, 0, 0, 2.006, 0, 0},
                    {-7.0093, 0, 1, 0, 11.1769, 0, 0},
                    {0, 0, 0, 1, 6, 0, 0},
                    {0, 0, 0, 0, 1.3281, 0, 0},
                    {91.7924, 0, 0, 0, -17.8381, 1, 0},
                    {593.4635, 0, 0, 0, -271.7324, 0, 1},
                    {0, 0, 0, -14.9336, -1220.7850, 0, 0}};
}

inline MatrixXd aircraft_Dbar() {
    return MatrixXd{{0}, {0}, {0}, {0}, {0}, {0}, {-701.7}};
}

inline MatrixXd aircraft_Cbar() {
    return MatrixXd{{1, 0, 0, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0, 0}};
}

inline MatrixXd aircraft_Bbar() {
    return MatrixXd{{0, 0},
                    {0, 77.4405},
                    {0, 39.5191},
                    {0, 0},
                    {0, 0},
                    {0, -286},
                    {-701.7, -8406.3602}};
}

inline MatrixXd aircraft_Pi() {
    return MatrixXd{{-6.4019, 2.006},
                    {-7.0093, 11.1769},
                    {0, 6},
                    {0, 1.3281},
                    {91.7924, -17.8381},
                    {593.4635, -271.7324},
                    {0, -1220.7850}};
}

// kappa_{j,0} first
inline std::vector<std::vector<double>> aircraft_gains() {
    return {{11, 17.2047, 13.1556, 5.3348}, {123.4992, 49.369, 9.6484}};
}

inline std::vector<std::vector<double>> aircraft_augmented_gains() {
    return {{134.9229, 112.7629, 46.0741, 9.9838}, {11, 17.2047, 13.1556, 5.3348}};
}

inline VectorXd aircraft_x0() {
    return VectorXd{{-0.5, 0.1, 0.02, 0.2, -0.1, -0.3, 0.2}};
}

constexpr double aircraft_L_ddot = 0.046;

// Delta = 0.008 + 0.01 sin(2t) + 0.002 cos(13t), |Delta| <= 0.02
inline double aircraft_delta(double t) {
    return 0.008 + 0.01 * std::sin(2 * t) + 0.002 * std::cos(13 * t);
}

// Augmented (n = 8) golden matrices; block order as produced by a tie-break
// that keeps the originally-second chain first.
inline MatrixXd aircraft_aug_Abar() {
    return MatrixXd{{-17.8381, 1, 0, 0, 91.7924, 0, 0, 0},
                    {-271.7324, 0, 1, 0, 593.4635, 0, 0, 0},
                    {-1220.785, 0, 0, 1, 0, 0, 0, 0},
                    {-19.8337, 0, 0, 0, 0, 0, 0, 0},
                    {2.006, 0, 0, 0, -6.4019, 1, 0, 0},
                    {11.1769, 0, 0, 0, -7.0093, 0, 1, 0},
                    {6, 0, 0, 0, 0, 0, 0, 1},
                    {1.328, 0, 0, 0, 0, 0, 0, 0}};
}

inline MatrixXd aircraft_aug_Dbar() {
    return MatrixXd{{0}, {0}, {0}, {-701.7}, {0}, {0}, {0}, {0}};
}

inline MatrixXd aircraft_aug_Bbar() {
    return MatrixXd{{0, 0},
                    {0, -286},
                    {-701.7, -8406.3602},
                    {0, 0},
                    {0, 0},
                    {0, 77.4405},
                    {0, 39.5191},
                    {0, 0}};
}

inline MatrixXd aircraft_K() {
    return MatrixXd{{-0.0235, 0.0036, -0.2040, 0.0356, -0.1392, 0.2471, -0.0689},
                    {-0.0258, -0.0749, 0.8998, -0.6702, -0.9164, -0.7995, -0.1821}};
}

inline VectorXd aircraft_h() { return VectorXd{{1, 0}}; }

// Swaps the two mu-blocks of an n = 8, mu = (4,4) matrix pair of row blocks.
inline MatrixXd swap_blocks44(const MatrixXd& M, bool cols) {
    MatrixXd R = M;
    if (cols) {
        R.leftCols(4) = M.rightCols(4);
        R.rightCols(4) = M.leftCols(4);
    } else {
        R.topRows(4) = M.bottomRows(4);
        R.bottomRows(4) = M.topRows(4);
    }
    return R;
}

// Random strongly observable instance built by drawing a system directly in
// the normal form and back-transforming with well-conditioned random T0, G0.
struct RandomInstance {
    uiobs::LtiSystem sys;
    std::vector<int> mu;
    MatrixXd T0, G0;
};

inline RandomInstance random_strongly_observable(std::mt19937& rng, int max_n = 8,
                                                 int max_p = 3, int max_m = 2) {
    std::uniform_int_distribution<int> pick_p(1, max_p);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (int attempt = 0; attempt < 100; ++attempt) {
        const int p = pick_p(rng);
        std::vector<int> mu(p);
        int n = 0;
        for (int j = 0; j < p; ++j) {
            std::uniform_int_distribution<int> pick_mu(1, (max_n - n - (p - 1 - j)) / (p - j));
            mu[j] = pick_mu(rng);
            n += mu[j];
        }
        std::sort(mu.begin(), mu.end(), std::greater<int>());
        const int m = std::uniform_int_distribution<int>(0, std::min(max_m, p))(rng);

        MatrixXd Abar = MatrixXd::Zero(n, n);
        int off = 0;
        std::vector<int> offsets;
        for (int j = 0; j < p; ++j) {
            offsets.push_back(off);
            for (int i = 0; i + 1 < mu[j]; ++i) Abar(off + i, off + i + 1) = 1.0;
            off += mu[j];
        }
        for (int j = 0; j < p; ++j) {
            for (int r = 0; r < n; ++r) Abar(r, offsets[j]) = gauss(rng);
            // beta slots: terminal rows of later blocks, columns 2..mu_j of block j
            for (int k = j + 1; k < p; ++k)
                for (int l = mu[k]; l < mu[j]; ++l)
                    Abar(offsets[k] + mu[k] - 1, offsets[j] + l) = gauss(rng);
        }
        MatrixXd Dbar = MatrixXd::Zero(n, m);
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) Dbar(offsets[j] + mu[j] - 1, i) = gauss(rng);
        MatrixXd Cbar = MatrixXd::Zero(p, n);
        for (int j = 0; j < p; ++j) Cbar(j, offsets[j]) = 1.0;

        MatrixXd T0(n, n), G0(p, p);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) T0(r, c) = gauss(rng);
        for (int r = 0; r < p; ++r)
            for (int c = 0; c < p; ++c) G0(r, c) = gauss(rng);
        if (uiobs::condition_estimate(T0) > 1e4 || uiobs::condition_estimate(G0) > 1e3)
            continue;
        if (m > 0 && uiobs::numerical_rank(Dbar) != m) continue;

        RandomInstance inst;
        inst.sys.A = T0 * Abar * T0.inverse();
        inst.sys.B = MatrixXd::Zero(n, 0);
        inst.sys.D = T0 * Dbar;
        inst.sys.C = G0.inverse() * Cbar * T0.inverse();
        inst.sys.bounds = VectorXd::Ones(m);
        inst.mu = mu;
        inst.T0 = T0;
        inst.G0 = G0;
        try {
            if (!uiobs::is_strongly_observable(inst.sys)) continue;
            // Reject draws whose transformation is too ill-conditioned for
            // tight numerical property checks.
            const auto nf = uiobs::transform(inst.sys);
            if (uiobs::condition_estimate(nf.T) > 1e6) continue;
        } catch (const uiobs::Error&) {
            continue;
        }
        return inst;
    }
    throw std::runtime_error("random_strongly_observable: generation failed");
}

}  // namespace fixtures
