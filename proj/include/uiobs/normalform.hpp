#pragma once

#include <vector>

#include <Eigen/Dense>

#include "uiobs/model.hpp"

namespace uiobs {

/// Coupling coefficients beta_{j,k,l} between subsystems j < k (1-based
/// subsystem indices in sorted order, l = 1..mu_j-1). Entries not stored are
/// structurally zero.
class BetaCoefficients {
  public:
    BetaCoefficients() = default;
    explicit BetaCoefficients(const std::vector<int>& mu);

    double operator()(int j, int k, int l) const;
    void set(int j, int k, int l, double value);

    const std::vector<int>& mu() const { return mu_; }

    struct Entry {
        int j, k, l;
        double value;
    };
    std::vector<Entry> entries() const;  // nonzero-storable entries, ordered

  private:
    std::vector<int> mu_;
    // values_[j-1][k-1][l-1], sized mu_j-1 in l; only j < k used.
    std::vector<std::vector<std::vector<double>>> values_;
};

/// Output transformation and output-injection decomposition produced by the
/// first step of the normal-form construction.
struct Step1Result {
    Eigen::MatrixXd Gamma;    // p x p output transform (sorted subsystem order)
    Eigen::MatrixXd Xi;       // n x p output injection, A = Acheck - Xi * C
    Eigen::MatrixXd Acheck;   // n x n auxiliary dynamics, A + Xi * C
    Eigen::MatrixXd Ccheck;   // p x n auxiliary outputs, Gamma * C
    Eigen::MatrixXd D;        // n x m unknown-input matrix (unchanged)
    Eigen::MatrixXd Z;        // n x n accumulated row matrix
    std::vector<int> mu;      // subsystem orders, descending, sum = n
    std::vector<int> perm;    // perm[k] = original output index of subsystem k+1

    int n() const { return static_cast<int>(Acheck.rows()); }
    int p() const { return static_cast<int>(Ccheck.rows()); }

    /// Reduced observability matrix O_R stacking c_j^T Acheck^i,
    /// i = 0..mu_j-1, for each subsystem.
    Eigen::MatrixXd reduced_observability() const;
};

/// Complete transformation into the observer normal form.
struct NormalFormResult {
    Eigen::MatrixXd T;        // n x n state transform, xbar = T^-1 x
    Eigen::MatrixXd Gamma;    // p x p output transform, ybar = Gamma y
    Eigen::MatrixXd Xi;       // n x p output injection from step 1
    std::vector<int> mu;      // subsystem orders
    BetaCoefficients beta;
    Eigen::MatrixXd Abar, Bbar, Dbar, Cbar;
    Eigen::MatrixXd alpha;    // n x p, column j = first column of block j of Abar

    int n() const { return static_cast<int>(Abar.rows()); }
    int p() const { return static_cast<int>(Cbar.rows()); }

    /// Row offsets of the subsystem blocks (offset[j] = mu_1 + ... + mu_j).
    std::vector<int> block_offsets() const;
};

/// Step 1: output transformation and output-feedback decomposition maximizing
/// the relative degrees of the outputs with respect to the unknown inputs.
Step1Result step1_decompose(const LtiSystem& sys, RankTolerance tol = {});

/// Step 2: anchor columns t_{mu_1}, t_{mu_1+mu_2}, ..., t_n from O_R.
std::vector<Eigen::VectorXd> step2_anchor_columns(const Step1Result& s1,
                                                  double cond_threshold = 1e12);

/// Step 3: coupling coefficients from the block-Toeplitz systems.
BetaCoefficients step3_beta(const Step1Result& s1,
                            const std::vector<Eigen::VectorXd>& anchors);

/// Step 4: remaining columns of the state transformation matrix.
Eigen::MatrixXd step4_build_T(const Step1Result& s1,
                              const std::vector<Eigen::VectorXd>& anchors,
                              const BetaCoefficients& beta);

/// Full pipeline: steps 1-4 plus the transformed matrices and the structural
/// validation. Eliminates feedthrough first when F is present.
NormalFormResult transform(const LtiSystem& sys, RankTolerance tol = {});

struct StructureViolation {
    char matrix;  // 'A', 'D' or 'C'
    int row, col;
    double magnitude;
};

/// Checks the normal-form sparsity pattern of Abar, Dbar, Cbar.
/// Empty report means the pattern holds to the given relative tolerance.
std::vector<StructureViolation> validate_structure(const NormalFormResult& r,
                                                   double rel_tol = 1e-8);

}  // namespace uiobs
