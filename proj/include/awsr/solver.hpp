#pragma once

#include "awsr/dataset.hpp"
#include "awsr/numerics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace awsr {

struct Hyperparams {
    double gamma = 1.0;   // nuclear-norm weight
    double lambda = 1.0;  // Frobenius weight
    double alpha = 1.0;   // split-penalty weight
    double delta = 1.0;   // dual-ascent step on diag(Z)
    int uzawa_iters = 50;
    double uzawa_diag_tol = 1e-6;
    double outer_tol = 1e-5;
    int max_outer_iters = 200;
    double cg_tol = 1e-10;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SolverState {
    Matrix j;                          // n x n separated variable
    Matrix z;                          // n x n consensus coefficient matrix
    std::vector<Matrix> imputed_views; // full X_i with current missing blocks
    Vector y;                          // dual multiplier on diag(Z)
    std::vector<double> objective_history;
    int iter = 0;
};

struct ConvergenceReport {
    bool converged = false;
    int outer_iters = 0;
    double final_objective = 0.0;
    double max_diag_abs = 0.0;  // max |diag(Z)| before the final projection
    double dj = 0.0, dz = 0.0, dx = 0.0;  // last step norms
    double j_residual = 0.0;    // gradient residual of the J stationarity
    double x_residual = 0.0;    // gradient residual of the imputation step
    double initial_data_norm = 0.0;
    double max_j_norm = 0.0, max_z_norm = 0.0, max_x_norm = 0.0;
    std::vector<std::string> warnings;
};

/// Full objective: sum_i ||(X_i - X_i J) W^(i)||_F^2 + gamma ||Z||_* +
/// (lambda/2) ||Z||_F^2 + (alpha/2) ||J - Z||_F^2, with X_i taken from the
/// state's imputed views and W^(i) the diagonal observation indicator.
double objective(const SolverState& state, const MultiViewDataset& data,
                 const ObservationMask& mask, const Hyperparams& hp);

/// The matrix-free left-hand side of the J stationarity system:
/// Y -> sum_i G_i Y M_i + (alpha/2) Y over column-stacked n x n matrices,
/// where G_i = X_i^T X_i and M_i keeps view i's observed columns.
LinearOperator make_j_operator(std::vector<Matrix> grams,
                               const ObservationMask& mask, double alpha);

/// Solves the J subproblem by conjugate gradient on the vectorized system,
/// warm-started from state.j. Returns the minimizer; a CG convergence
/// failure is reported through `warning` when given.
Matrix update_j(const SolverState& state, const MultiViewDataset& data,
                const ObservationMask& mask, const Hyperparams& hp,
                std::string* warning = nullptr);

/// Re-imputes each view's missing block from the stationarity system
/// X^m B^mm = -X^o B^om, with B = (I-J) M (I-J)^T restricted to
/// observed/missing sample positions and B^mm handled by eigendecomposition
/// plus pseudo-inverse. Views without missing samples are returned unchanged.
std::vector<Matrix> update_missing(const SolverState& state,
                                   const MultiViewDataset& data,
                                   const ObservationMask& mask,
                                   const Hyperparams& hp);

struct ZUpdate {
    Matrix z;
    Vector y;
    int rounds = 0;
    double max_diag_abs = 0.0;
};

/// Dual ascent on the zero-diagonal constraint: repeats
///   Z <- svt( (alpha/(lambda+alpha)) J - Y, gamma/(lambda+alpha) )
///   y <- y + delta * diag(Z)
/// until max |diag(Z)| < uzawa_diag_tol or uzawa_iters rounds, warm-started
/// from state.y. Throws when the multiplier diverges (step too large).
ZUpdate update_z(const SolverState& state, const Hyperparams& hp);

struct StationarityResiduals {
    double j_residual = 0.0;
    double x_residual = 0.0;
};

/// First-order residuals of the J and imputation subproblems at the given
/// state, used for convergence diagnostics.
StationarityResiduals stationarity_residuals(const SolverState& state,
                                             const MultiViewDataset& data,
                                             const ObservationMask& mask,
                                             const Hyperparams& hp);

struct AwsrResult {
    SolverState state;
    ConvergenceReport report;
};

/// Alternating minimization driver: update_j -> update_missing -> update_z
/// until the relative step norm drops below outer_tol or the iteration cap.
/// Records the objective after every outer iteration, then zeroes diag(Z)
/// (the pre-projection max |diag| is reported).
AwsrResult run_awsr(const MultiViewDataset& data, const ObservationMask& mask,
                    const Hyperparams& hp);

/// Coefficient matrix of min ||X - X Z||_F^2 + lambda ||Z||_F^2 with
/// diag(Z) = 0, solved in closed form via the Lagrange correction of the
/// unconstrained ridge solution.
Matrix lsr_coefficient(const Matrix& x, double lambda);

enum class LsrMode { PerViewBest, Concatenated };

struct LsrResult {
    Matrix coefficient;
    int selected_view = -1;               // PerViewBest only
    std::vector<double> view_scores;      // best-match accuracy per view
};

/// Reference baselines: missing columns are filled with seeded uniform
/// values in [0,1]; PerViewBest solves the constrained ridge per view and
/// keeps the view whose clustering scores best against the ground truth,
/// Concatenated stacks all views' features and solves once.
LsrResult run_lsr_baseline(const MultiViewDataset& data,
                           const ObservationMask& mask, const Hyperparams& hp,
                           LsrMode mode);

}  // namespace awsr
