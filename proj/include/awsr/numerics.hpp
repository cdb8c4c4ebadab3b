#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>

namespace awsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Matrix-free symmetric positive definite operator on vectors of length
/// `dimension`. The caller guarantees symmetry and positive definiteness.
struct LinearOperator {
    Index dimension = 0;
    std::function<Vector(const Vector&)> apply;
};

struct CgResult {
    Vector x;
    int iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Conjugate gradient for op(x) = rhs. Stops when the true residual
/// satisfies ||op(x) - rhs|| <= tol * ||rhs||; otherwise returns the
/// max_iter iterate with converged = false.
/// Throws std::runtime_error naming the iteration if a non-finite value
/// appears during the recurrence.
CgResult conjugate_gradient(const LinearOperator& op, const Vector& rhs,
                            double tol, int max_iter);

/// Same, warm-started from x0.
CgResult conjugate_gradient(const LinearOperator& op, const Vector& rhs,
                            double tol, int max_iter, const Vector& x0);

/// Probabilistic linearity probe: checks apply(a*x + b*y) = a*apply(x) +
/// b*apply(y) on random vectors within rel_tol.
bool check_linearity(const LinearOperator& op, std::uint64_t seed,
                     double rel_tol = 1e-10, int probes = 8);

/// Eigendecomposition of a symmetric matrix, eigenvalues sorted descending,
/// eigenvector j in column j.
struct SymEig {
    Vector eigenvalues;
    Matrix eigenvectors;
};

/// Symmetric eigendecomposition. The input is symmetrized as (A + A^T)/2
/// before factorization. Throws on non-square input.
SymEig sym_eig(const Matrix& a);

struct Svd {
    Matrix u;
    Vector singular_values;  // descending
    Matrix v;
};

/// Thin singular value decomposition A = U diag(s) V^T.
Svd svd(const Matrix& a);

/// Singular value thresholding: U diag(max(0, s_i - tau)) V^T.
/// Throws std::invalid_argument for tau < 0.
Matrix svt(const Matrix& a, double tau);

/// Applies the pseudo-inverse of the matrix behind `eig` from the right:
/// returns B V L+ V^T, where L+ inverts eigenvalues above
/// rank_tol * max eigenvalue and zeroes the rest. `eig` must come from a
/// positive semi-definite matrix.
Matrix pinv_apply(const SymEig& eig, const Matrix& b, double rank_tol = 1e-12);

}  // namespace awsr
