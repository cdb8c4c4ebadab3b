#include "awsr/numerics.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace awsr {

namespace {

Vector random_unit_vector(Index n, std::mt19937_64& gen) {
    Vector v(n);
    for (Index i = 0; i < n; ++i) {
        // 53-bit uniform in [0,1), portable across standard libraries.
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        v[i] = 2.0 * u - 1.0;
    }
    const double norm = v.norm();
    if (norm > 0) v /= norm;
    return v;
}

}  // namespace

CgResult conjugate_gradient(const LinearOperator& op, const Vector& rhs,
                            double tol, int max_iter) {
    return conjugate_gradient(op, rhs, tol, max_iter, Vector::Zero(rhs.size()));
}

CgResult conjugate_gradient(const LinearOperator& op, const Vector& rhs,
                            double tol, int max_iter, const Vector& x0) {
    if (rhs.size() != op.dimension || x0.size() != op.dimension)
        throw std::invalid_argument("conjugate_gradient: size mismatch");
    if (!(tol > 0))
        throw std::invalid_argument("conjugate_gradient: tol must be positive");

    CgResult result;
    result.x = x0;
    const double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) {
        result.x.setZero();
        result.converged = true;
        return result;
    }

    Vector r = rhs - op.apply(result.x);
    Vector p = r;
    double rs = r.squaredNorm();
    const double target = tol * rhs_norm;

    int iter = 0;
    bool restarted = false;
    while (iter < max_iter) {
        if (std::sqrt(rs) <= target) {
            // Recurrence says done; confirm against the true residual, which
            // can drift after many iterations.
            const double true_res = (rhs - op.apply(result.x)).norm();
            if (true_res <= target || restarted) {
                result.relative_residual = true_res / rhs_norm;
                result.converged = true_res <= target * (1.0 + 1e-12);
                result.iterations = iter;
                return result;
            }
            r = rhs - op.apply(result.x);
            p = r;
            rs = r.squaredNorm();
            restarted = true;
            continue;
        }
        const Vector v = op.apply(p);
        const double pv = p.dot(v);
        if (!std::isfinite(pv) || pv <= 0.0)
            throw std::runtime_error(
                "conjugate_gradient: numerical breakdown at iteration " +
                std::to_string(iter) + " (non-SPD or non-finite curvature)");
        const double step = rs / pv;
        result.x += step * p;
        r -= step * v;
        const double rs_new = r.squaredNorm();
        if (!std::isfinite(rs_new))
            throw std::runtime_error(
                "conjugate_gradient: non-finite residual at iteration " +
                std::to_string(iter));
        p = r + (rs_new / rs) * p;
        rs = rs_new;
        ++iter;
    }

    result.relative_residual = (rhs - op.apply(result.x)).norm() / rhs_norm;
    result.converged = result.relative_residual <= tol;
    result.iterations = iter;
    return result;
}

bool check_linearity(const LinearOperator& op, std::uint64_t seed,
                     double rel_tol, int probes) {
    std::mt19937_64 gen(seed);
    for (int t = 0; t < probes; ++t) {
        const Vector x = random_unit_vector(op.dimension, gen);
        const Vector y = random_unit_vector(op.dimension, gen);
        const double a = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
        const double b = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
        const Vector lhs = op.apply(a * x + b * y);
        const Vector fx = op.apply(x);
        const Vector fy = op.apply(y);
        const double scale =
            std::abs(a) * fx.norm() + std::abs(b) * fy.norm() + 1e-300;
        if ((lhs - a * fx - b * fy).norm() > rel_tol * scale) return false;
    }
    return true;
}

SymEig sym_eig(const Matrix& a) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("sym_eig: matrix must be square, got " +
                                    std::to_string(a.rows()) + "x" +
                                    std::to_string(a.cols()));
    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("sym_eig: eigendecomposition failed");
    // Eigen returns ascending order; flip to descending.
    SymEig out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

Svd svd(const Matrix& a) {
    if (!a.allFinite())
        throw std::invalid_argument("svd: input contains non-finite values");
    Eigen::BDCSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Svd out;
    out.u = solver.matrixU();
    out.singular_values = solver.singularValues();
    out.v = solver.matrixV();
    return out;
}

Matrix svt(const Matrix& a, double tau) {
    if (tau < 0.0)
        throw std::invalid_argument("svt: threshold must be nonnegative");
    const Svd dec = svd(a);
    const Vector shrunk =
        (dec.singular_values.array() - tau).max(0.0).matrix();
    return dec.u * shrunk.asDiagonal() * dec.v.transpose();
}

Matrix pinv_apply(const SymEig& eig, const Matrix& b, double rank_tol) {
    if (b.cols() != eig.eigenvalues.size())
        throw std::invalid_argument("pinv_apply: column count mismatch");
    const double lambda_max = eig.eigenvalues.size() > 0
                                  ? std::max(eig.eigenvalues[0], 0.0)
                                  : 0.0;
    const double cutoff = rank_tol * lambda_max;
    Vector inv = Vector::Zero(eig.eigenvalues.size());
    for (Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues[i] > cutoff && eig.eigenvalues[i] > 0.0)
            inv[i] = 1.0 / eig.eigenvalues[i];
    return ((b * eig.eigenvectors) * inv.asDiagonal()) *
           eig.eigenvectors.transpose();
}

}  // namespace awsr
