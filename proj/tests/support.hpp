// Shared helpers for the test suites: seeded generators, synthetic
// subspace data, and independent reference implementations used as oracles.
#pragma once

#include "awsr/dataset.hpp"
#include "awsr/numerics.hpp"
#include "awsr/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

namespace testsupport {

using awsr::Index;
using awsr::Matrix;
using awsr::Vector;

// ---------------------------------------------------------------------------
// Portable random draws (the mt19937_64 stream is pinned by the standard).

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double gaussian(std::mt19937_64& gen) {
    // Box-Muller; avoids implementation-defined std::normal_distribution.
    double u1 = uniform01(gen);
    while (u1 <= 1e-300) u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

inline Matrix random_matrix(Index rows, Index cols, std::mt19937_64& gen) {
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = gaussian(gen);
    return m;
}

inline Matrix random_spd(Index n, std::mt19937_64& gen) {
    const Matrix m = random_matrix(n, n, gen);
    return m.transpose() * m + Matrix::Identity(n, n);
}

inline Matrix random_symmetric(Index n, std::mt19937_64& gen) {
    const Matrix m = random_matrix(n, n, gen);
    return 0.5 * (m + m.transpose());
}

// ---------------------------------------------------------------------------
// Synthetic multi-view data: k linear subspaces per view, unit-norm columns.

inline awsr::MultiViewDataset make_subspace_dataset(int clusters,
                                                    Index subspace_dim,
                                                    Index ambient_dim,
                                                    Index per_cluster,
                                                    int views,
                                                    std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    awsr::MultiViewDataset ds;
    ds.n = clusters * per_cluster;
    ds.k = clusters;
    for (int c = 0; c < clusters; ++c)
        for (Index s = 0; s < per_cluster; ++s) ds.labels.push_back(c);
    for (int v = 0; v < views; ++v) {
        Matrix view(ambient_dim, ds.n);
        for (int c = 0; c < clusters; ++c) {
            const Matrix basis_raw = random_matrix(ambient_dim, subspace_dim, gen);
            const Matrix basis =
                Eigen::HouseholderQR<Matrix>(basis_raw).householderQ() *
                Matrix::Identity(ambient_dim, subspace_dim);
            const Matrix coeffs = random_matrix(subspace_dim, per_cluster, gen);
            view.middleCols(c * per_cluster, per_cluster) = basis * coeffs;
        }
        for (Index j = 0; j < ds.n; ++j) {
            const double norm = view.col(j).norm();
            if (norm > 0) view.col(j) /= norm;
        }
        ds.views.push_back(std::move(view));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Dense oracles.

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return k;
}

// Direct dense solve of the vectorized J system
// [sum_i M_i x G_i + (alpha/2) I] vec(J) = vec(C).
inline Matrix dense_j_solve(const std::vector<Matrix>& views,
                            const awsr::ObservationMask& mask, double alpha,
                            const Matrix& z) {
    const Index n = z.rows();
    Matrix system = 0.5 * alpha * Matrix::Identity(n * n, n * n);
    Matrix c = 0.5 * alpha * z;
    for (std::size_t i = 0; i < views.size(); ++i) {
        const Matrix gram = views[i].transpose() * views[i];
        Matrix indicator = Matrix::Zero(n, n);
        for (Index j = 0; j < n; ++j)
            if (mask.observed(j, static_cast<int>(i))) indicator(j, j) = 1.0;
        system += kron(indicator, gram);
        c += gram * indicator;
    }
    const Vector solution =
        system.ldlt().solve(Eigen::Map<const Vector>(c.data(), n * n));
    return Eigen::Map<const Matrix>(solution.data(), n, n);
}

// Dense pseudo-inverse via SVD thresholding.
inline Matrix dense_pinv(const Matrix& a, double tol = 1e-12) {
    Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = dec.singularValues();
    const double cutoff = tol * (s.size() ? s[0] : 0.0);
    Vector inv = Vector::Zero(s.size());
    for (Index i = 0; i < s.size(); ++i)
        if (s[i] > cutoff && s[i] > 0) inv[i] = 1.0 / s[i];
    return dec.matrixV() * inv.asDiagonal() * dec.matrixU().transpose();
}

// Scaled form of the Z subproblem: min tau ||Z||_* + 1/2 ||Z - M||_F^2
// s.t. diag(Z) = 0, with M = (alpha/(lambda+alpha)) J and
// tau = gamma/(lambda+alpha). Objective in the original scaling:
inline double z_objective(const Matrix& z, const Matrix& j, double gamma,
                          double lambda, double alpha) {
    Eigen::BDCSVD<Matrix> dec(z);
    return gamma * dec.singularValues().sum() + 0.5 * lambda * z.squaredNorm() +
           0.5 * alpha * (j - z).squaredNorm();
}

// Douglas-Rachford splitting reference for the constrained Z subproblem:
// f1 = tau ||.||_* + 1/2 ||. - M||^2 (closed-form prox), f2 = diag-zero
// indicator. Independent of the dual-ascent route used by the solver.
inline Matrix z_reference_splitting(const Matrix& j, double gamma,
                                    double lambda, double alpha,
                                    int max_iters = 20000,
                                    double tol = 1e-13) {
    const double tau = gamma / (lambda + alpha);
    const Matrix m = (alpha / (lambda + alpha)) * j;
    const double t = 1.0;
    Matrix w = Matrix::Zero(j.rows(), j.cols());
    Matrix z1 = w;
    for (int it = 0; it < max_iters; ++it) {
        const Matrix p = (t * m + w) / (t + 1.0);
        z1 = awsr::svt(p, tau * t / (t + 1.0));
        Matrix reflected = 2.0 * z1 - w;
        reflected.diagonal().setZero();
        const double gap = (reflected - z1).norm();
        w += reflected - z1;
        if (gap <= tol * std::max(1.0, z1.norm())) break;
    }
    z1.diagonal().setZero();
    return z1;
}

// Projected (sub)gradient descent on the scaled Z subproblem. Converges to
// high precision when no singular value is annihilated at the optimum; the
// test instances are chosen that way and cross-checked against the
// splitting reference.
inline Matrix z_projected_subgradient(const Matrix& j, double gamma,
                                      double lambda, double alpha,
                                      int iters = 60000, double step = 0.4) {
    const double tau = gamma / (lambda + alpha);
    const Matrix m = (alpha / (lambda + alpha)) * j;
    Matrix z = Matrix::Zero(j.rows(), j.cols());
    z.diagonal().setZero();
    for (int it = 0; it < iters; ++it) {
        Eigen::JacobiSVD<Matrix> dec(z, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Matrix subgrad = dec.matrixU() * dec.matrixV().transpose();
        Matrix g = tau * subgrad + (z - m);
        z -= step * g;
        z.diagonal().setZero();
    }
    return z;
}

// Diag-constrained ridge regression solved column by column with the
// self-column eliminated (the KKT elimination route).
inline Matrix lsr_kkt_oracle(const Matrix& x, double lambda) {
    const Index n = x.cols();
    Matrix z = Matrix::Zero(n, n);
    for (Index j = 0; j < n; ++j) {
        if (n == 1) break;
        Matrix rest(x.rows(), n - 1);
        Index c = 0;
        for (Index t = 0; t < n; ++t)
            if (t != j) rest.col(c++) = x.col(t);
        const Matrix gram =
            rest.transpose() * rest +
            lambda * Matrix::Identity(n - 1, n - 1);
        const Vector w = gram.llt().solve(rest.transpose() * x.col(j));
        c = 0;
        for (Index t = 0; t < n; ++t)
            if (t != j) z(t, j) = w[c++];
    }
    return z;
}

// ---------------------------------------------------------------------------
// Brute-force metric oracles.

struct PairCounts {
    long long tp = 0, tn = 0, fp = 0, fn = 0;
};

inline PairCounts pair_counts(const std::vector<int>& pred,
                              const std::vector<int>& truth) {
    PairCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i)
        for (std::size_t j = i + 1; j < pred.size(); ++j) {
            const bool sp = pred[i] == pred[j];
            const bool st = truth[i] == truth[j];
            if (sp && st) ++c.tp;
            else if (!sp && !st) ++c.tn;
            else if (sp && !st) ++c.fp;
            else ++c.fn;
        }
    return c;
}

inline double acc_pairwise_oracle(const std::vector<int>& pred,
                                  const std::vector<int>& truth) {
    if (pred.size() == 1) return 1.0;
    const PairCounts c = pair_counts(pred, truth);
    return static_cast<double>(c.tp + c.tn) /
           static_cast<double>(c.tp + c.tn + c.fp + c.fn);
}

inline double acc_hungarian_oracle(const std::vector<int>& pred,
                                   const std::vector<int>& truth) {
    std::map<int, int> pred_ids, truth_ids;
    for (int p : pred) pred_ids.emplace(p, static_cast<int>(pred_ids.size()));
    for (int t : truth) truth_ids.emplace(t, static_cast<int>(truth_ids.size()));
    const int side = std::max<int>(static_cast<int>(pred_ids.size()),
                                   static_cast<int>(truth_ids.size()));
    std::vector<std::vector<long long>> table(
        side, std::vector<long long>(side, 0));
    for (std::size_t i = 0; i < pred.size(); ++i)
        ++table[pred_ids[pred[i]]][truth_ids[truth[i]]];
    std::vector<int> perm(side);
    std::iota(perm.begin(), perm.end(), 0);
    long long best = 0;
    do {
        long long matched = 0;
        for (int a = 0; a < side; ++a) matched += table[a][perm[a]];
        best = std::max(best, matched);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

inline double nmi_oracle(const std::vector<int>& pred,
                         const std::vector<int>& truth) {
    const double n = static_cast<double>(pred.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pp, pt;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        joint[{pred[i], truth[i]}] += 1.0 / n;
        pp[pred[i]] += 1.0 / n;
        pt[truth[i]] += 1.0 / n;
    }
    double hp = 0.0, ht = 0.0, mi = 0.0;
    for (const auto& [key, p] : pp) hp -= p * std::log(p);
    for (const auto& [key, p] : pt) ht -= p * std::log(p);
    for (const auto& [key, p] : joint)
        mi += p * std::log(p / (pp[key.first] * pt[key.second]));
    if (hp == 0.0 && ht == 0.0) return 1.0;
    if (hp == 0.0 || ht == 0.0) return 0.0;
    return mi / std::max(hp, ht);
}

inline double purity_oracle(const std::vector<int>& pred,
                            const std::vector<int>& truth) {
    std::map<int, std::map<int, long long>> clusters;
    for (std::size_t i = 0; i < pred.size(); ++i)
        ++clusters[pred[i]][truth[i]];
    long long majority = 0;
    for (const auto& [cluster, classes] : clusters) {
        long long top = 0;
        for (const auto& [cls, count] : classes) top = std::max(top, count);
        majority += top;
    }
    return static_cast<double>(majority) / static_cast<double>(pred.size());
}

}  // namespace testsupport
