#include "awsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace awsr {

namespace {

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Index count_distinct_rows(const Matrix& points) {
    std::vector<Index> order(points.rows());
    std::iota(order.begin(), order.end(), Index{0});
    auto row_less = [&](Index a, Index b) {
        for (Index c = 0; c < points.cols(); ++c) {
            if (points(a, c) < points(b, c)) return true;
            if (points(a, c) > points(b, c)) return false;
        }
        return false;
    };
    std::sort(order.begin(), order.end(), row_less);
    Index distinct = points.rows() > 0 ? 1 : 0;
    for (Index i = 1; i < points.rows(); ++i)
        if (row_less(order[i - 1], order[i])) ++distinct;
    return distinct;
}

struct LloydRun {
    std::vector<int> labels;
    double inertia = std::numeric_limits<double>::infinity();
};

LloydRun lloyd_once(const Matrix& points, int k, std::uint64_t seed) {
    const Index n = points.rows();
    std::mt19937_64 gen(seed);

    // k-means++ seeding.
    Matrix centroids(k, points.cols());
    std::vector<Index> chosen;
    {
        const Index first = static_cast<Index>(gen() % static_cast<std::uint64_t>(n));
        centroids.row(0) = points.row(first);
        chosen.push_back(first);
        Vector dist2 = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
        for (int c = 1; c < k; ++c) {
            const double total = dist2.sum();
            Index pick = -1;
            if (total > 0.0) {
                double target = uniform01(gen) * total;
                for (Index i = 0; i < n; ++i) {
                    target -= dist2[i];
                    if (target <= 0.0) {
                        pick = i;
                        break;
                    }
                }
                if (pick < 0) pick = n - 1;
            } else {
                // All remaining mass at distance zero: take any point not yet
                // selected as a centroid (a distinct one exists by precondition).
                for (Index i = 0; i < n; ++i) {
                    bool duplicate = false;
                    for (Index s : chosen)
                        if ((points.row(i) - points.row(s)).squaredNorm() == 0.0)
                            duplicate = true;
                    if (!duplicate) {
                        pick = i;
                        break;
                    }
                }
                if (pick < 0) pick = static_cast<Index>(gen() % static_cast<std::uint64_t>(n));
            }
            centroids.row(c) = points.row(pick);
            chosen.push_back(pick);
            dist2 = dist2.cwiseMin(
                (points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
        }
    }

    LloydRun run;
    run.labels.assign(n, 0);
    const int max_rounds = 300;
    for (int round = 0; round < max_rounds; ++round) {
        bool changed = false;
        double inertia = 0.0;
        for (Index i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            int arg = 0;
            for (int c = 0; c < k; ++c) {
                const double d = (points.row(i) - centroids.row(c)).squaredNorm();
                if (d < best) {
                    best = d;
                    arg = c;
                }
            }
            if (run.labels[i] != arg) {
                run.labels[i] = arg;
                changed = true;
            }
            inertia += best;
        }
        run.inertia = inertia;
        if (!changed && round > 0) break;

        Matrix sums = Matrix::Zero(k, points.cols());
        std::vector<Index> counts(k, 0);
        for (Index i = 0; i < n; ++i) {
            sums.row(run.labels[i]) += points.row(i);
            ++counts[run.labels[i]];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centroids.row(c) = sums.row(c) / static_cast<double>(counts[c]);
            } else {
                // Empty cluster: restart it at the point farthest from its
                // centroid assignment.
                Index far = 0;
                double far_d = -1.0;
                for (Index i = 0; i < n; ++i) {
                    const double d =
                        (points.row(i) - centroids.row(run.labels[i])).squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centroids.row(c) = points.row(far);
            }
        }
    }
    return run;
}

}  // namespace

Matrix build_affinity(const Matrix& z) {
    if (z.rows() != z.cols())
        throw std::invalid_argument("build_affinity: matrix must be square");
    return 0.5 * (z.cwiseAbs() + z.transpose().cwiseAbs());
}

Matrix spectral_embed(const Matrix& affinity, int k) {
    if (affinity.rows() != affinity.cols())
        throw std::invalid_argument("spectral_embed: affinity must be square");
    const Index n = affinity.rows();
    if (k > n)
        throw std::invalid_argument("spectral_embed: k exceeds sample count");

    Vector degree = affinity.rowwise().sum();
    for (Index i = 0; i < n; ++i)
        if (degree[i] <= 0.0) degree[i] = 1.0;  // isolated node floor
    const Vector dinv_sqrt = degree.array().rsqrt();
    const Matrix normalized =
        dinv_sqrt.asDiagonal() * affinity * dinv_sqrt.asDiagonal();

    const SymEig eig = sym_eig(normalized);
    Matrix embedding = eig.eigenvectors.leftCols(k);
    for (Index i = 0; i < n; ++i) {
        const double norm = embedding.row(i).norm();
        if (norm > 0.0) embedding.row(i) /= norm;
    }
    return embedding;
}

KmeansResult kmeans(const Matrix& points, int k, int restarts,
                    std::uint64_t seed) {
    if (k < 1) throw std::invalid_argument("kmeans: k must be positive");
    if (restarts < 1)
        throw std::invalid_argument("kmeans: restarts must be >= 1");
    if (points.rows() < 1) throw std::invalid_argument("kmeans: no points");
    if (count_distinct_rows(points) < k)
        throw std::invalid_argument(
            "kmeans: k exceeds the number of distinct points");

    KmeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        const LloydRun run = lloyd_once(points, k, seed + static_cast<std::uint64_t>(r));
        if (run.inertia < best.inertia) {
            best.inertia = run.inertia;
            best.labels = run.labels;
        }
    }
    return best;
}

std::vector<int> cluster_coefficient_matrix(const Matrix& z, int k,
                                            int restarts, std::uint64_t seed) {
    const Matrix affinity = build_affinity(z);
    const Matrix embedding = spectral_embed(affinity, k);
    return kmeans(embedding, k, restarts, seed).labels;
}

}  // namespace awsr
