#pragma once

#include "awsr/numerics.hpp"

#include <cstdint>
#include <vector>

namespace awsr {

/// Elementwise (|Z| + |Z^T|) / 2. Throws on non-square input.
Matrix build_affinity(const Matrix& z);

/// Normalized spectral embedding: with D = diag(row sums of A) (zero
/// degrees floored to 1), takes the k leading eigenvectors of
/// D^{-1/2} A D^{-1/2} and normalizes each row to unit length (zero rows
/// stay zero). Returns n x k, one row per sample.
Matrix spectral_embed(const Matrix& affinity, int k);

struct KmeansResult {
    std::vector<int> labels;
    double inertia = 0.0;
};

/// Lloyd's algorithm with k-means++ seeding; returns the lowest-inertia
/// assignment over `restarts` seeded restarts (restart r uses seed + r).
/// Points are the rows of `points`. Throws when k exceeds the number of
/// distinct points.
KmeansResult kmeans(const Matrix& points, int k, int restarts,
                    std::uint64_t seed);

/// Affinity -> embedding -> k-means, the assignment step applied to a
/// consensus coefficient matrix.
std::vector<int> cluster_coefficient_matrix(const Matrix& z, int k,
                                            int restarts, std::uint64_t seed);

}  // namespace awsr
