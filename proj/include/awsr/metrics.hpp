#pragma once

#include "awsr/numerics.hpp"

#include <vector>

namespace awsr {

struct MetricsReport {
    double acc_pairwise = 0.0;
    double acc_hungarian = 0.0;
    double nmi = 0.0;
    double purity = 0.0;
};

/// Pair-counting accuracy (Rand index): over all unordered sample pairs,
/// (TP + TN) / all pairs, where TP pairs share both predicted and true
/// cluster and TN pairs share neither.
double acc_pairwise(const std::vector<int>& pred, const std::vector<int>& truth);

/// Best-match accuracy: maximum matched fraction over cluster-to-class
/// bijections, solved on the (padded square) contingency matrix.
double acc_hungarian(const std::vector<int>& pred,
                     const std::vector<int>& truth);

/// Normalized mutual information with max-entropy normalization and natural
/// logarithms. Returns 1 when both partitions are trivial, 0 when exactly
/// one is.
double nmi(const std::vector<int>& pred, const std::vector<int>& truth);

/// Fraction of samples in their predicted cluster's majority true class.
double purity(const std::vector<int>& pred, const std::vector<int>& truth);

MetricsReport score(const std::vector<int>& pred,
                    const std::vector<int>& truth);

struct AggregateReport {
    MetricsReport mean;
    MetricsReport stddev;  // population standard deviation
    int repeats = 0;
};

AggregateReport aggregate(const std::vector<MetricsReport>& runs);

/// Minimum-cost assignment on a square cost matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Returns row -> column.
std::vector<int> hungarian_min_assignment(const Matrix& cost);

}  // namespace awsr
