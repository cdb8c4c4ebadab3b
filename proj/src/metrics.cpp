#include "awsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace awsr {

namespace {

void check_lengths(const std::vector<int>& pred,
                   const std::vector<int>& truth) {
    if (pred.size() != truth.size())
        throw std::invalid_argument(
            "metrics: label vectors have different lengths (" +
            std::to_string(pred.size()) + " vs " +
            std::to_string(truth.size()) + ")");
    if (pred.empty())
        throw std::invalid_argument("metrics: empty label vectors");
}

// Remaps arbitrary label values to dense ids 0..k-1 (first-seen order).
std::vector<int> densify(const std::vector<int>& labels, int* k_out) {
    std::unordered_map<int, int> ids;
    std::vector<int> dense(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] =
            ids.emplace(labels[i], static_cast<int>(ids.size()));
        dense[i] = it->second;
    }
    *k_out = static_cast<int>(ids.size());
    return dense;
}

// Contingency counts: cell (p, t) = number of samples with predicted
// cluster p and true class t.
std::vector<std::vector<long long>> contingency(const std::vector<int>& pred,
                                                const std::vector<int>& truth,
                                                int* kp_out, int* kt_out) {
    int kp = 0, kt = 0;
    const auto p = densify(pred, &kp);
    const auto t = densify(truth, &kt);
    std::vector<std::vector<long long>> table(kp,
                                              std::vector<long long>(kt, 0));
    for (std::size_t i = 0; i < p.size(); ++i) ++table[p[i]][t[i]];
    *kp_out = kp;
    *kt_out = kt;
    return table;
}

double entropy(const std::vector<long long>& counts, double n) {
    double h = 0.0;
    for (long long c : counts) {
        if (c == 0) continue;
        const double prob = static_cast<double>(c) / n;
        h -= prob * std::log(prob);
    }
    return h;
}

}  // namespace

double acc_pairwise(const std::vector<int>& pred,
                    const std::vector<int>& truth) {
    check_lengths(pred, truth);
    const std::size_t n = pred.size();
    if (n == 1) return 1.0;
    long long agree = 0;
    long long total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool same_pred = pred[i] == pred[j];
            const bool same_truth = truth[i] == truth[j];
            if (same_pred == same_truth) ++agree;  // TP or TN
            ++total;
        }
    }
    return static_cast<double>(agree) / static_cast<double>(total);
}

std::vector<int> hungarian_min_assignment(const Matrix& cost) {
    if (cost.rows() != cost.cols())
        throw std::invalid_argument("hungarian: cost matrix must be square");
    const int n = static_cast<int>(cost.rows());
    const double inf = std::numeric_limits<double>::infinity();
    // Potentials-based Kuhn-Munkres over 1-based arrays.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

double acc_hungarian(const std::vector<int>& pred,
                     const std::vector<int>& truth) {
    check_lengths(pred, truth);
    int kp = 0, kt = 0;
    const auto table = contingency(pred, truth, &kp, &kt);
    const int side = std::max(kp, kt);
    Matrix cost = Matrix::Zero(side, side);
    for (int a = 0; a < kp; ++a)
        for (int b = 0; b < kt; ++b)
            cost(a, b) = -static_cast<double>(table[a][b]);
    const auto match = hungarian_min_assignment(cost);
    long long matched = 0;
    for (int a = 0; a < kp; ++a)
        if (match[a] < kt) matched += table[a][match[a]];
    return static_cast<double>(matched) / static_cast<double>(pred.size());
}

double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    int kp = 0, kt = 0;
    const auto table = contingency(pred, truth, &kp, &kt);
    const double n = static_cast<double>(pred.size());

    std::vector<long long> row_sums(kp, 0), col_sums(kt, 0);
    for (int a = 0; a < kp; ++a)
        for (int b = 0; b < kt; ++b) {
            row_sums[a] += table[a][b];
            col_sums[b] += table[a][b];
        }
    const double h_pred = entropy(row_sums, n);
    const double h_truth = entropy(col_sums, n);
    if (h_pred == 0.0 && h_truth == 0.0) return 1.0;
    if (h_pred == 0.0 || h_truth == 0.0) return 0.0;

    double mi = 0.0;
    for (int a = 0; a < kp; ++a) {
        for (int b = 0; b < kt; ++b) {
            if (table[a][b] == 0) continue;
            const double joint = static_cast<double>(table[a][b]) / n;
            const double pa = static_cast<double>(row_sums[a]) / n;
            const double pb = static_cast<double>(col_sums[b]) / n;
            mi += joint * std::log(joint / (pa * pb));
        }
    }
    double value = mi / std::max(h_pred, h_truth);
    if (value < 0.0 && value > -1e-12) value = 0.0;
    if (value > 1.0 && value < 1.0 + 1e-12) value = 1.0;
    return value;
}

double purity(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_lengths(pred, truth);
    int kp = 0, kt = 0;
    const auto table = contingency(pred, truth, &kp, &kt);
    long long majority = 0;
    for (int a = 0; a < kp; ++a)
        majority += *std::max_element(table[a].begin(), table[a].end());
    return static_cast<double>(majority) / static_cast<double>(pred.size());
}

MetricsReport score(const std::vector<int>& pred,
                    const std::vector<int>& truth) {
    MetricsReport r;
    r.acc_pairwise = acc_pairwise(pred, truth);
    r.acc_hungarian = acc_hungarian(pred, truth);
    r.nmi = nmi(pred, truth);
    r.purity = purity(pred, truth);
    return r;
}

AggregateReport aggregate(const std::vector<MetricsReport>& runs) {
    if (runs.empty())
        throw std::invalid_argument("aggregate: no runs");
    AggregateReport agg;
    agg.repeats = static_cast<int>(runs.size());
    const double n = static_cast<double>(runs.size());
    auto accumulate = [&](auto field) {
        double mean = 0.0;
        for (const auto& r : runs) mean += r.*field;
        mean /= n;
        double var = 0.0;
        for (const auto& r : runs) {
            const double d = r.*field - mean;
            var += d * d;
        }
        var /= n;  // population variance over the reported repeats
        agg.mean.*field = mean;
        agg.stddev.*field = std::sqrt(var);
    };
    accumulate(&MetricsReport::acc_pairwise);
    accumulate(&MetricsReport::acc_hungarian);
    accumulate(&MetricsReport::nmi);
    accumulate(&MetricsReport::purity);
    return agg;
}

}  // namespace awsr
