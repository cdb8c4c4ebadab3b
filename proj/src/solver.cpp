#include "awsr/solver.hpp"

#include "awsr/metrics.hpp"
#include "awsr/rng.hpp"
#include "awsr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>

namespace awsr {

namespace {

constexpr int kBaselineKmeansRestarts = 10;

void check_shapes(const MultiViewDataset& data, const ObservationMask& mask) {
    if (data.view_count() == 0)
        throw std::invalid_argument("solver: dataset has no views");
    if (mask.n != data.n || mask.views != data.view_count())
        throw std::invalid_argument("solver: mask shape mismatch");
}

std::vector<Matrix> compute_grams(const std::vector<Matrix>& views) {
    std::vector<Matrix> grams;
    grams.reserve(views.size());
    for (const Matrix& x : views)
        grams.push_back(x.transpose() * x);
    return grams;
}

// Right-hand side C = sum_i G_i M_i + (alpha/2) Z.
Matrix j_system_rhs(const std::vector<Matrix>& grams,
                    const ObservationMask& mask, double alpha,
                    const Matrix& z) {
    const Index n = z.rows();
    Matrix c = 0.5 * alpha * z;
    for (std::size_t i = 0; i < grams.size(); ++i) {
        for (Index j = 0; j < n; ++j)
            if (mask.observed(j, static_cast<int>(i)))
                c.col(j) += grams[i].col(j);
    }
    return c;
}

double missing_block_norm_sq(const std::vector<Matrix>& a,
                             const std::vector<Matrix>& b,
                             const ObservationMask& mask) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (Index j : mask.missing_samples(static_cast<int>(i)))
            total += (a[i].col(j) - b[i].col(j)).squaredNorm();
    return total;
}

double missing_block_norm(const std::vector<Matrix>& views,
                          const ObservationMask& mask) {
    double total = 0.0;
    for (std::size_t i = 0; i < views.size(); ++i)
        for (Index j : mask.missing_samples(static_cast<int>(i)))
            total += views[i].col(j).squaredNorm();
    return std::sqrt(total);
}

double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace

void Hyperparams::validate() const {
    if (!(gamma > 0) || !(lambda > 0) || !(alpha > 0) || !(delta > 0))
        throw std::invalid_argument(
            "hyperparams: gamma, lambda, alpha, delta must be positive");
    if (!(outer_tol > 0) || !(cg_tol > 0) || !(uzawa_diag_tol > 0))
        throw std::invalid_argument("hyperparams: tolerances must be positive");
    if (uzawa_iters < 1 || max_outer_iters < 1)
        throw std::invalid_argument("hyperparams: iteration caps must be >= 1");
}

double objective(const SolverState& state, const MultiViewDataset& data,
                 const ObservationMask& mask, const Hyperparams& hp) {
    check_shapes(data, mask);
    const Matrix& j = state.j;
    const Matrix& z = state.z;
    if (j.rows() != data.n || j.cols() != data.n || z.rows() != data.n ||
        z.cols() != data.n)
        throw std::invalid_argument("objective: J/Z dimension mismatch");

    double value = 0.0;
    for (int i = 0; i < data.view_count(); ++i) {
        const Matrix& x = state.imputed_views[i];
        const auto obs = mask.observed_samples(i);
        if (obs.empty()) continue;
        const Matrix x_obs = x(Eigen::all, obs);
        const Matrix j_obs = j(Eigen::all, obs);
        value += (x_obs - x * j_obs).squaredNorm();
    }
    value += hp.gamma * svd(z).singular_values.sum();
    value += 0.5 * hp.lambda * z.squaredNorm();
    value += 0.5 * hp.alpha * (j - z).squaredNorm();
    return value;
}

LinearOperator make_j_operator(std::vector<Matrix> grams,
                               const ObservationMask& mask, double alpha) {
    const Index n = mask.n;
    auto shared_grams =
        std::make_shared<std::vector<Matrix>>(std::move(grams));
    auto observed = std::make_shared<std::vector<std::vector<Index>>>();
    for (int i = 0; i < mask.views; ++i)
        observed->push_back(mask.observed_samples(i));

    LinearOperator op;
    op.dimension = n * n;
    op.apply = [n, alpha, shared_grams, observed](const Vector& x) -> Vector {
        Eigen::Map<const Matrix> y(x.data(), n, n);
        Matrix r = (0.5 * alpha) * y;
        for (std::size_t i = 0; i < shared_grams->size(); ++i) {
            const auto& obs = (*observed)[i];
            if (obs.empty()) continue;
            const Matrix y_obs = y(Eigen::all, obs);
            const Matrix product = (*shared_grams)[i] * y_obs;
            for (std::size_t c = 0; c < obs.size(); ++c)
                r.col(obs[c]) += product.col(static_cast<Index>(c));
        }
        return Eigen::Map<const Vector>(r.data(), n * n);
    };
    return op;
}

Matrix update_j(const SolverState& state, const MultiViewDataset& data,
                const ObservationMask& mask, const Hyperparams& hp,
                std::string* warning) {
    check_shapes(data, mask);
    hp.validate();
    const Index n = data.n;
    const auto grams = compute_grams(state.imputed_views);
    const Matrix c = j_system_rhs(grams, mask, hp.alpha, state.z);
    const LinearOperator op = make_j_operator(grams, mask, hp.alpha);

    const Matrix j_prev = (state.j.rows() == n && state.j.cols() == n)
                              ? state.j
                              : Matrix::Zero(n, n);
    const Vector j_prev_vec = Eigen::Map<const Vector>(j_prev.data(), n * n);
    const Vector c_vec = Eigen::Map<const Vector>(c.data(), n * n);

    // Solve for the correction to the previous iterate; the residual target
    // stays relative to the full right-hand side, so the warm start only
    // saves iterations.
    const Vector shifted_rhs = c_vec - op.apply(j_prev_vec);
    const double c_norm = c_vec.norm();
    const double shifted_norm = shifted_rhs.norm();
    if (shifted_norm == 0.0) return j_prev;
    const double tol = c_norm > 0.0
                           ? hp.cg_tol * c_norm / shifted_norm
                           : hp.cg_tol;
    const int max_iter = static_cast<int>(n * n);
    const CgResult cg = conjugate_gradient(op, shifted_rhs, tol, max_iter);
    if (!cg.converged && warning)
        *warning = "update_j: conjugate gradient stopped at relative residual " +
                   std::to_string(cg.relative_residual) + " after " +
                   std::to_string(cg.iterations) + " iterations";
    Matrix j = j_prev;
    j += Eigen::Map<const Matrix>(cg.x.data(), n, n);
    return j;
}

std::vector<Matrix> update_missing(const SolverState& state,
                                   const MultiViewDataset& data,
                                   const ObservationMask& mask,
                                   const Hyperparams& hp) {
    check_shapes(data, mask);
    const Index n = data.n;
    std::vector<Matrix> views = state.imputed_views;
    const Matrix e = Matrix::Identity(n, n) - state.j;
    for (int i = 0; i < data.view_count(); ++i) {
        const auto miss = mask.missing_samples(i);
        if (miss.empty()) continue;
        const auto obs = mask.observed_samples(i);

        // B = E M E^T, needed only on its columns at missing positions.
        Matrix scaled = e;  // E M: zero the missing columns
        for (Index j : miss) scaled.col(j).setZero();
        const Matrix e_miss_t = e(miss, Eigen::all).transpose();  // n x m
        const Matrix b_cols = scaled * e_miss_t;                  // B(:, miss)
        const Matrix b_om = b_cols(obs, Eigen::all);
        const Matrix b_mm = b_cols(miss, Eigen::all);

        const SymEig eig = sym_eig(b_mm);
        const Matrix x_obs = views[i](Eigen::all, obs);
        const Matrix x_miss = pinv_apply(eig, -(x_obs * b_om));
        for (std::size_t c = 0; c < miss.size(); ++c)
            views[i].col(miss[c]) = x_miss.col(static_cast<Index>(c));
        (void)hp;
    }
    return views;
}

ZUpdate update_z(const SolverState& state, const Hyperparams& hp) {
    hp.validate();
    const Index n = state.j.rows();
    const double tau = hp.gamma / (hp.lambda + hp.alpha);
    const double scale = hp.alpha / (hp.lambda + hp.alpha);
    const Matrix m = scale * state.j;

    ZUpdate out;
    out.y = state.y.size() == n ? state.y : Vector::Zero(n);
    const double y_ref = std::max(1.0, out.y.norm());

    Matrix shifted(n, n);
    for (int round = 0; round < hp.uzawa_iters; ++round) {
        shifted = m;
        shifted.diagonal() -= out.y;
        out.z = svt(shifted, tau);
        const Vector diag = out.z.diagonal();
        out.max_diag_abs = diag.cwiseAbs().maxCoeff();
        out.y += hp.delta * diag;
        out.rounds = round + 1;
        if (out.y.norm() > 1e6 * y_ref)
            throw std::runtime_error(
                "update_z: multiplier diverged after " +
                std::to_string(out.rounds) +
                " rounds; reduce the step size delta");
        if (out.max_diag_abs < hp.uzawa_diag_tol) break;
    }
    return out;
}

StationarityResiduals stationarity_residuals(const SolverState& state,
                                             const MultiViewDataset& data,
                                             const ObservationMask& mask,
                                             const Hyperparams& hp) {
    check_shapes(data, mask);
    const Index n = data.n;
    const auto grams = compute_grams(state.imputed_views);
    const LinearOperator op = make_j_operator(grams, mask, hp.alpha);
    const Matrix c = j_system_rhs(grams, mask, hp.alpha, state.z);

    StationarityResiduals res;
    const Vector j_vec = Eigen::Map<const Vector>(state.j.data(), n * n);
    const Vector c_vec = Eigen::Map<const Vector>(c.data(), n * n);
    res.j_residual = (op.apply(j_vec) - c_vec).norm();

    double x_sq = 0.0;
    const Matrix e = Matrix::Identity(n, n) - state.j;
    for (int i = 0; i < data.view_count(); ++i) {
        const auto miss = mask.missing_samples(i);
        if (miss.empty()) continue;
        const auto obs = mask.observed_samples(i);
        Matrix scaled = e;
        for (Index j : miss) scaled.col(j).setZero();
        const Matrix e_miss_t = e(miss, Eigen::all).transpose();
        const Matrix b_cols = scaled * e_miss_t;
        const Matrix b_om = b_cols(obs, Eigen::all);
        const Matrix b_mm = b_cols(miss, Eigen::all);
        const Matrix x_obs = state.imputed_views[i](Eigen::all, obs);
        const Matrix x_miss = state.imputed_views[i](Eigen::all, miss);
        x_sq += (x_miss * b_mm + x_obs * b_om).squaredNorm();
    }
    res.x_residual = std::sqrt(x_sq);
    return res;
}

AwsrResult run_awsr(const MultiViewDataset& data, const ObservationMask& mask,
                    const Hyperparams& hp) {
    check_shapes(data, mask);
    hp.validate();
    if (data.k < 2)
        throw std::invalid_argument("run_awsr: need at least 2 clusters");
    for (const Matrix& x : data.views)
        if (!x.allFinite())
            throw std::invalid_argument("run_awsr: non-finite view entries");

    const Index n = data.n;
    AwsrResult result;
    SolverState& state = result.state;
    ConvergenceReport& report = result.report;

    state.j = Matrix::Zero(n, n);
    state.z = Matrix::Zero(n, n);
    state.y = Vector::Zero(n);
    state.imputed_views = data.views;

    double data_norm_sq = 0.0;
    for (const Matrix& x : data.views) data_norm_sq += x.squaredNorm();
    report.initial_data_norm = std::sqrt(data_norm_sq);
    report.max_x_norm = missing_block_norm(state.imputed_views, mask);

    for (int t = 0; t < hp.max_outer_iters; ++t) {
        std::string cg_warning;
        const Matrix j_new = update_j(state, data, mask, hp, &cg_warning);
        if (!cg_warning.empty()) report.warnings.push_back(cg_warning);
        report.dj = (j_new - state.j).norm();
        state.j = j_new;

        auto views_new = update_missing(state, data, mask, hp);
        report.dx =
            std::sqrt(missing_block_norm_sq(views_new, state.imputed_views, mask));
        state.imputed_views = std::move(views_new);

        const ZUpdate zu = update_z(state, hp);
        report.dz = (zu.z - state.z).norm();
        state.z = zu.z;
        state.y = zu.y;
        report.max_diag_abs = zu.max_diag_abs;

        const double obj = objective(state, data, mask, hp);
        if (!std::isfinite(obj))
            throw std::runtime_error("run_awsr: objective diverged at outer iteration " +
                                     std::to_string(t + 1));
        state.objective_history.push_back(obj);
        state.iter = t + 1;

        report.max_j_norm = std::max(report.max_j_norm, state.j.norm());
        report.max_z_norm = std::max(report.max_z_norm, state.z.norm());
        report.max_x_norm = std::max(
            report.max_x_norm, missing_block_norm(state.imputed_views, mask));

        const double rel_step = std::max({report.dj, report.dz, report.dx}) /
                                std::max(1.0, state.z.norm());
        if (rel_step < hp.outer_tol) {
            report.converged = true;
            break;
        }
    }

    report.outer_iters = state.iter;
    report.final_objective =
        state.objective_history.empty() ? 0.0 : state.objective_history.back();
    const StationarityResiduals res =
        stationarity_residuals(state, data, mask, hp);
    report.j_residual = res.j_residual;
    report.x_residual = res.x_residual;

    // Finalize: the consensus matrix leaves with an exactly zero diagonal.
    state.z.diagonal().setZero();
    return result;
}

Matrix lsr_coefficient(const Matrix& x, double lambda) {
    if (!(lambda > 0))
        throw std::invalid_argument("lsr_coefficient: lambda must be positive");
    const Index n = x.cols();
    if (n == 1) return Matrix::Zero(1, 1);

    const Matrix gram = x.transpose() * x;
    Matrix regularized = gram;
    regularized.diagonal().array() += lambda;
    const Eigen::LLT<Matrix> llt(regularized);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("lsr_coefficient: factorization failed");
    const Matrix unconstrained = llt.solve(gram);          // (G+lI)^-1 G
    const Matrix inverse = llt.solve(Matrix::Identity(n, n));

    // Lagrange correction zeroing each diagonal entry.
    Matrix z(n, n);
    for (Index j = 0; j < n; ++j) {
        const double mu = unconstrained(j, j) / inverse(j, j);
        z.col(j) = unconstrained.col(j) - mu * inverse.col(j);
        z(j, j) = 0.0;
    }
    return z;
}

LsrResult run_lsr_baseline(const MultiViewDataset& data,
                           const ObservationMask& mask, const Hyperparams& hp,
                           LsrMode mode) {
    check_shapes(data, mask);
    if (!(hp.lambda > 0))
        throw std::invalid_argument("run_lsr_baseline: lambda must be positive");

    // Random fill of the missing columns, seeded per view.
    std::vector<Matrix> filled = data.views;
    for (int i = 0; i < data.view_count(); ++i) {
        std::mt19937_64 gen(mix_seed(hp.seed, 0x10f1 + static_cast<std::uint64_t>(i)));
        for (Index j : mask.missing_samples(i))
            for (Index f = 0; f < filled[i].rows(); ++f)
                filled[i](f, j) = uniform01(gen);
    }

    LsrResult result;
    if (mode == LsrMode::Concatenated) {
        Index total_features = 0;
        for (const Matrix& x : filled) total_features += x.rows();
        Matrix stacked(total_features, data.n);
        Index row = 0;
        for (const Matrix& x : filled) {
            stacked.middleRows(row, x.rows()) = x;
            row += x.rows();
        }
        result.coefficient = lsr_coefficient(stacked, hp.lambda);
        return result;
    }

    // Single-best: score each view's coefficient matrix against the ground
    // truth and keep the winner.
    double best_score = -1.0;
    for (int i = 0; i < data.view_count(); ++i) {
        Matrix z = lsr_coefficient(filled[i], hp.lambda);
        const auto labels = cluster_coefficient_matrix(
            z, data.k, kBaselineKmeansRestarts,
            mix_seed(hp.seed, 0x5eed + static_cast<std::uint64_t>(i)));
        const double score = acc_hungarian(labels, data.labels);
        result.view_scores.push_back(score);
        if (score > best_score) {
            best_score = score;
            result.selected_view = i;
            result.coefficient = std::move(z);
        }
    }
    return result;
}

}  // namespace awsr
