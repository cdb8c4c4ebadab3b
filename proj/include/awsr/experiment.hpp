#pragma once

#include "awsr/dataset.hpp"
#include "awsr/metrics.hpp"
#include "awsr/solver.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace awsr {

struct ExperimentConfig {
    std::filesystem::path data_path;
    std::vector<std::string> methods = {"awsr"};  // awsr | lsr_single | lsr_concat
    std::vector<double> missing_rates = {0.1, 0.2, 0.3, 0.4, 0.5};
    int repeats = 10;
    Hyperparams hyperparams;
    std::filesystem::path output_path = "results";
    FillPolicy fill_policy = FillPolicy::Zero;
    std::vector<std::array<double, 3>> grid;  // (gamma, lambda, alpha) triples
    int kmeans_restarts = 10;
    bool normalize = true;
    bool log_timings = true;  // wall times go to stdout, never into the files
};

struct ResultRow {
    std::string method;
    double missing_rate = 0.0;
    int repeat_index = 0;
    std::uint64_t seed = 0;
    MetricsReport metrics;
    int outer_iters = 0;
    double final_objective = 0.0;
    double wall_time_seconds = 0.0;
    std::string status = "ok";
    std::vector<double> objective_history;
};

struct AggregateEntry {
    std::string method;
    double missing_rate = 0.0;
    AggregateReport report;
};

struct ExperimentOutput {
    std::vector<ResultRow> rows;         // sorted by (method, rate, repeat)
    std::vector<AggregateEntry> aggregates;
};

/// Deterministic per-cell seed from the base seed, method name, missing
/// rate (canonicalized to 6 decimals) and repeat index.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view method,
                          double rate, int repeat);

/// Runs every (method, rate, repeat) cell, scores it, aggregates per
/// (method, rate), and writes <output>.csv and <output>.json atomically.
/// A failing cell is recorded as a flagged row; the experiment continues.
ExperimentOutput run_experiment(const ExperimentConfig& config);

/// Same, on an already-loaded dataset (used by tests and the bindings).
ExperimentOutput run_experiment_on(const MultiViewDataset& dataset,
                                   const ExperimentConfig& config);

struct GridChoice {
    double missing_rate = 0.0;
    double gamma = 0.0, lambda = 0.0, alpha = 0.0;
    double mean_acc_hungarian = 0.0;
};

/// Exhaustive search over the configured (gamma, lambda, alpha) grid with a
/// held-fixed mask per rate; the winner per rate maximizes mean best-match
/// accuracy, ties broken by larger lambda, then smaller gamma, then smaller
/// alpha.
std::vector<GridChoice> grid_search(const ExperimentConfig& config);
std::vector<GridChoice> grid_search_on(const MultiViewDataset& dataset,
                                       const ExperimentConfig& config);

void write_results_csv(const ExperimentOutput& output,
                       const std::filesystem::path& file);
void write_results_json(const ExperimentOutput& output,
                        const ExperimentConfig& config,
                        const std::filesystem::path& file);

}  // namespace awsr
