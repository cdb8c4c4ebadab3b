#include "awsr/experiment.hpp"

#include "awsr/rng.hpp"
#include "awsr/spectral.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <tuple>

namespace awsr {

namespace {

using json = nlohmann::ordered_json;

std::string format_rate(double rate) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", rate);
    return buf;
}

std::string format_metric(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.10f", value);
    return buf;
}

std::string format_objective(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t size) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

void validate_config(const ExperimentConfig& config) {
    if (config.repeats < 1)
        throw std::invalid_argument("experiment: repeats must be >= 1");
    if (config.methods.empty())
        throw std::invalid_argument("experiment: no methods selected");
    for (const auto& m : config.methods)
        if (m != "awsr" && m != "lsr_single" && m != "lsr_concat")
            throw std::invalid_argument("experiment: unknown method '" + m + "'");
    for (double r : config.missing_rates)
        if (!(r >= 0.0 && r < 1.0))
            throw std::invalid_argument(
                "experiment: missing rates must lie in [0,1)");
    config.hyperparams.validate();
}

ResultRow run_cell(const MultiViewDataset& dataset,
                   const ExperimentConfig& config, const std::string& method,
                   double rate, int repeat) {
    ResultRow row;
    row.method = method;
    row.missing_rate = rate;
    row.repeat_index = repeat;
    row.seed = derive_seed(config.hyperparams.seed, method, rate, repeat);

    const auto started = std::chrono::steady_clock::now();
    try {
        const ObservationMask mask = generate_mask(
            dataset.n, dataset.view_count(), rate, mix_seed(row.seed, 1));
        const MultiViewDataset masked =
            apply_mask(dataset, mask, config.fill_policy);

        Hyperparams hp = config.hyperparams;
        hp.seed = mix_seed(row.seed, 2);
        const std::uint64_t kmeans_seed = mix_seed(row.seed, 3);

        Matrix coefficient;
        if (method == "awsr") {
            AwsrResult result = run_awsr(masked, mask, hp);
            coefficient = std::move(result.state.z);
            row.outer_iters = result.report.outer_iters;
            row.final_objective = result.report.final_objective;
            row.objective_history = std::move(result.state.objective_history);
        } else {
            const LsrMode mode = method == "lsr_single"
                                     ? LsrMode::PerViewBest
                                     : LsrMode::Concatenated;
            LsrResult result = run_lsr_baseline(masked, mask, hp, mode);
            coefficient = std::move(result.coefficient);
        }

        const auto labels = cluster_coefficient_matrix(
            coefficient, dataset.k, config.kmeans_restarts, kmeans_seed);
        row.metrics = score(labels, dataset.labels);
    } catch (const std::exception& e) {
        row.status = std::string("failed: ") + e.what();
    }
    row.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    return row;
}

std::vector<AggregateEntry> aggregate_rows(const std::vector<ResultRow>& rows) {
    std::vector<AggregateEntry> entries;
    std::vector<std::pair<std::string, double>> keys;
    for (const auto& row : rows) {
        const auto key = std::make_pair(row.method, row.missing_rate);
        if (std::find(keys.begin(), keys.end(), key) == keys.end())
            keys.push_back(key);
    }
    for (const auto& [method, rate] : keys) {
        std::vector<MetricsReport> ok_runs;
        for (const auto& row : rows)
            if (row.method == method && row.missing_rate == rate &&
                row.status == "ok")
                ok_runs.push_back(row.metrics);
        if (ok_runs.empty()) continue;
        AggregateEntry entry;
        entry.method = method;
        entry.missing_rate = rate;
        entry.report = aggregate(ok_runs);
        entries.push_back(std::move(entry));
    }
    return entries;
}

void atomic_write(const std::filesystem::path& file, const std::string& body) {
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp);
        out << body;
    }
    std::filesystem::rename(tmp, file);
}

json metrics_json(const MetricsReport& m) {
    return json{{"acc_pairwise", m.acc_pairwise},
                {"acc_hungarian", m.acc_hungarian},
                {"nmi", m.nmi},
                {"purity", m.purity}};
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view method,
                          double rate, int repeat) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, &base_seed, sizeof(base_seed));
    h = fnv1a(h, method.data(), method.size());
    const std::string canonical_rate = format_rate(rate);
    h = fnv1a(h, canonical_rate.data(), canonical_rate.size());
    h = fnv1a(h, &repeat, sizeof(repeat));
    return h;
}

ExperimentOutput run_experiment_on(const MultiViewDataset& dataset,
                                   const ExperimentConfig& config) {
    validate_config(config);
    const MultiViewDataset prepared =
        config.normalize ? normalize_views(dataset) : dataset;

    ExperimentOutput output;
    for (const auto& method : config.methods)
        for (double rate : config.missing_rates)
            for (int repeat = 0; repeat < config.repeats; ++repeat) {
                ResultRow row = run_cell(prepared, config, method, rate, repeat);
                if (config.log_timings)
                    std::printf("[run] %s r=%s repeat=%d: acc_h=%.4f (%.2fs, %s)\n",
                                row.method.c_str(), format_rate(rate).c_str(),
                                repeat, row.metrics.acc_hungarian,
                                row.wall_time_seconds,
                                row.status == "ok" ? "ok" : row.status.c_str());
                output.rows.push_back(std::move(row));
            }

    std::sort(output.rows.begin(), output.rows.end(),
              [](const ResultRow& a, const ResultRow& b) {
                  return std::tie(a.method, a.missing_rate, a.repeat_index) <
                         std::tie(b.method, b.missing_rate, b.repeat_index);
              });
    output.aggregates = aggregate_rows(output.rows);
    return output;
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
    const MultiViewDataset dataset = load_dataset(config.data_path);
    ExperimentOutput output = run_experiment_on(dataset, config);
    write_results_csv(output, config.output_path.string() + ".csv");
    write_results_json(output, config,
                       config.output_path.string() + ".json");
    return output;
}

std::vector<GridChoice> grid_search_on(const MultiViewDataset& dataset,
                                       const ExperimentConfig& config) {
    validate_config(config);
    if (config.grid.empty())
        throw std::invalid_argument("grid_search: empty grid");
    const MultiViewDataset prepared =
        config.normalize ? normalize_views(dataset) : dataset;

    std::vector<GridChoice> choices;
    for (double rate : config.missing_rates) {
        // One mask per rate, shared by every candidate triple.
        const std::uint64_t mask_seed =
            derive_seed(config.hyperparams.seed, "grid-mask", rate, 0);
        const ObservationMask mask =
            generate_mask(prepared.n, prepared.view_count(), rate, mask_seed);
        const MultiViewDataset masked =
            apply_mask(prepared, mask, config.fill_policy);

        GridChoice best;
        bool have_best = false;
        for (const auto& [gamma, lambda, alpha] : config.grid) {
            Hyperparams hp = config.hyperparams;
            hp.gamma = gamma;
            hp.lambda = lambda;
            hp.alpha = alpha;
            const AwsrResult result = run_awsr(masked, mask, hp);
            double mean_acc = 0.0;
            for (int repeat = 0; repeat < config.repeats; ++repeat) {
                const auto labels = cluster_coefficient_matrix(
                    result.state.z, prepared.k, config.kmeans_restarts,
                    derive_seed(config.hyperparams.seed, "grid-kmeans", rate,
                                repeat));
                mean_acc += acc_hungarian(labels, prepared.labels);
            }
            mean_acc /= config.repeats;

            const bool wins =
                !have_best || mean_acc > best.mean_acc_hungarian ||
                (mean_acc == best.mean_acc_hungarian &&
                 std::tie(lambda, best.gamma, best.alpha) >
                     std::tie(best.lambda, gamma, alpha));
            if (wins) {
                best = GridChoice{rate, gamma, lambda, alpha, mean_acc};
                have_best = true;
            }
        }
        choices.push_back(best);
    }
    return choices;
}

std::vector<GridChoice> grid_search(const ExperimentConfig& config) {
    return grid_search_on(load_dataset(config.data_path), config);
}

void write_results_csv(const ExperimentOutput& output,
                       const std::filesystem::path& file) {
    std::string body = "# awsr-results v1\n";
    body += "method,missing_rate,repeat_index,seed,acc_pairwise,acc_hungarian,"
            "nmi,purity,outer_iters,final_objective,status\n";
    for (const auto& row : output.rows) {
        body += row.method;
        body += ',' + format_rate(row.missing_rate);
        body += ',' + std::to_string(row.repeat_index);
        body += ',' + std::to_string(row.seed);
        body += ',' + format_metric(row.metrics.acc_pairwise);
        body += ',' + format_metric(row.metrics.acc_hungarian);
        body += ',' + format_metric(row.metrics.nmi);
        body += ',' + format_metric(row.metrics.purity);
        body += ',' + std::to_string(row.outer_iters);
        body += ',' + format_objective(row.final_objective);
        body += ',' + (row.status == "ok" ? row.status : "\"" + row.status + "\"");
        body += '\n';
    }
    atomic_write(file, body);
}

void write_results_json(const ExperimentOutput& output,
                        const ExperimentConfig& config,
                        const std::filesystem::path& file) {
    json root;
    root["schema"] = "awsr-results v1";
    root["config"] = {
        {"data", config.data_path.string()},
        {"methods", config.methods},
        {"missing_rates", config.missing_rates},
        {"repeats", config.repeats},
        {"gamma", config.hyperparams.gamma},
        {"lambda", config.hyperparams.lambda},
        {"alpha", config.hyperparams.alpha},
        {"delta", config.hyperparams.delta},
        {"uzawa_iters", config.hyperparams.uzawa_iters},
        {"outer_tol", config.hyperparams.outer_tol},
        {"max_outer_iters", config.hyperparams.max_outer_iters},
        {"cg_tol", config.hyperparams.cg_tol},
        {"seed", config.hyperparams.seed},
        {"fill", to_string(config.fill_policy)},
        {"kmeans_restarts", config.kmeans_restarts},
        {"normalize", config.normalize},
    };
    root["rows"] = json::array();
    for (const auto& row : output.rows) {
        json r = {
            {"method", row.method},
            {"missing_rate", row.missing_rate},
            {"repeat_index", row.repeat_index},
            {"seed", row.seed},
            {"metrics", metrics_json(row.metrics)},
            {"outer_iters", row.outer_iters},
            {"final_objective", row.final_objective},
            {"status", row.status},
        };
        if (!row.objective_history.empty())
            r["objective_history"] = row.objective_history;
        root["rows"].push_back(std::move(r));
    }
    root["aggregates"] = json::array();
    for (const auto& entry : output.aggregates) {
        root["aggregates"].push_back({
            {"method", entry.method},
            {"missing_rate", entry.missing_rate},
            {"repeats", entry.report.repeats},
            {"mean", metrics_json(entry.report.mean)},
            {"stddev", metrics_json(entry.report.stddev)},
        });
    }
    atomic_write(file, root.dump(2) + "\n");
}

}  // namespace awsr
