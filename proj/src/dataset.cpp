#include "awsr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace awsr {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open " + file.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    // Ignore trailing blank lines only.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

double parse_cell(const std::string& cell, const std::filesystem::path& file,
                  std::size_t row, std::size_t col) {
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
    while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end)
        throw std::runtime_error(file.filename().string() + " row " +
                                 std::to_string(row + 1) + " col " +
                                 std::to_string(col + 1) +
                                 ": non-numeric cell '" + cell + "'");
    if (!std::isfinite(value))
        throw std::runtime_error(file.filename().string() + " row " +
                                 std::to_string(row + 1) + " col " +
                                 std::to_string(col + 1) +
                                 ": non-finite value");
    return value;
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

// Loads one view file: rows are samples, so the returned matrix is
// features x samples.
Matrix load_view_csv(const std::filesystem::path& file) {
    const auto lines = read_lines(file);
    if (lines.empty())
        throw std::runtime_error(file.filename().string() + " is empty");
    std::vector<std::vector<double>> rows;
    rows.reserve(lines.size());
    std::size_t width = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split_csv(lines[r]);
        if (r == 0) {
            width = cells.size();
            if (width == 0)
                throw std::runtime_error(file.filename().string() +
                                         ": empty first row");
        } else if (cells.size() != width) {
            throw std::runtime_error(
                file.filename().string() + " row " + std::to_string(r + 1) +
                " has " + std::to_string(cells.size()) + " values, expected " +
                std::to_string(width));
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c)
            row[c] = parse_cell(cells[c], file, r, c);
        rows.push_back(std::move(row));
    }
    Matrix view(static_cast<Index>(width), static_cast<Index>(rows.size()));
    for (std::size_t s = 0; s < rows.size(); ++s)
        for (std::size_t f = 0; f < width; ++f)
            view(static_cast<Index>(f), static_cast<Index>(s)) = rows[s][f];
    return view;
}

std::vector<int> load_labels_csv(const std::filesystem::path& file) {
    const auto lines = read_lines(file);
    if (lines.empty())
        throw std::runtime_error(file.filename().string() + " is empty");
    std::vector<int> labels;
    labels.reserve(lines.size());
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const std::string& line = lines[r];
        int value = 0;
        const auto [ptr, ec] =
            std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc() || ptr != line.data() + line.size())
            throw std::runtime_error(file.filename().string() + " row " +
                                     std::to_string(r + 1) +
                                     ": expected one integer, got '" + line +
                                     "'");
        labels.push_back(value);
    }
    return labels;
}

// Uniform integer in [0, bound) from raw 64-bit draws; modulo bias is
// negligible for the sample counts involved and the sequence is portable.
Index draw_index(std::mt19937_64& gen, Index bound) {
    return static_cast<Index>(gen() % static_cast<std::uint64_t>(bound));
}

// Picks `count` distinct values uniformly from `pool` (partial
// Fisher-Yates); `pool` is consumed.
std::vector<Index> sample_without_replacement(std::vector<Index> pool,
                                              Index count,
                                              std::mt19937_64& gen) {
    std::vector<Index> picked;
    picked.reserve(count);
    for (Index t = 0; t < count; ++t) {
        const Index j = t + draw_index(gen, static_cast<Index>(pool.size()) - t);
        std::swap(pool[t], pool[j]);
        picked.push_back(pool[t]);
    }
    return picked;
}

}  // namespace

std::vector<Index> ObservationMask::observed_samples(int view) const {
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j)
        if (observed(j, view)) out.push_back(j);
    return out;
}

std::vector<Index> ObservationMask::missing_samples(int view) const {
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j)
        if (!observed(j, view)) out.push_back(j);
    return out;
}

Index ObservationMask::missing_count(int view) const {
    Index count = 0;
    for (Index j = 0; j < n; ++j)
        if (!observed(j, view)) ++count;
    return count;
}

MultiViewDataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw std::runtime_error("dataset directory not found: " + dir.string());

    MultiViewDataset ds;
    for (int i = 1;; ++i) {
        const auto file = dir / ("view_" + std::to_string(i) + ".csv");
        if (!std::filesystem::exists(file)) {
            if (i == 1)
                throw std::runtime_error("no view_1.csv in " + dir.string());
            break;
        }
        ds.views.push_back(load_view_csv(file));
    }

    ds.n = ds.views.front().cols();
    for (int i = 0; i < ds.view_count(); ++i) {
        if (ds.views[i].cols() != ds.n)
            throw std::runtime_error(
                "view_" + std::to_string(i + 1) + ".csv has " +
                std::to_string(ds.views[i].cols()) + " samples but view_1.csv has " +
                std::to_string(ds.n));
    }

    const auto labels_file = dir / "labels.csv";
    if (!std::filesystem::exists(labels_file))
        throw std::runtime_error("no labels.csv in " + dir.string());
    const auto raw = load_labels_csv(labels_file);
    if (static_cast<Index>(raw.size()) != ds.n)
        throw std::runtime_error("labels.csv has " + std::to_string(raw.size()) +
                                 " entries but views have " +
                                 std::to_string(ds.n) + " samples");

    // Remap to contiguous 0..k-1, ordered by original label value.
    std::map<int, int> remap;
    for (int value : raw) remap.emplace(value, 0);
    int next = 0;
    for (auto& [value, id] : remap) id = next++;
    ds.labels.reserve(raw.size());
    for (int value : raw) ds.labels.push_back(remap[value]);
    ds.k = next;
    return ds;
}

MultiViewDataset normalize_views(const MultiViewDataset& ds,
                                 NormalizeReport* report) {
    MultiViewDataset out = ds;
    for (int i = 0; i < out.view_count(); ++i) {
        Matrix& view = out.views[i];
        for (Index j = 0; j < view.cols(); ++j) {
            const double norm = view.col(j).norm();
            if (norm == 0.0) {
                if (report) report->zero_columns.emplace_back(i, j);
            } else {
                view.col(j) /= norm;
            }
        }
    }
    return out;
}

ObservationMask generate_mask(Index n, int views, double missing_rate,
                              std::uint64_t seed) {
    if (views < 2)
        throw std::invalid_argument("generate_mask: need at least 2 views");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
        throw std::invalid_argument("generate_mask: rate must be in [0,1)");
    const Index nm = static_cast<Index>(std::floor(n * missing_rate + 0.5));
    ObservationMask mask(n, views, true);
    if (nm == 0) return mask;

    // Every sample must stay observed somewhere: nm per view, and a sample
    // can lose at most views-1 of its entries.
    if (nm * views > n * (views - 1) || nm > n - nm)
        throw std::invalid_argument(
            "generate_mask: rate " + std::to_string(missing_rate) +
            " is infeasible for n=" + std::to_string(n) + ", v=" +
            std::to_string(views));

    std::mt19937_64 gen(seed);

    std::vector<Index> all(n);
    for (Index j = 0; j < n; ++j) all[j] = j;
    const auto miss1 = sample_without_replacement(all, nm, gen);
    for (Index j : miss1) mask.set(j, 0, false);

    std::vector<Index> pool2;
    for (Index j = 0; j < n; ++j)
        if (mask.observed(j, 0)) pool2.push_back(j);
    const auto miss2 = sample_without_replacement(pool2, nm, gen);
    for (Index j : miss2) mask.set(j, 1, false);

    if (views == 2) return mask;

    // Views 3..v: uniform picks among samples that would still be observed
    // elsewhere. Retry on the rare dead end.
    std::vector<int> observed_count(n, 0);
    for (Index j = 0; j < n; ++j)
        for (int i = 0; i < views; ++i)
            if (mask.observed(j, i)) ++observed_count[j];

    const int max_attempts = 200;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        ObservationMask candidate = mask;
        std::vector<int> count = observed_count;
        bool ok = true;
        for (int i = 2; i < views && ok; ++i) {
            std::vector<Index> chosen;
            for (Index t = 0; t < nm; ++t) {
                std::vector<Index> pool;
                for (Index j = 0; j < n; ++j)
                    if (candidate.observed(j, i) && count[j] >= 2)
                        pool.push_back(j);
                if (pool.empty()) {
                    ok = false;
                    break;
                }
                const Index j = pool[draw_index(gen, static_cast<Index>(pool.size()))];
                candidate.set(j, i, false);
                --count[j];
            }
            (void)chosen;
        }
        if (ok) return candidate;
    }
    throw std::invalid_argument(
        "generate_mask: could not satisfy the observed-somewhere constraint");
}

FillPolicy fill_policy_from_string(const std::string& name) {
    if (name == "zero") return FillPolicy::Zero;
    if (name == "mean") return FillPolicy::Mean;
    throw std::invalid_argument("unknown fill policy '" + name +
                                "' (expected zero|mean)");
}

std::string to_string(FillPolicy policy) {
    return policy == FillPolicy::Zero ? "zero" : "mean";
}

MultiViewDataset apply_mask(const MultiViewDataset& ds,
                            const ObservationMask& mask, FillPolicy fill) {
    if (mask.n != ds.n || mask.views != ds.view_count())
        throw std::invalid_argument("apply_mask: mask shape mismatch");
    MultiViewDataset out = ds;
    for (int i = 0; i < out.view_count(); ++i) {
        Matrix& view = out.views[i];
        const auto missing = mask.missing_samples(i);
        if (missing.empty()) continue;
        Vector fill_column = Vector::Zero(view.rows());
        if (fill == FillPolicy::Mean) {
            const auto observed = mask.observed_samples(i);
            if (!observed.empty()) {
                for (Index j : observed) fill_column += view.col(j);
                fill_column /= static_cast<double>(observed.size());
            }
        }
        for (Index j : missing) view.col(j) = fill_column;
    }
    return out;
}

ObservationMask load_mask(const std::filesystem::path& file) {
    const auto lines = read_lines(file);
    if (lines.empty()) throw std::runtime_error("mask file is empty");
    const auto first = split_csv(lines[0]);
    ObservationMask mask(static_cast<Index>(lines.size()),
                         static_cast<int>(first.size()), true);
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split_csv(lines[r]);
        if (static_cast<int>(cells.size()) != mask.views)
            throw std::runtime_error(file.filename().string() + " row " +
                                     std::to_string(r + 1) +
                                     ": inconsistent column count");
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double value = parse_cell(cells[c], file, r, c);
            if (value != 0.0 && value != 1.0)
                throw std::runtime_error(file.filename().string() + " row " +
                                         std::to_string(r + 1) +
                                         ": mask cells must be 0 or 1");
            mask.set(static_cast<Index>(r), static_cast<int>(c), value != 0.0);
        }
    }
    return mask;
}

void save_mask(const ObservationMask& mask,
               const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (Index j = 0; j < mask.n; ++j) {
        for (int i = 0; i < mask.views; ++i) {
            if (i) out << ',';
            out << (mask.observed(j, i) ? 1 : 0);
        }
        out << '\n';
    }
}

}  // namespace awsr
