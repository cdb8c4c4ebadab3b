#pragma once

#include "awsr/numerics.hpp"

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

namespace awsr {

/// A multi-view dataset: view i is a d_i x n matrix (features x samples),
/// all views over the same n samples, with ground-truth labels in 0..k-1.
struct MultiViewDataset {
    std::vector<Matrix> views;
    std::vector<int> labels;
    Index n = 0;
    int k = 0;

    int view_count() const { return static_cast<int>(views.size()); }
};

/// Per-sample, per-view observation indicator. observed(j, i) is true iff
/// sample j is present in view i.
struct ObservationMask {
    Index n = 0;
    int views = 0;
    std::vector<std::uint8_t> flags;  // row-major n x views

    ObservationMask() = default;
    ObservationMask(Index n_, int views_, bool initially_observed = true)
        : n(n_), views(views_),
          flags(static_cast<std::size_t>(n_) * views_,
                initially_observed ? 1 : 0) {}

    bool observed(Index sample, int view) const {
        return flags[static_cast<std::size_t>(sample) * views + view] != 0;
    }
    void set(Index sample, int view, bool value) {
        flags[static_cast<std::size_t>(sample) * views + view] = value ? 1 : 0;
    }
    std::vector<Index> observed_samples(int view) const;
    std::vector<Index> missing_samples(int view) const;
    Index missing_count(int view) const;
};

/// Loads view_1.csv .. view_v.csv plus labels.csv from a directory.
/// Each CSV row is one sample (comma-separated features, no header);
/// matrices are transposed to features x samples on load. Labels are
/// remapped to contiguous ids 0..k-1 (ordered by original value).
/// Throws std::runtime_error with a descriptive message on missing files,
/// ragged rows, non-numeric cells, or inconsistent sample counts.
MultiViewDataset load_dataset(const std::filesystem::path& dir);

struct NormalizeReport {
    // (view index, sample index) of columns left unchanged because their
    // norm was zero.
    std::vector<std::pair<int, Index>> zero_columns;
};

/// Scales every sample column to unit Euclidean norm. Zero columns are left
/// unchanged and recorded in the report.
MultiViewDataset normalize_views(const MultiViewDataset& ds,
                                 NormalizeReport* report = nullptr);

/// Missing-entry protocol: with nm = round(n * rate), view 1 loses nm
/// samples chosen uniformly, view 2 loses nm samples disjoint from view 1's,
/// and each remaining view loses nm samples chosen uniformly among those
/// still observed somewhere else. Deterministic for a fixed seed.
/// Throws std::invalid_argument when the rate is infeasible.
ObservationMask generate_mask(Index n, int views, double missing_rate,
                              std::uint64_t seed);

enum class FillPolicy { Zero, Mean };

FillPolicy fill_policy_from_string(const std::string& name);
std::string to_string(FillPolicy policy);

/// Replaces masked sample columns per the fill policy (zero, or the
/// per-feature mean over that view's observed columns). Observed columns
/// are copied bit-identically.
MultiViewDataset apply_mask(const MultiViewDataset& ds,
                            const ObservationMask& mask, FillPolicy fill);

/// mask.csv round-trip: n rows and v comma-separated 0/1 values per row.
ObservationMask load_mask(const std::filesystem::path& file);
void save_mask(const ObservationMask& mask, const std::filesystem::path& file);

}  // namespace awsr
