#pragma once

#include <filesystem>
#include <string>

#include "chaoscast/common.hpp"

namespace chaoscast {

/// Sampled trajectory of an observable. Samples are stored one per column
/// (values is d_o x N); mean/std are the per-component statistics of the
/// training segment. Train segment = columns [0, split), test = [split, N).
struct TimeSeriesDataset {
    Mat values;      // d_o x N, system units
    double dt = 0.0; // sampling interval
    Vec mean;        // d_o, training-split mean
    Vec stddev;      // d_o, training-split std (population)
    Index split = 0; // first test column

    Index dim() const { return values.rows(); }
    Index n_samples() const { return values.cols(); }
    Index n_train() const { return split; }
    Index n_test() const { return values.cols() - split; }

    auto train() const { return values.leftCols(split); }
    auto test() const { return values.rightCols(values.cols() - split); }

    /// Recomputes mean/std over the training split. Throws if any component
    /// has zero variance (degenerate observable).
    void compute_train_stats();

    /// Largest absolute sample value over the training split.
    double train_abs_max() const;
};

/// Writes the dataset container: magic "CHF1", little-endian u32 d_o, u64 N,
/// f64 dt, u64 split index, N*d_o f64 samples row-major (one sample per row),
/// then d_o f64 means and d_o f64 stds.
void save_dataset(const TimeSeriesDataset& ds, const std::filesystem::path& path);

/// Reads the container written by save_dataset. Throws std::runtime_error on
/// bad magic, truncation, or inconsistent dimensions.
TimeSeriesDataset load_dataset(const std::filesystem::path& path);

}  // namespace chaoscast
