#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evonet/errors.hpp"

namespace evonet {

// Dense row-major matrix of doubles; rows are patterns, columns features.
struct Mat {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), a(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return a[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return a[r * cols + c]; }

    std::span<double> row(std::size_t r) { return {a.data() + r * cols, cols}; }
    std::span<const double> row(std::size_t r) const { return {a.data() + r * cols, cols}; }

    bool empty() const { return rows == 0 || cols == 0; }
};

// A view over a subset of a dataset's patterns.
struct DataSplit {
    const Mat* inputs = nullptr;
    const Mat* targets = nullptr;
    std::span<const std::size_t> index;

    std::size_t size() const { return index.size(); }
    std::span<const double> input(std::size_t k) const { return inputs->row(index[k]); }
    std::span<const double> target(std::size_t k) const { return targets->row(index[k]); }
};

// Supervised dataset with deterministic train/validation index sets.
// The splits are disjoint and cover all patterns; a validation view over an
// empty split falls back to the training patterns so that tiny builtin tasks
// (XOR, parity) can train and validate on the full truth table.
struct Dataset {
    Mat inputs;
    Mat targets;
    std::vector<std::size_t> train_index;
    std::vector<std::size_t> val_index;

    std::size_t patterns() const { return inputs.rows; }
    std::size_t input_width() const { return inputs.cols; }
    std::size_t target_width() const { return targets.cols; }

    DataSplit train() const { return {&inputs, &targets, train_index}; }

    DataSplit val() const {
        if (val_index.empty()) return train();
        return {&inputs, &targets, val_index};
    }

    void check() const {
        if (inputs.rows != targets.rows)
            throw DimensionError("dataset input/target pattern counts differ");
        if (inputs.rows == 0) throw DataError("dataset has no patterns");
    }
};

}  // namespace evonet
