// Test-only reference implementations. Everything here is written as dumb
// straight-line code, independent of the library's implementation paths, so
// the two sides can disagree when one of them is wrong.
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "evonet/data.hpp"
#include "evonet/phenotype.hpp"

namespace oracle {

// ---- error measures ----

inline double sqe(std::span<const double> t, std::span<const double> a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sum += (t[i] - a[i]) * (t[i] - a[i]);
    return sum;
}

inline double abs_error(std::span<const double> t, std::span<const double> a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sum += std::fabs(t[i] - a[i]);
    return sum;
}

inline double exp_error(std::span<const double> t, std::span<const double> a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) sum += std::exp(std::fabs(t[i] - a[i]));
    return sum;
}

inline double prechelt(double o_max, double o_min, int n, int t, double e_sqe) {
    return 100.0 * (o_max - o_min) / static_cast<double>(n) * e_sqe / static_cast<double>(t);
}

// ---- selection ----

inline std::vector<double> rank_probabilities(std::size_t m) {
    double denom = 0.0;
    for (std::size_t k = 1; k <= m; ++k) denom += static_cast<double>(k);
    std::vector<double> p(m);
    for (std::size_t rank = 0; rank < m; ++rank)
        p[rank] = (static_cast<double>(m) - static_cast<double>(rank)) / denom;
    return p;
}

// ---- temperature machinery ----

inline double temperature(double f, double f_max) { return 1.0 - f / f_max; }

inline int structural_count(int d_min, int d_max, double u, double t_inst) {
    return d_min + static_cast<int>(std::floor(u * t_inst * static_cast<double>(d_max - d_min)));
}

inline double connection_test(double w, std::span<const double> deltas) {
    std::vector<double> xi;
    for (const double d : deltas) xi.push_back(w + d);
    double sum = 0.0;
    for (const double x : xi) sum += x;
    const double mean = sum / static_cast<double>(xi.size());
    double sq = 0.0;
    for (const double x : xi) sq += (x - mean) * (x - mean);
    return sum / std::sqrt(sq);
}

// ---- momentum sequences ----

// iterates delta(t) = -alpha*g(t) + m*delta(t-1) over a gradient sequence
inline std::vector<double> momentum_sequence(double alpha, double m,
                                             std::span<const double> gradients) {
    std::vector<double> deltas;
    double previous = 0.0;
    for (const double g : gradients) {
        const double d = -alpha * g + m * previous;
        deltas.push_back(d);
        previous = d;
    }
    return deltas;
}

// Nesterov on E = c/2 * w^2 (gradient c*w), returning the weight trajectory
inline std::vector<double> nesterov_quadratic(double c, double w0, double alpha, double m,
                                              int steps) {
    std::vector<double> trajectory;
    double w = w0;
    double previous = 0.0;
    for (int s = 0; s < steps; ++s) {
        const double lookahead = w + m * previous;
        const double gradient = c * lookahead;
        const double d = -alpha * gradient + m * previous;
        w += d;
        previous = d;
        trajectory.push_back(w);
    }
    return trajectory;
}

// ---- learning-rate schedules ----

inline double step_lr(double lr0, double factor, int period, int epoch) {
    double lr = lr0;
    for (int i = 0; i < epoch / period; ++i) lr *= factor;
    return lr;
}

inline double exp_lr(double lr0, double k, int epoch) { return lr0 * std::exp(-k * epoch); }

// ---- normalization references ----

// LCN over an explicitly materialized zero-padded copy of the grid.
inline evonet::Mat lcn_reference(const evonet::Mat& grid, int radius) {
    const std::size_t rows = grid.rows, cols = grid.cols;
    const std::size_t pad = static_cast<std::size_t>(radius);
    evonet::Mat padded(rows + 2 * pad, cols + 2 * pad, 0.0);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) padded.at(r + pad, c + pad) = grid.at(r, c);

    const int count = (2 * radius + 1) * (2 * radius + 1);
    evonet::Mat out(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            // window top-left in padded coordinates is exactly (r, c)
            double sum = 0.0;
            for (int dr = 0; dr <= 2 * radius; ++dr)
                for (int dc = 0; dc <= 2 * radius; ++dc)
                    sum += padded.at(r + static_cast<std::size_t>(dr),
                                     c + static_cast<std::size_t>(dc));
            const double mean = sum / count;
            double sq = 0.0;
            for (int dr = 0; dr <= 2 * radius; ++dr)
                for (int dc = 0; dc <= 2 * radius; ++dc) {
                    const double v = padded.at(r + static_cast<std::size_t>(dr),
                                               c + static_cast<std::size_t>(dc));
                    sq += (v - mean) * (v - mean);
                }
            const double stddev = std::sqrt(sq / count);
            double v = grid.at(r, c) - mean;
            if (stddev > 1.0) v /= stddev;
            out.at(r, c) = v;
        }
    }
    return out;
}

// per-column mean/variance with population statistics
inline void column_stats(const evonet::Mat& data, std::vector<double>& mean,
                         std::vector<double>& var) {
    mean.assign(data.cols, 0.0);
    var.assign(data.cols, 0.0);
    for (std::size_t c = 0; c < data.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r) sum += data.at(r, c);
        mean[c] = sum / static_cast<double>(data.rows);
        double sq = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r)
            sq += (data.at(r, c) - mean[c]) * (data.at(r, c) - mean[c]);
        var[c] = sq / static_cast<double>(data.rows);
    }
}

// ---- gradient checking ----

// Relative difference with a floor: central differences in double precision
// carry ~1e-9 absolute noise, so components below the floor are effectively
// held to an absolute tolerance instead of a meaningless relative one.
inline double gradient_mismatch(double analytic, double numeric) {
    const double scale = std::max({std::fabs(analytic), std::fabs(numeric), 1e-3});
    return std::fabs(analytic - numeric) / scale;
}

// central finite differences of an arbitrary scalar function of the weights
template <typename ErrorFn>
std::vector<double> finite_difference_gradient(std::vector<double> weights, ErrorFn error_of,
                                               double h = 1e-5) {
    std::vector<double> gradient(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        const double saved = weights[i];
        const double step = h * std::max(1.0, std::fabs(saved));
        weights[i] = saved + step;
        const double plus = error_of(weights);
        weights[i] = saved - step;
        const double minus = error_of(weights);
        weights[i] = saved;
        gradient[i] = (plus - minus) / (2.0 * step);
    }
    return gradient;
}

// summed loss of a network over a split, via the public forward path only
inline double loss_of(const evonet::Network& net, const evonet::DataSplit& split,
                      evonet::Measure measure) {
    double total = 0.0;
    for (std::size_t p = 0; p < split.size(); ++p) {
        const auto out = net.forward(split.input(p));
        const auto target = split.target(p);
        switch (measure) {
            case evonet::Measure::Sqe: total += sqe(target, out); break;
            case evonet::Measure::Abs: total += abs_error(target, out); break;
            case evonet::Measure::Exp: total += exp_error(target, out); break;
            default: break;
        }
    }
    return total;
}

}  // namespace oracle
