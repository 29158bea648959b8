#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "evonet/data.hpp"
#include "evonet/errors.hpp"
#include "evonet/rng.hpp"

namespace evonet::dlopt {

// ---------------------------------------------------------------------------
// Momentum updates
// ---------------------------------------------------------------------------

struct MomentumState {
    std::vector<double> velocity;  // previous weight update
    double m = 0.9;                // momentum coefficient
    double alpha = 0.01;           // learning rate

    static MomentumState make(std::size_t weight_count, double alpha, double m);
    void validate(std::size_t weight_count) const;
};

// delta_w(t) = -alpha * g + m * delta_w(t-1); the state keeps delta_w(t)
std::vector<double> momentum_step(MomentumState& state, std::span<const double> gradient);

// Lookahead variant: gradient evaluated at w + m * delta_w(t-1).
std::vector<double> nesterov_step(
    MomentumState& state, std::span<const double> weights,
    const std::function<std::vector<double>(std::span<const double>)>& gradient_at);

// ---------------------------------------------------------------------------
// Learning-rate decay
// ---------------------------------------------------------------------------

struct LrSchedule {
    enum class Kind { Step, Exponential };
    Kind kind = Kind::Step;
    double lr0 = 0.1;
    double factor = 0.5;  // step decay multiplier
    int period = 10;      // epochs between step decays
    double k = 0.0;       // exponential decay rate

    void validate() const;
};

// step: lr0 * factor^floor(epoch/period); exponential: lr0 * e^(-k*epoch)
double lr_at(const LrSchedule& schedule, int epoch);

// ---------------------------------------------------------------------------
// Normalization
// ---------------------------------------------------------------------------

struct WhitenResult {
    Mat data;
    std::vector<double> mean;
    std::vector<double> stddev;  // 1.0 recorded for zero-variance features
};

// Per-feature zero mean, unit variance (population statistics). Features with
// zero variance are centered and left unscaled.
WhitenResult whiten(const Mat& data);

// Local contrastive normalization over a single 2-D grid: per pixel, subtract
// the zero-padded neighborhood mean, then divide by the neighborhood standard
// deviation only when it exceeds 1.
Mat lcn(const Mat& feature_map, int radius);

struct BatchNormState {
    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double epsilon = 1e-5;
    double momentum_stats = 0.9;  // running = c*running + (1-c)*batch

    static BatchNormState make(std::size_t features);
    void validate(std::size_t features) const;
};

enum class BnMode { Train, Infer };

struct BatchNormCache {
    Mat x_hat;
    std::vector<double> centered;  // row-major (x - mu)
    std::vector<double> inv_std;   // per feature, 1/sqrt(var + eps)
    std::vector<double> gamma;
    std::size_t rows = 0;
    std::size_t cols = 0;
};

// Train mode normalizes with mini-batch statistics and updates the running
// averages; infer mode uses the running statistics and is batch-size
// independent. The cache (train mode only) feeds batchnorm_backward.
Mat batchnorm_forward(const Mat& batch, BatchNormState& state, BnMode mode,
                      BatchNormCache* cache = nullptr);

struct BatchNormGrads {
    Mat dx;
    std::vector<double> dgamma;
    std::vector<double> dbeta;
};

BatchNormGrads batchnorm_backward(const BatchNormCache& cache, const Mat& upstream);

// ---------------------------------------------------------------------------
// Dropout
// ---------------------------------------------------------------------------

// Each unit zeroed independently with probability p; retained units are not
// rescaled (the paper's test-time averaging handles that at inference).
std::pair<std::vector<double>, std::vector<std::uint8_t>> dropout_train(
    std::span<const double> activations, double p, Rng& rng);

// Outgoing weights of a dropped-out layer scaled by (1 - p).
std::vector<double> dropout_infer(std::span<const double> weights, double p);

}  // namespace evonet::dlopt
