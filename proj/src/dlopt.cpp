#include "evonet/dlopt.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace evonet::dlopt {

// --------------------------------------------------------------------------
// Momentum
// --------------------------------------------------------------------------

MomentumState MomentumState::make(std::size_t weight_count, double alpha, double m) {
    MomentumState state;
    state.velocity.assign(weight_count, 0.0);
    state.alpha = alpha;
    state.m = m;
    state.validate(weight_count);
    return state;
}

void MomentumState::validate(std::size_t weight_count) const {
    if (velocity.size() != weight_count)
        throw DimensionError("momentum state: velocity length " + std::to_string(velocity.size()) +
                             " vs weight count " + std::to_string(weight_count));
    if (m < 0.0 || m >= 1.0) throw ParamError("momentum state: m must be in [0, 1)");
    if (alpha < 0.0) throw ParamError("momentum state: negative learning rate");
}

std::vector<double> momentum_step(MomentumState& state, std::span<const double> gradient) {
    if (gradient.size() != state.velocity.size())
        throw DimensionError("momentum_step: gradient length mismatch");
    std::vector<double> delta(gradient.size());
    for (std::size_t i = 0; i < gradient.size(); ++i)
        delta[i] = -state.alpha * gradient[i] + state.m * state.velocity[i];
    state.velocity = delta;
    return delta;
}

std::vector<double> nesterov_step(
    MomentumState& state, std::span<const double> weights,
    const std::function<std::vector<double>(std::span<const double>)>& gradient_at) {
    if (weights.size() != state.velocity.size())
        throw DimensionError("nesterov_step: weight length mismatch");
    std::vector<double> lookahead(weights.begin(), weights.end());
    for (std::size_t i = 0; i < lookahead.size(); ++i)
        lookahead[i] += state.m * state.velocity[i];
    const std::vector<double> gradient = gradient_at(lookahead);
    if (gradient.size() != state.velocity.size())
        throw DimensionError("nesterov_step: gradient length mismatch");
    std::vector<double> delta(gradient.size());
    for (std::size_t i = 0; i < gradient.size(); ++i)
        delta[i] = -state.alpha * gradient[i] + state.m * state.velocity[i];
    state.velocity = delta;
    return delta;
}

// --------------------------------------------------------------------------
// Learning-rate decay
// --------------------------------------------------------------------------

void LrSchedule::validate() const {
    if (lr0 <= 0.0) throw ParamError("lr schedule: lr0 must be positive");
    if (kind == Kind::Step) {
        if (factor <= 0.0 || factor >= 1.0) throw ParamError("lr schedule: factor must be in (0, 1)");
        if (period < 1) throw ParamError("lr schedule: period must be >= 1");
    } else if (k < 0.0) {
        throw ParamError("lr schedule: k must be >= 0");
    }
}

double lr_at(const LrSchedule& schedule, int epoch) {
    schedule.validate();
    if (epoch < 0) throw ParamError("lr_at: negative epoch");
    if (schedule.kind == LrSchedule::Kind::Step)
        return schedule.lr0 * std::pow(schedule.factor, epoch / schedule.period);
    return schedule.lr0 * std::exp(-schedule.k * epoch);
}

// --------------------------------------------------------------------------
// Normalization
// --------------------------------------------------------------------------

WhitenResult whiten(const Mat& data) {
    if (data.rows < 2) throw DataError("whiten: needs at least two patterns");
    WhitenResult result;
    result.data = data;
    result.mean.assign(data.cols, 0.0);
    result.stddev.assign(data.cols, 1.0);
    const double count = static_cast<double>(data.rows);
    for (std::size_t c = 0; c < data.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r) sum += data.at(r, c);
        const double mean = sum / count;
        double sq = 0.0;
        for (std::size_t r = 0; r < data.rows; ++r) {
            const double d = data.at(r, c) - mean;
            sq += d * d;
        }
        const double var = sq / count;
        result.mean[c] = mean;
        const double std = std::sqrt(var);
        for (std::size_t r = 0; r < data.rows; ++r) {
            double v = data.at(r, c) - mean;
            if (std > 0.0) v /= std;
            result.data.at(r, c) = v;
        }
        if (std > 0.0) result.stddev[c] = std;
    }
    return result;
}

Mat lcn(const Mat& feature_map, int radius) {
    if (feature_map.empty()) throw DataError("lcn: empty grid");
    if (radius < 1) throw ParamError("lcn: radius must be >= 1");
    const auto rows = static_cast<long long>(feature_map.rows);
    const auto cols = static_cast<long long>(feature_map.cols);
    const double window = static_cast<double>((2 * radius + 1) * (2 * radius + 1));
    Mat out(feature_map.rows, feature_map.cols);
    for (long long r = 0; r < rows; ++r) {
        for (long long c = 0; c < cols; ++c) {
            double sum = 0.0;
            double sq = 0.0;
            for (long long dr = -radius; dr <= radius; ++dr) {
                for (long long dc = -radius; dc <= radius; ++dc) {
                    const long long rr = r + dr;
                    const long long cc = c + dc;
                    // zero padding outside the grid contributes 0 to both sums
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols) continue;
                    const double v = feature_map.at(static_cast<std::size_t>(rr),
                                                    static_cast<std::size_t>(cc));
                    sum += v;
                    sq += v * v;
                }
            }
            const double mean = sum / window;
            const double var = sq / window - mean * mean;
            const double std = std::sqrt(std::max(0.0, var));
            double v = feature_map.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) -
                       mean;
            if (std > 1.0) v /= std;
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = v;
        }
    }
    return out;
}

BatchNormState BatchNormState::make(std::size_t features) {
    BatchNormState state;
    state.gamma.assign(features, 1.0);
    state.beta.assign(features, 0.0);
    state.running_mean.assign(features, 0.0);
    state.running_var.assign(features, 1.0);
    return state;
}

void BatchNormState::validate(std::size_t features) const {
    if (gamma.size() != features || beta.size() != features || running_mean.size() != features ||
        running_var.size() != features)
        throw DimensionError("batchnorm state: parameter lengths differ from feature count");
    if (epsilon <= 0.0) throw ParamError("batchnorm state: epsilon must be positive");
    if (momentum_stats < 0.0 || momentum_stats > 1.0)
        throw ParamError("batchnorm state: running-average coefficient outside [0, 1]");
}

Mat batchnorm_forward(const Mat& batch, BatchNormState& state, BnMode mode,
                      BatchNormCache* cache) {
    if (batch.empty()) throw DataError("batchnorm_forward: empty batch");
    state.validate(batch.cols);
    Mat out(batch.rows, batch.cols);

    if (mode == BnMode::Infer) {
        for (std::size_t r = 0; r < batch.rows; ++r) {
            for (std::size_t c = 0; c < batch.cols; ++c) {
                const double x_hat = (batch.at(r, c) - state.running_mean[c]) /
                                     std::sqrt(state.running_var[c] + state.epsilon);
                out.at(r, c) = state.gamma[c] * x_hat + state.beta[c];
            }
        }
        return out;
    }

    if (batch.rows < 2) throw DataError("batchnorm_forward: train mode needs batch size >= 2");
    const double count = static_cast<double>(batch.rows);
    if (cache != nullptr) {
        cache->x_hat = Mat(batch.rows, batch.cols);
        cache->centered.assign(batch.rows * batch.cols, 0.0);
        cache->inv_std.assign(batch.cols, 0.0);
        cache->gamma = state.gamma;
        cache->rows = batch.rows;
        cache->cols = batch.cols;
    }
    for (std::size_t c = 0; c < batch.cols; ++c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r) sum += batch.at(r, c);
        const double mean = sum / count;
        double sq = 0.0;
        for (std::size_t r = 0; r < batch.rows; ++r) {
            const double d = batch.at(r, c) - mean;
            sq += d * d;
        }
        const double var = sq / count;
        const double inv_std = 1.0 / std::sqrt(var + state.epsilon);
        for (std::size_t r = 0; r < batch.rows; ++r) {
            const double centered = batch.at(r, c) - mean;
            const double x_hat = centered * inv_std;
            out.at(r, c) = state.gamma[c] * x_hat + state.beta[c];
            if (cache != nullptr) {
                cache->x_hat.at(r, c) = x_hat;
                cache->centered[r * batch.cols + c] = centered;
            }
        }
        if (cache != nullptr) cache->inv_std[c] = inv_std;
        const double keep = state.momentum_stats;
        state.running_mean[c] = keep * state.running_mean[c] + (1.0 - keep) * mean;
        state.running_var[c] = keep * state.running_var[c] + (1.0 - keep) * var;
    }
    return out;
}

BatchNormGrads batchnorm_backward(const BatchNormCache& cache, const Mat& upstream) {
    if (cache.rows == 0 || cache.cols == 0)
        throw CacheError("batchnorm_backward: cache was not produced by a train-mode forward");
    if (upstream.rows != cache.rows || upstream.cols != cache.cols)
        throw CacheError("batchnorm_backward: upstream gradient does not match the cache");

    BatchNormGrads grads;
    grads.dx = Mat(cache.rows, cache.cols);
    grads.dgamma.assign(cache.cols, 0.0);
    grads.dbeta.assign(cache.cols, 0.0);
    const double count = static_cast<double>(cache.rows);

    for (std::size_t c = 0; c < cache.cols; ++c) {
        double dgamma = 0.0;
        double dbeta = 0.0;
        for (std::size_t r = 0; r < cache.rows; ++r) {
            dgamma += upstream.at(r, c) * cache.x_hat.at(r, c);
            dbeta += upstream.at(r, c);
        }
        grads.dgamma[c] = dgamma;
        grads.dbeta[c] = dbeta;

        const double inv_std = cache.inv_std[c];
        double dvar = 0.0;
        double dmean_direct = 0.0;
        double centered_sum = 0.0;
        for (std::size_t r = 0; r < cache.rows; ++r) {
            const double dx_hat = upstream.at(r, c) * cache.gamma[c];
            const double centered = cache.centered[r * cache.cols + c];
            dvar += dx_hat * centered;
            dmean_direct += dx_hat;
            centered_sum += centered;
        }
        dvar *= -0.5 * inv_std * inv_std * inv_std;
        const double dmean = -dmean_direct * inv_std + dvar * (-2.0 / count) * centered_sum;
        for (std::size_t r = 0; r < cache.rows; ++r) {
            const double dx_hat = upstream.at(r, c) * cache.gamma[c];
            const double centered = cache.centered[r * cache.cols + c];
            grads.dx.at(r, c) = dx_hat * inv_std + dvar * 2.0 * centered / count + dmean / count;
        }
    }
    return grads;
}

// --------------------------------------------------------------------------
// Dropout
// --------------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<std::uint8_t>> dropout_train(
    std::span<const double> activations, double p, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ParamError("dropout_train: p must be in [0, 1)");
    std::vector<double> out(activations.begin(), activations.end());
    std::vector<std::uint8_t> mask(activations.size(), 1);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (rng.bernoulli(p)) {
            out[i] = 0.0;
            mask[i] = 0;
        }
    }
    return {std::move(out), std::move(mask)};
}

std::vector<double> dropout_infer(std::span<const double> weights, double p) {
    if (p < 0.0 || p >= 1.0) throw ParamError("dropout_infer: p must be in [0, 1)");
    std::vector<double> out(weights.begin(), weights.end());
    for (double& w : out) w *= (1.0 - p);
    return out;
}

}  // namespace evonet::dlopt
