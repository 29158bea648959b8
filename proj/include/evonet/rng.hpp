#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace evonet {

// Deterministic random stream. mt19937_64 output is pinned by the standard,
// and all distributions are hand-rolled on top of it, so a run replays
// bit-identically regardless of standard-library version.
//
// Streams are derived, not shared: every call site that needs randomness asks
// for Rng::derive(seed, purpose, a, b) with a stable purpose label (and e.g.
// generation/index), which keeps runs replayable and resumable without ever
// serializing generator state.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    static Rng derive(std::uint64_t seed, std::string_view purpose,
                      std::uint64_t a = 0, std::uint64_t b = 0);

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1)
    double uniform();
    // uniform in [lo, hi); returns lo exactly when lo == hi
    double uniform(double lo, double hi);
    // uniform integer, both bounds inclusive
    long long uniform_int(long long lo, long long hi);
    double normal(double mean, double stddev);
    bool bernoulli(double p) { return uniform() < p; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(uniform_int(0, static_cast<long long>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace evonet
