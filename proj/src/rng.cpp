#include "evonet/rng.hpp"

#include <cmath>
#include <numbers>

namespace evonet {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : s) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

Rng Rng::derive(std::uint64_t seed, std::string_view purpose, std::uint64_t a, std::uint64_t b) {
    std::uint64_t state = seed ^ fnv1a(purpose);
    std::uint64_t mixed = splitmix64(state);
    state ^= a * 0x9e3779b97f4a7c15ull;
    mixed ^= splitmix64(state);
    state ^= b * 0xd1b54a32d192ed03ull;
    mixed ^= splitmix64(state);
    return Rng(mixed);
}

double Rng::uniform() {
    // top 53 bits -> [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + uniform() * (hi - lo);
}

long long Rng::uniform_int(long long lo, long long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<long long>(gen_());  // full 64-bit range
    const std::uint64_t limit = span * (UINT64_MAX / span);
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return lo + static_cast<long long>(x % span);
}

double Rng::normal(double mean, double stddev) {
    // Box-Muller, cosine branch only; one draw per call keeps replay simple.
    const double u1 = 1.0 - uniform();  // (0, 1], avoids log(0)
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace evonet
