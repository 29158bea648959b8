#include "evonet/selection.hpp"

#include <algorithm>
#include <numeric>

#include "evonet/errors.hpp"

namespace evonet {

RankedPopulation rank_by_error(std::span<const double> errors) {
    RankedPopulation ranked;
    ranked.order.resize(errors.size());
    std::iota(ranked.order.begin(), ranked.order.end(), std::size_t{0});
    std::stable_sort(ranked.order.begin(), ranked.order.end(),
                     [&](std::size_t a, std::size_t b) { return errors[a] < errors[b]; });
    ranked.errors.reserve(errors.size());
    for (const std::size_t idx : ranked.order) ranked.errors.push_back(errors[idx]);
    return ranked;
}

std::vector<double> rank_probabilities(std::size_t population_size) {
    if (population_size == 0) throw PopulationError("rank_probabilities: empty population");
    const double m = static_cast<double>(population_size);
    const double denom = m * (m + 1.0) / 2.0;  // sum of 1..M
    std::vector<double> probs(population_size);
    for (std::size_t rank = 0; rank < population_size; ++rank)
        probs[rank] = (m - static_cast<double>(rank)) / denom;
    return probs;
}

std::size_t sample_rank(std::size_t population_size, Rng& rng) {
    if (population_size == 0) throw PopulationError("sample_rank: empty population");
    const double m = static_cast<double>(population_size);
    const double denom = m * (m + 1.0) / 2.0;
    const double u = rng.uniform() * denom;
    double cumulative = 0.0;
    for (std::size_t rank = 0; rank + 1 < population_size; ++rank) {
        cumulative += m - static_cast<double>(rank);
        if (u < cumulative) return rank;
    }
    return population_size - 1;
}

std::size_t sample_parent(const RankedPopulation& pop, Rng& rng) {
    if (pop.size() == 0) throw PopulationError("sample_parent: empty population");
    return pop.order[sample_rank(pop.size(), rng)];
}

std::vector<std::size_t> fittest_half(const RankedPopulation& pop) {
    if (pop.size() < 2) throw PopulationError("fittest_half: population must have at least 2");
    const std::size_t keep = (pop.size() + 1) / 2;
    return {pop.order.begin(), pop.order.begin() + static_cast<std::ptrdiff_t>(keep)};
}

std::vector<std::pair<std::size_t, std::size_t>> random_pairing(std::size_t population_size,
                                                                Rng& rng) {
    if (population_size == 0) throw PopulationError("random_pairing: empty population");
    std::vector<std::size_t> order(population_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (population_size % 2 == 1)
        order.push_back(static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long long>(population_size) - 1)));
    rng.shuffle(order);
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    pairs.reserve(order.size() / 2);
    for (std::size_t i = 0; i + 1 < order.size(); i += 2) pairs.emplace_back(order[i], order[i + 1]);
    return pairs;
}

}  // namespace evonet
