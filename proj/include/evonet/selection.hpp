#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "evonet/rng.hpp"

namespace evonet {

// Population view sorted by ascending error; rank 0 is the lowest error.
// Equal errors keep their original relative order.
struct RankedPopulation {
    std::vector<std::size_t> order;  // order[rank] = original index
    std::vector<double> errors;      // errors by rank, nondecreasing

    std::size_t size() const { return order.size(); }
};

RankedPopulation rank_by_error(std::span<const double> errors);

// P(rank) = (M - rank) / sum_{k=1..M} k; strictly decreasing, sums to 1.
std::vector<double> rank_probabilities(std::size_t population_size);

// Draws a rank according to rank_probabilities.
std::size_t sample_rank(std::size_t population_size, Rng& rng);

// Draws a parent; returns its original population index.
std::size_t sample_parent(const RankedPopulation& pop, Rng& rng);

// The ceil(M/2) lowest-error individuals, original indices in rank order.
std::vector<std::size_t> fittest_half(const RankedPopulation& pop);

// A uniformly random perfect matching of indices 0..M-1. An odd population
// is padded by pairing a uniformly random member twice.
std::vector<std::pair<std::size_t, std::size_t>> random_pairing(std::size_t population_size,
                                                                Rng& rng);

}  // namespace evonet
