#pragma once

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "evonet/data.hpp"
#include "evonet/genome.hpp"
#include "evonet/phenotype.hpp"
#include "evonet/rng.hpp"

namespace evonet {

// ---------------------------------------------------------------------------
// Temperature machinery
// ---------------------------------------------------------------------------

struct TemperatureParams {
    double alpha = 0.5;  // perturbation proportion; alpha * T~ is a variance
    int delta_min = 1;   // structural mutation count interval
    int delta_max = 3;
    double f_max = 1.0;  // maximum attainable fitness

    void validate() const;
};

// T = 1 - f / f_max; perfect individuals have no drive to mutate.
double temperature(double fitness, double f_max);

// T~ = U(0,1) * T, drawn fresh per operator invocation.
double instantaneous_temperature(double t, Rng& rng);

// Every present weight gets w + N(0, alpha * T~), reading the second argument
// as a variance. A zero instantaneous temperature leaves weights untouched.
void perturb_weights(MatrixGenome& genome, const TemperatureParams& params, double t_inst,
                     Rng& rng);
void perturb_weights(GeneListGenome& genome, const TemperatureParams& params, double t_inst,
                     Rng& rng);

// delta_min + floor(U(0,1) * T~ * (delta_max - delta_min)), always inside the
// configured interval.
int structural_mutation_count(const TemperatureParams& params, double t_inst, Rng& rng);

// ---------------------------------------------------------------------------
// Connection importance (the `test` statistic)
// ---------------------------------------------------------------------------

// Returned when every xi is identical: a perfectly stable connection counts
// as maximally important, so it is never the one deleted.
inline constexpr double kConnectionTestSentinel = std::numeric_limits<double>::max();

// xi_i = w + delta_i; test = sum(xi) / sqrt(sum((xi - mean)^2)).
double connection_test(double weight, std::span<const double> deltas);

struct ConnectionImportance {
    int from = 0;
    int to = 0;
    double test = 0.0;
};

// Importance of every present connection of the genome, over the validation
// patterns, with per-pattern deltas -eta * dE_abs/dw. Connections pruned from
// the evaluated network see no gradient and score the sentinel.
std::vector<ConnectionImportance> connection_importances(const MatrixGenome& genome,
                                                         const DataSplit& validation, double eta,
                                                         Activation activation);

// Same statistic for absent legal slots (current weight zero), used to rank
// candidate additions.
std::vector<ConnectionImportance> candidate_importances(const MatrixGenome& genome,
                                                        const DataSplit& validation, double eta,
                                                        Activation activation);

// ---------------------------------------------------------------------------
// Structural mutations on matrix genomes
// ---------------------------------------------------------------------------

// Clears `count` uniformly chosen hidden neurons and their incident
// connections. A count above the hidden population is clamped (and logged).
void delete_neurons(MatrixGenome& genome, int count, Rng& rng);

// Removes the `count` connections with the smallest |test|.
void delete_connections(MatrixGenome& genome, int count, const DataSplit& validation, double eta,
                        Activation activation);

// Enables the `count` absent slots with the largest |test|; new weights are
// uniform in init_interval ([0, 0] reproduces zero-weight initialization).
void add_connections(MatrixGenome& genome, int count, const DataSplit& validation, double eta,
                     std::pair<double, double> init_interval, Activation activation, Rng& rng);

// Splits an existing hidden neuron in two. Both halves inherit the incoming
// weights unchanged; outgoing weights split as (1+alpha)*w and -alpha*w, so
// the decoded network computes exactly the same function.
void cell_division(MatrixGenome& genome, int hidden_node_index, double alpha);

// ---------------------------------------------------------------------------
// Innovation bookkeeping and gene-list mutations
// ---------------------------------------------------------------------------

// Monotonic innovation counter with a ledger of every assignment. Numbers are
// never reused or changed. Deduplication of identical mutations inside one
// generation is available behind a flag and off by default.
struct InnovationRegistry {
    struct Entry {
        std::string kind;
        int in_id = 0;
        int out_id = 0;
        int number = 0;
    };

    int counter = 1;  // next number to hand out
    std::vector<Entry> history;
    bool dedupe_within_generation = false;

    int assign(const std::string& kind, int in_id, int out_id);
    void begin_generation();

private:
    std::map<std::tuple<std::string, int, int>, int> current_generation_;
};

// Adds one uniformly chosen absent, acyclicity-preserving connection with a
// random weight and a fresh innovation number.
void neat_add_connection(GeneListGenome& genome, InnovationRegistry& registry, Rng& rng,
                         std::pair<double, double> weight_interval);

// Disables the identified gene and splits it through a fresh hidden neuron:
// in -> new carries weight 1, new -> out carries the old weight.
void neat_split_connection(GeneListGenome& genome, InnovationRegistry& registry,
                           int gene_innovation);

// ---------------------------------------------------------------------------
// Bit-string mutations and crossover
// ---------------------------------------------------------------------------

struct BitMutationRates {
    double p_granularity = 0.0;
    double p_connectivity = 0.0;
    double p_weight = 0.0;

    void validate() const;
};

// Flips header bits, connectivity bits and weight bits with their own rates,
// then re-validates: the granularity is re-decoded (clamped into (1, g_max])
// and weight substrings are resized to the new width, truncating or
// zero-extending at the most-significant end.
void mutate_bitstring(BitStringGenome& genome, const BitMutationRates& rates, Rng& rng);

// Exchanges alternating segments between two equal-length padded strings at
// n distinct uniformly drawn cut points.
std::pair<std::string, std::string> npoint_crossover(std::string_view a, std::string_view b,
                                                     int n, Rng& rng);

// ---------------------------------------------------------------------------
// Innovation-based alignment
// ---------------------------------------------------------------------------

struct AlignedGene {
    int innovation = 0;
    std::optional<ConnectionGene> from_a;
    std::optional<ConnectionGene> from_b;

    bool matching() const { return from_a.has_value() && from_b.has_value(); }
};

// Gene table keyed by innovation number; rows mark genes as matching or
// present in only one parent.
std::vector<AlignedGene> align_by_innovation(const GeneListGenome& a, const GeneListGenome& b);

// Recombination over the aligned table: matching genes come from a uniformly
// random parent, unmatched genes from the fitter one. A child whose enabled
// genes form a cycle is rejected and resampled; after too many rejections the
// fitter parent is cloned.
GeneListGenome recombine(const GeneListGenome& a, const GeneListGenome& b, bool a_fitter,
                         Rng& rng);

}  // namespace evonet
