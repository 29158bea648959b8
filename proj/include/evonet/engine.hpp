#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "evonet/data.hpp"
#include "evonet/fitness.hpp"
#include "evonet/genome.hpp"
#include "evonet/phenotype.hpp"
#include "evonet/selection.hpp"
#include "evonet/variation.hpp"

namespace evonet {

enum class EncodingKind { BitString, Matrix, GeneList };

EncodingKind encoding_from_name(std::string_view name);
std::string_view encoding_name(EncodingKind kind);

enum class SelectionStrategy { Rank, FittestHalf, RandomPair };

SelectionStrategy selection_from_name(std::string_view name);
std::string_view selection_name(SelectionStrategy s);

struct Individual {
    Genome genome;
    double error = 0.0;
    std::optional<bool> success;  // set after a training attempt
    std::vector<int> lineage;     // parent indices in the previous population
};

struct TrainerSettings {
    int bp_epochs = 100;
    double learning_rate = 0.5;
    double momentum = 0.9;
    bool nesterov = false;
    double dropout = 0.0;
    std::optional<dlopt::LrSchedule> lr_schedule;
    SaSchedule sa;
};

struct OperatorParams {
    TemperatureParams temperature;  // alpha, delta interval, f_max
    BitMutationRates bit_rates{0.02, 0.05, 0.05};
    int crossover_points = 2;
    double eta = 0.1;
    std::pair<double, double> init_interval{-0.3, 0.3};
    double division_alpha = 0.25;
    // gene-list loop probabilities
    double p_crossover = 0.75;
    double p_add_connection = 0.25;
    double p_split_connection = 0.15;
    double p_perturb = 0.8;
    bool innovation_dedupe = false;
};

struct StopCriteria {
    std::optional<double> target_error;
    int stagnation_window = 50;
    double min_improvement = 1e-6;
};

struct EvolutionConfig {
    EncodingKind encoding = EncodingKind::GeneList;
    int population_size = 50;
    int max_generations = 200;
    int offspring_per_generation = 0;  // 0 = population size
    FitnessSpec fitness;
    SelectionStrategy selection = SelectionStrategy::Rank;
    Activation activation = Activation::Sigmoid;
    OperatorParams operators;
    TrainerSettings trainer;
    StopCriteria stop;
    MatrixInitRanges matrix_ranges{1, 4, 4, 12, -0.5, 0.5};
    int matrix_max_hidden = 6;
    bool matrix_train_at_init = true;
    int bitstring_g_max = 5;
    int bitstring_w_lo = -8;
    double bitstring_p_connect = 0.5;
    std::uint64_t seed = 1;

    // Appends one message per violated constraint; empty result = valid.
    std::vector<std::string> validation_errors() const;
    void validate() const;  // throws ConfigError listing every violation

    int effective_offspring() const {
        return offspring_per_generation > 0 ? offspring_per_generation : population_size;
    }
};

struct GenerationReport {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double worst = 0.0;
    double hidden_mean = 0.0;
    double conn_mean = 0.0;
    std::map<std::string, long> operator_counts;
    // structural mutation kinds attempted per hybrid-pipeline offspring
    std::vector<std::vector<std::string>> epnet_attempts;
};

enum class StopReason { TargetReached, MaxGenerations, Stagnation };

// Everything the loop needs to continue a run; checkpoints serialize this.
struct EngineState {
    std::vector<Individual> population;
    InnovationRegistry registry;
    int next_generation = 1;
    std::vector<GenerationReport> history;
};

struct EvolveResult {
    Individual best;
    std::vector<GenerationReport> history;
    StopReason reason = StopReason::MaxGenerations;
    int generations_run = 0;
};

// Called after every generation (including generation 0 at init).
using GenerationHook = std::function<void(const EngineState&, const GenerationReport&)>;

// M individuals of the configured encoding, evaluated. Matrix-style
// populations are additionally partial-BP trained and success/failure marked;
// gene-list populations start minimal.
std::vector<Individual> init_population(const EvolutionConfig& config, const Dataset& dataset,
                                        InnovationRegistry& registry);

// One hybrid-pipeline reproduction step: successful parents take further BP
// only; failures try SA, then the ordered structural mutations (neuron
// deletion, connection deletion, connection addition, neuron addition), each
// followed by partial BP. The first error-reducing candidate wins; otherwise
// the last candidate is kept.
Individual epnet_step(const Individual& parent, const EvolutionConfig& config,
                      const Dataset& dataset, Rng& rng,
                      std::vector<std::string>* attempted_ops = nullptr);

// Worst-replacement: the offspring replaces the current worst individual only
// when strictly better. Population size is conserved. Returns whether the
// offspring entered.
bool replace_worst(std::vector<Individual>& population, Individual offspring);

// Fresh run: init, then generations until a stop criterion fires.
EvolveResult evolve(const EvolutionConfig& config, const Dataset& dataset,
                    const GenerationHook& hook = nullptr);

// Continue from a checkpointed state (population, registry, history).
EvolveResult evolve_from(EngineState state, const EvolutionConfig& config, const Dataset& dataset,
                         const GenerationHook& hook = nullptr);

// Shared helpers (exposed for the harness and tests).
double evaluate_error(const Genome& genome, const EvolutionConfig& config, const Dataset& dataset);
GenerationReport make_report(int generation, const std::vector<Individual>& population);

}  // namespace evonet
