#include "evonet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evonet/log.hpp"

namespace evonet {

EncodingKind encoding_from_name(std::string_view name) {
    if (name == "bitstring") return EncodingKind::BitString;
    if (name == "matrix") return EncodingKind::Matrix;
    if (name == "genelist") return EncodingKind::GeneList;
    throw ParamError("unknown encoding: " + std::string(name));
}

std::string_view encoding_name(EncodingKind kind) {
    switch (kind) {
        case EncodingKind::BitString: return "bitstring";
        case EncodingKind::Matrix: return "matrix";
        case EncodingKind::GeneList: return "genelist";
    }
    return "genelist";
}

SelectionStrategy selection_from_name(std::string_view name) {
    if (name == "rank") return SelectionStrategy::Rank;
    if (name == "fittest-half") return SelectionStrategy::FittestHalf;
    if (name == "random-pair") return SelectionStrategy::RandomPair;
    throw ParamError("unknown selection strategy: " + std::string(name));
}

std::string_view selection_name(SelectionStrategy s) {
    switch (s) {
        case SelectionStrategy::Rank: return "rank";
        case SelectionStrategy::FittestHalf: return "fittest-half";
        case SelectionStrategy::RandomPair: return "random-pair";
    }
    return "rank";
}

// --------------------------------------------------------------------------
// Config validation
// --------------------------------------------------------------------------

std::vector<std::string> EvolutionConfig::validation_errors() const {
    std::vector<std::string> problems;
    auto require = [&](bool ok, const std::string& message) {
        if (!ok) problems.push_back(message);
    };

    require(population_size >= 2, "population_size must be >= 2");
    require(max_generations >= 1, "max_generations must be >= 1");
    require(offspring_per_generation >= 0, "offspring_per_generation must be >= 0");
    try {
        fitness.validate();
    } catch (const Error& e) {
        problems.emplace_back(e.what());
    }
    require(trainer.bp_epochs >= 0, "trainer.bp_epochs must be >= 0");
    require(trainer.learning_rate >= 0.0, "trainer.learning_rate must be >= 0");
    require(trainer.momentum >= 0.0 && trainer.momentum < 1.0,
            "trainer.momentum must be in [0, 1)");
    require(trainer.dropout >= 0.0 && trainer.dropout < 1.0, "trainer.dropout must be in [0, 1)");
    if (trainer.lr_schedule.has_value()) {
        try {
            trainer.lr_schedule->validate();
        } catch (const Error& e) {
            problems.emplace_back(e.what());
        }
    }
    try {
        trainer.sa.validate();
    } catch (const Error& e) {
        problems.emplace_back(e.what());
    }
    try {
        operators.temperature.validate();
    } catch (const Error& e) {
        problems.emplace_back(e.what());
    }
    try {
        operators.bit_rates.validate();
    } catch (const Error& e) {
        problems.emplace_back(e.what());
    }
    require(operators.crossover_points >= 1, "operators.crossover_points must be >= 1");
    require(operators.eta > 0.0, "operators.eta must be positive");
    require(operators.init_interval.first <= operators.init_interval.second,
            "operators.init_interval must be ordered");
    for (const auto& [p, name] :
         {std::pair{operators.p_crossover, "p_crossover"},
          std::pair{operators.p_add_connection, "p_add_connection"},
          std::pair{operators.p_split_connection, "p_split_connection"},
          std::pair{operators.p_perturb, "p_perturb"}})
        require(p >= 0.0 && p <= 1.0, std::string("operators.") + name + " must be in [0, 1]");

    if (encoding == EncodingKind::Matrix) {
        require(trainer.bp_epochs >= 1,
                "matrix encoding needs trainer.bp_epochs >= 1 (the hybrid pipeline trains with BP)");
        require(matrix_max_hidden >= 0, "matrix_max_hidden must be >= 0");
        require(matrix_ranges.hidden_min >= 0 && matrix_ranges.hidden_min <= matrix_ranges.hidden_max &&
                    matrix_ranges.hidden_max <= matrix_max_hidden,
                "matrix hidden range must satisfy 0 <= min <= max <= matrix_max_hidden");
        require(matrix_ranges.connections_min >= 0 &&
                    matrix_ranges.connections_min <= matrix_ranges.connections_max,
                "matrix connection range must satisfy 0 <= min <= max");
        require(matrix_ranges.weight_lo <= matrix_ranges.weight_hi,
                "matrix weight range must be ordered");
    }
    if (encoding == EncodingKind::BitString) {
        require(bitstring_g_max >= 2, "bitstring_g_max must be >= 2");
        require(bitstring_p_connect >= 0.0 && bitstring_p_connect <= 1.0,
                "bitstring_p_connect must be in [0, 1]");
        require(selection == SelectionStrategy::RandomPair,
                "bitstring encoding pairs parents randomly; selection must be random-pair");
    } else {
        require(selection != SelectionStrategy::RandomPair,
                "random-pair selection applies to the bitstring encoding only");
    }
    require(stop.stagnation_window >= 1, "stop.stagnation_window must be >= 1");
    require(stop.min_improvement >= 0.0, "stop.min_improvement must be >= 0");
    if (stop.target_error.has_value())
        require(std::isfinite(*stop.target_error), "stop.target_error must be finite");
    return problems;
}

void EvolutionConfig::validate() const {
    const auto problems = validation_errors();
    if (problems.empty()) return;
    std::string joined = "invalid configuration:";
    for (const auto& p : problems) joined += "\n  - " + p;
    throw ConfigError(joined);
}

// --------------------------------------------------------------------------
// Shared helpers
// --------------------------------------------------------------------------

double evaluate_error(const Genome& genome, const EvolutionConfig& config,
                      const Dataset& dataset) {
    const Network net = build_network(genome, config.activation);
    return dataset_error(net, dataset.val(), config.fitness);
}

namespace {

struct GenomeStats {
    double hidden = 0.0;
    double connections = 0.0;
};

GenomeStats genome_stats(const Genome& genome) {
    GenomeStats stats;
    if (const auto* matrix = std::get_if<MatrixGenome>(&genome)) {
        stats.hidden = matrix->hidden_count();
        stats.connections = static_cast<double>(matrix->connection_count());
    } else if (const auto* genes = std::get_if<GeneListGenome>(&genome)) {
        stats.hidden = static_cast<double>(genes->hidden_count());
        stats.connections = static_cast<double>(genes->enabled_count());
    } else if (const auto* bits = std::get_if<BitStringGenome>(&genome)) {
        stats.hidden = bits->layout.max_hidden;
        for (const auto& sub : bits->substrings)
            if (sub[0] == '1') stats.connections += 1.0;
    }
    return stats;
}

BpOptions make_bp_options(const EvolutionConfig& config, std::size_t weight_count, Rng& rng) {
    BpOptions options;
    options.momentum = dlopt::MomentumState::make(weight_count, config.trainer.learning_rate,
                                                  config.trainer.momentum);
    options.schedule = config.trainer.lr_schedule;
    options.nesterov = config.trainer.nesterov;
    options.dropout_p = config.trainer.dropout;
    if (options.dropout_p > 0.0) options.dropout_seed = rng.next_u64();
    return options;
}

std::size_t select_parent_index(const RankedPopulation& ranked, SelectionStrategy strategy,
                                Rng& rng) {
    if (ranked.size() == 1) return ranked.order[0];
    if (strategy == SelectionStrategy::FittestHalf) {
        const auto half = fittest_half(ranked);
        return half[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long long>(half.size()) - 1))];
    }
    return sample_parent(ranked, rng);
}

}  // namespace

GenerationReport make_report(int generation, const std::vector<Individual>& population) {
    if (population.empty()) throw PopulationError("make_report: empty population");
    GenerationReport report;
    report.generation = generation;
    report.best = population[0].error;
    report.worst = population[0].error;
    double sum = 0.0;
    double hidden = 0.0;
    double conns = 0.0;
    for (const auto& ind : population) {
        report.best = std::min(report.best, ind.error);
        report.worst = std::max(report.worst, ind.error);
        sum += ind.error;
        const GenomeStats stats = genome_stats(ind.genome);
        hidden += stats.hidden;
        conns += stats.connections;
    }
    const double m = static_cast<double>(population.size());
    report.mean = sum / m;
    report.hidden_mean = hidden / m;
    report.conn_mean = conns / m;
    return report;
}

// --------------------------------------------------------------------------
// Initialization
// --------------------------------------------------------------------------

std::vector<Individual> init_population(const EvolutionConfig& config, const Dataset& dataset,
                                        InnovationRegistry& registry) {
    config.validate();
    dataset.check();
    const int m = static_cast<int>(dataset.input_width());
    const int n = static_cast<int>(dataset.target_width());

    std::vector<Individual> population;
    population.reserve(static_cast<std::size_t>(config.population_size));

    for (int idx = 0; idx < config.population_size; ++idx) {
        Rng rng = Rng::derive(config.seed, "init", 0, static_cast<std::uint64_t>(idx));
        Individual ind;
        switch (config.encoding) {
            case EncodingKind::GeneList: {
                ind.genome = minimal_genelist(m, n, rng);
                ind.error = evaluate_error(ind.genome, config, dataset);
                break;
            }
            case EncodingKind::Matrix: {
                ind.genome = random_matrix_genome(m, config.matrix_max_hidden, n,
                                                  config.matrix_ranges, rng);
                if (config.matrix_train_at_init && config.trainer.bp_epochs > 0) {
                    auto& genome = std::get<MatrixGenome>(ind.genome);
                    Network net = build_network(genome, config.activation);
                    BpOptions options = make_bp_options(config, net.weights.size(), rng);
                    const TrainResult r =
                        partial_train_bp(net, dataset.train(), dataset.val(),
                                         config.trainer.bp_epochs, options, config.fitness);
                    write_back_weights(net, genome);
                    ind.error = r.error_after;
                    ind.success = mark_success(r.error_before, r.error_after);
                } else {
                    ind.error = evaluate_error(ind.genome, config, dataset);
                }
                break;
            }
            case EncodingKind::BitString: {
                const BitLayout layout = BitLayout::full_feedforward(
                    m, config.matrix_max_hidden, n, config.bitstring_g_max);
                ind.genome = random_bitstring_genome(layout, config.bitstring_w_lo,
                                                     config.bitstring_p_connect, rng);
                ind.error = evaluate_error(ind.genome, config, dataset);
                break;
            }
        }
        population.push_back(std::move(ind));
    }

    if (config.encoding == EncodingKind::GeneList)
        registry.counter = m * n + 1;  // minimal genomes already use 1..m*n
    return population;
}

// --------------------------------------------------------------------------
// The hybrid (EPNet-style) reproduction step
// --------------------------------------------------------------------------

Individual epnet_step(const Individual& parent, const EvolutionConfig& config,
                      const Dataset& dataset, Rng& rng,
                      std::vector<std::string>* attempted_ops) {
    Individual child;
    child.genome = parent.genome;
    child.lineage = parent.lineage;
    auto& genome = std::get<MatrixGenome>(child.genome);

    const auto train_genome = [&](MatrixGenome& g) -> TrainResult {
        Network net = build_network(g, config.activation);
        BpOptions options = make_bp_options(config, net.weights.size(), rng);
        const TrainResult r = partial_train_bp(net, dataset.train(), dataset.val(),
                                               config.trainer.bp_epochs, options, config.fitness);
        write_back_weights(net, g);
        return r;
    };

    if (parent.success.value_or(false)) {
        // successful parents keep their structure; only weights move
        const TrainResult r = train_genome(genome);
        child.error = r.error_after;
        child.success = mark_success(r.error_before, r.error_after);
        return child;
    }

    // failure: simulated annealing first, then re-mark
    {
        Network net = build_network(genome, config.activation);
        const SaResult sa = train_sa(net, dataset.val(), config.trainer.sa, config.fitness, rng);
        write_back_weights(net, genome);
        child.error = sa.error_after;
        child.success = mark_success(parent.error, sa.error_after);
        if (*child.success) return child;
    }

    // still failure: ordered structural mutations, each followed by partial BP;
    // the first candidate that reduces the error wins, otherwise the last one
    // is kept
    const double reference_error = child.error;
    const auto& params = config.operators.temperature;
    std::optional<std::pair<MatrixGenome, double>> last_candidate;

    const auto consider = [&](const std::string& op, MatrixGenome&& trial) -> bool {
        const TrainResult r = train_genome(trial);
        if (attempted_ops != nullptr) attempted_ops->push_back(op);
        if (r.error_after < reference_error) {
            genome = std::move(trial);
            child.error = r.error_after;
            child.success = true;
            return true;
        }
        last_candidate = {std::move(trial), r.error_after};
        return false;
    };

    const auto draw_count = [&]() {
        return static_cast<int>(rng.uniform_int(params.delta_min, params.delta_max));
    };

    if (genome.hidden_count() > 0) {
        MatrixGenome trial = genome;
        delete_neurons(trial, std::min(draw_count(), trial.hidden_count()), rng);
        if (consider("delete_neurons", std::move(trial))) return child;
    }
    if (genome.connection_count() > 0) {
        MatrixGenome trial = genome;
        delete_connections(trial,
                           std::min(draw_count(), static_cast<int>(trial.connection_count())),
                           dataset.val(), config.operators.eta, config.activation);
        if (consider("delete_connections", std::move(trial))) return child;
    }
    if (!genome.absent_slots().empty()) {
        MatrixGenome trial = genome;
        add_connections(trial, std::min(draw_count(), static_cast<int>(trial.absent_slots().size())),
                        dataset.val(), config.operators.eta, config.operators.init_interval,
                        config.activation, rng);
        if (consider("add_connections", std::move(trial))) return child;
    }
    if (genome.hidden_count() > 0 && genome.hidden_count() < genome.max_hidden) {
        std::vector<int> hidden;
        for (int idx = genome.inputs; idx < genome.inputs + genome.max_hidden; ++idx)
            if (genome.node_exists(idx)) hidden.push_back(idx);
        const int target = hidden[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<long long>(hidden.size()) - 1))];
        MatrixGenome trial = genome;
        cell_division(trial, target, config.operators.division_alpha);
        if (consider("cell_division", std::move(trial))) return child;
    }

    if (last_candidate.has_value()) {
        genome = std::move(last_candidate->first);
        child.error = last_candidate->second;
        child.success = mark_success(reference_error, child.error);
    }
    return child;
}

// --------------------------------------------------------------------------
// Offspring for the other encodings
// --------------------------------------------------------------------------

namespace {

Individual genelist_offspring(const std::vector<Individual>& population,
                              const RankedPopulation& ranked, const EvolutionConfig& config,
                              const Dataset& dataset, InnovationRegistry& registry, Rng& rng,
                              std::map<std::string, long>& op_counts) {
    const std::size_t first = select_parent_index(ranked, config.selection, rng);
    const Individual& parent = population[first];

    Individual child;
    child.lineage = {static_cast<int>(first)};

    GeneListGenome genome;
    if (population.size() >= 2 && rng.bernoulli(config.operators.p_crossover)) {
        const std::size_t second = select_parent_index(ranked, config.selection, rng);
        child.lineage.push_back(static_cast<int>(second));
        const bool first_fitter = parent.error <= population[second].error;
        genome = recombine(std::get<GeneListGenome>(parent.genome),
                           std::get<GeneListGenome>(population[second].genome), first_fitter, rng);
        ++op_counts["crossover"];
    } else {
        genome = std::get<GeneListGenome>(parent.genome);
    }

    if (rng.bernoulli(config.operators.p_add_connection)) {
        try {
            neat_add_connection(genome, registry, rng, config.operators.init_interval);
            ++op_counts["add_connection"];
        } catch (const ExhaustedSlotsError&) {
            // fully connected; nothing to add
        }
    }
    if (rng.bernoulli(config.operators.p_split_connection)) {
        std::vector<int> enabled;
        for (const auto& gene : genome.connections)
            if (gene.enabled) enabled.push_back(gene.innovation);
        if (!enabled.empty()) {
            const int pick = enabled[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<long long>(enabled.size()) - 1))];
            neat_split_connection(genome, registry, pick);
            ++op_counts["split_connection"];
        }
    }
    if (rng.bernoulli(config.operators.p_perturb)) {
        const double fitness = 1.0 / (1.0 + parent.error);
        const double t = temperature(fitness, config.operators.temperature.f_max);
        const double t_inst = instantaneous_temperature(t, rng);
        perturb_weights(genome, config.operators.temperature, t_inst, rng);
        ++op_counts["perturb_weights"];
    }

    child.genome = std::move(genome);
    if (config.trainer.bp_epochs > 0) {
        auto& trained = std::get<GeneListGenome>(child.genome);
        Network net = build_network(trained, config.activation);
        BpOptions options = make_bp_options(config, net.weights.size(), rng);
        const TrainResult r = partial_train_bp(net, dataset.train(), dataset.val(),
                                               config.trainer.bp_epochs, options, config.fitness);
        write_back_weights(net, trained);
        child.error = r.error_after;
        child.success = mark_success(r.error_before, r.error_after);
        ++op_counts["partial_bp"];
    } else {
        child.error = evaluate_error(child.genome, config, dataset);
    }
    return child;
}

}  // namespace

// --------------------------------------------------------------------------
// Replacement and the main loop
// --------------------------------------------------------------------------

bool replace_worst(std::vector<Individual>& population, Individual offspring) {
    if (population.empty()) throw PopulationError("replace_worst: empty population");
    std::size_t worst = 0;
    for (std::size_t i = 1; i < population.size(); ++i)
        if (population[i].error > population[worst].error) worst = i;
    if (offspring.error < population[worst].error) {
        population[worst] = std::move(offspring);
        return true;
    }
    return false;
}

namespace {

EvolveResult run_loop(EngineState state, const EvolutionConfig& config, const Dataset& dataset,
                      const GenerationHook& hook) {
    const auto best_of = [&]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < state.population.size(); ++i)
            if (state.population[i].error < state.population[best].error) best = i;
        return best;
    };

    // stagnation bookkeeping reconstructed from history so resumed runs agree
    double running_best = state.history.empty() ? state.population[best_of()].error
                                                : state.history.front().best;
    int last_improvement_gen = state.history.empty() ? 0 : state.history.front().generation;
    for (const auto& report : state.history) {
        if (report.best < running_best - config.stop.min_improvement) {
            running_best = report.best;
            last_improvement_gen = report.generation;
        }
    }

    const auto finish = [&](StopReason reason) {
        EvolveResult result;
        result.best = state.population[best_of()];
        result.history = std::move(state.history);
        result.reason = reason;
        result.generations_run = state.next_generation - 1;
        return result;
    };

    const auto target_met = [&]() {
        return config.stop.target_error.has_value() &&
               state.population[best_of()].error < *config.stop.target_error;
    };

    for (int gen = state.next_generation; gen <= config.max_generations; ++gen) {
        if (target_met()) return finish(StopReason::TargetReached);
        if (gen - 1 - last_improvement_gen >= config.stop.stagnation_window)
            return finish(StopReason::Stagnation);

        state.registry.begin_generation();
        GenerationReport report;
        std::map<std::string, long> op_counts;
        std::vector<std::vector<std::string>> attempts;

        switch (config.encoding) {
            case EncodingKind::GeneList: {
                const int offspring_count = config.effective_offspring();
                for (int k = 0; k < offspring_count; ++k) {
                    std::vector<double> errors;
                    errors.reserve(state.population.size());
                    for (const auto& ind : state.population) errors.push_back(ind.error);
                    const RankedPopulation ranked = rank_by_error(errors);
                    Rng rng = Rng::derive(config.seed, "offspring",
                                          static_cast<std::uint64_t>(gen),
                                          static_cast<std::uint64_t>(k));
                    Individual child = genelist_offspring(state.population, ranked, config,
                                                          dataset, state.registry, rng, op_counts);
                    if (replace_worst(state.population, std::move(child)))
                        ++op_counts["replaced"];
                }
                break;
            }
            case EncodingKind::Matrix: {
                const int offspring_count = config.effective_offspring();
                for (int k = 0; k < offspring_count; ++k) {
                    std::vector<double> errors;
                    errors.reserve(state.population.size());
                    for (const auto& ind : state.population) errors.push_back(ind.error);
                    const RankedPopulation ranked = rank_by_error(errors);
                    Rng rng = Rng::derive(config.seed, "offspring",
                                          static_cast<std::uint64_t>(gen),
                                          static_cast<std::uint64_t>(k));
                    const std::size_t parent = select_parent_index(ranked, config.selection, rng);
                    std::vector<std::string> attempted;
                    Individual child =
                        epnet_step(state.population[parent], config, dataset, rng, &attempted);
                    child.lineage = {static_cast<int>(parent)};
                    for (const auto& op : attempted) ++op_counts[op];
                    if (!attempted.empty()) attempts.push_back(std::move(attempted));
                    ++op_counts[child.success.value_or(false) ? "marked_success"
                                                              : "marked_failure"];
                    if (replace_worst(state.population, std::move(child)))
                        ++op_counts["replaced"];
                }
                break;
            }
            case EncodingKind::BitString: {
                Rng pairing_rng =
                    Rng::derive(config.seed, "pairing", static_cast<std::uint64_t>(gen));
                const auto pairs = random_pairing(state.population.size(), pairing_rng);
                std::vector<Individual> brood;
                for (std::size_t k = 0; k < pairs.size(); ++k) {
                    Rng rng = Rng::derive(config.seed, "offspring",
                                          static_cast<std::uint64_t>(gen),
                                          static_cast<std::uint64_t>(k));
                    const auto& a = std::get<BitStringGenome>(state.population[pairs[k].first].genome);
                    const auto& b = std::get<BitStringGenome>(state.population[pairs[k].second].genome);
                    auto [bits1, bits2] = npoint_crossover(a.padded_bits(), b.padded_bits(),
                                                           config.operators.crossover_points, rng);
                    ++op_counts["crossover"];
                    for (const std::string* bits : {&bits1, &bits2}) {
                        BitStringGenome genome =
                            BitStringGenome::from_padded_bits(a.layout, a.w_lo, *bits);
                        mutate_bitstring(genome, config.operators.bit_rates, rng);
                        ++op_counts["bit_mutation"];
                        Individual child;
                        child.lineage = {static_cast<int>(pairs[k].first),
                                         static_cast<int>(pairs[k].second)};
                        child.genome = std::move(genome);
                        child.error = evaluate_error(child.genome, config, dataset);
                        brood.push_back(std::move(child));
                    }
                }
                for (auto& child : brood)
                    if (replace_worst(state.population, std::move(child))) ++op_counts["replaced"];
                break;
            }
        }

        report = make_report(gen, state.population);
        report.operator_counts = std::move(op_counts);
        report.epnet_attempts = std::move(attempts);
        if (report.best < running_best - config.stop.min_improvement) {
            running_best = report.best;
            last_improvement_gen = gen;
        }
        state.history.push_back(report);
        state.next_generation = gen + 1;
        if (hook) hook(state, state.history.back());
    }

    if (target_met()) return finish(StopReason::TargetReached);
    return finish(StopReason::MaxGenerations);
}

}  // namespace

EvolveResult evolve(const EvolutionConfig& config, const Dataset& dataset,
                    const GenerationHook& hook) {
    config.validate();
    dataset.check();
    EngineState state;
    state.registry.dedupe_within_generation = config.operators.innovation_dedupe;
    state.population = init_population(config, dataset, state.registry);
    state.next_generation = 1;
    state.history.push_back(make_report(0, state.population));
    if (hook) hook(state, state.history.back());
    return run_loop(std::move(state), config, dataset, hook);
}

EvolveResult evolve_from(EngineState state, const EvolutionConfig& config, const Dataset& dataset,
                         const GenerationHook& hook) {
    config.validate();
    dataset.check();
    if (state.population.empty()) throw PopulationError("evolve_from: empty population");
    return run_loop(std::move(state), config, dataset, hook);
}

}  // namespace evonet
