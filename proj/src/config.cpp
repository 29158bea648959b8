#include "evonet/config.hpp"

#include <cmath>

namespace evonet {

namespace {

template <typename T>
void read(const Json& j, const char* name, T& out) {
    if (const auto it = j.find(name); it != j.end()) out = it->get<T>();
}

void read_pair(const Json& j, const char* name, std::pair<double, double>& out) {
    if (const auto it = j.find(name); it != j.end()) {
        if (!it->is_array() || it->size() != 2)
            throw ConfigError(std::string(name) + " must be a [lo, hi] pair");
        out = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    }
}

void read_int_pair(const Json& j, const char* name, int& lo, int& hi) {
    if (const auto it = j.find(name); it != j.end()) {
        if (!it->is_array() || it->size() != 2)
            throw ConfigError(std::string(name) + " must be a [lo, hi] pair");
        lo = (*it)[0].get<int>();
        hi = (*it)[1].get<int>();
    }
}

}  // namespace

std::vector<std::string> ExperimentConfig::validation_errors() const {
    std::vector<std::string> problems = evolution.validation_errors();
    if (schema_version != 1) problems.push_back("schema_version must be 1");
    if (dataset.source.empty()) problems.push_back("dataset.source must not be empty");
    if (dataset.split_fraction <= 0.0 || dataset.split_fraction > 1.0)
        problems.push_back("dataset.split_fraction must be in (0, 1]");
    const bool builtin = dataset.source == "xor" || dataset.source.rfind("parity:", 0) == 0;
    if (!builtin && (dataset.csv_inputs < 1 || dataset.csv_outputs < 1))
        problems.push_back("csv datasets need dataset.inputs and dataset.outputs >= 1");
    if (output.checkpoint_interval < 0)
        problems.push_back("output.checkpoint_interval must be >= 0");
    if (output.checkpoint_interval > 0 && output.checkpoint_dir.empty())
        problems.push_back("output.checkpoint_dir required when checkpointing is on");
    return problems;
}

void ExperimentConfig::validate() const {
    const auto problems = validation_errors();
    if (problems.empty()) return;
    std::string joined = "invalid configuration:";
    for (const auto& p : problems) joined += "\n  - " + p;
    throw ConfigError(joined);
}

Json experiment_to_json(const ExperimentConfig& config) {
    const auto& evo = config.evolution;
    Json j;
    j["schema_version"] = config.schema_version;
    j["seed"] = evo.seed;
    j["dataset"] = Json{{"source", config.dataset.source},
                        {"inputs", config.dataset.csv_inputs},
                        {"outputs", config.dataset.csv_outputs},
                        {"split_fraction", config.dataset.split_fraction},
                        {"whiten", config.dataset.whiten_inputs}};
    j["encoding"] = std::string(encoding_name(evo.encoding));
    j["population_size"] = evo.population_size;
    j["max_generations"] = evo.max_generations;
    j["offspring_per_generation"] = evo.offspring_per_generation;
    j["selection"] = std::string(selection_name(evo.selection));
    j["activation"] = std::string(activation_name(evo.activation));
    j["fitness"] = Json{{"measure", std::string(measure_name(evo.fitness.measure))},
                        {"o_max", evo.fitness.o_max},
                        {"o_min", evo.fitness.o_min}};
    Json stop = Json{{"stagnation_window", evo.stop.stagnation_window},
                     {"min_improvement", evo.stop.min_improvement}};
    if (evo.stop.target_error.has_value()) stop["target_error"] = *evo.stop.target_error;
    j["stop"] = stop;

    Json trainer = Json{{"bp_epochs", evo.trainer.bp_epochs},
                        {"learning_rate", evo.trainer.learning_rate},
                        {"momentum", evo.trainer.momentum},
                        {"nesterov", evo.trainer.nesterov},
                        {"dropout", evo.trainer.dropout},
                        {"sa", Json{{"t0", evo.trainer.sa.t0},
                                    {"cooling", evo.trainer.sa.cooling},
                                    {"steps_per_temperature", evo.trainer.sa.steps_per_temperature},
                                    {"t_min", evo.trainer.sa.t_min},
                                    {"proposal_sigma", evo.trainer.sa.proposal_sigma}}}};
    if (evo.trainer.lr_schedule.has_value()) {
        const auto& s = *evo.trainer.lr_schedule;
        trainer["lr_schedule"] =
            Json{{"kind", s.kind == dlopt::LrSchedule::Kind::Step ? "step" : "exp"},
                 {"lr0", s.lr0},
                 {"factor", s.factor},
                 {"period", s.period},
                 {"k", s.k}};
    }
    j["trainer"] = trainer;

    j["operators"] = Json{
        {"alpha", evo.operators.temperature.alpha},
        {"delta", Json::array({evo.operators.temperature.delta_min,
                               evo.operators.temperature.delta_max})},
        {"f_max", evo.operators.temperature.f_max},
        {"bit_rates", Json{{"granularity", evo.operators.bit_rates.p_granularity},
                           {"connectivity", evo.operators.bit_rates.p_connectivity},
                           {"weight", evo.operators.bit_rates.p_weight}}},
        {"crossover_points", evo.operators.crossover_points},
        {"eta", evo.operators.eta},
        {"init_interval", Json::array({evo.operators.init_interval.first,
                                       evo.operators.init_interval.second})},
        {"division_alpha", evo.operators.division_alpha},
        {"p_crossover", evo.operators.p_crossover},
        {"p_add_connection", evo.operators.p_add_connection},
        {"p_split_connection", evo.operators.p_split_connection},
        {"p_perturb", evo.operators.p_perturb},
        {"innovation_dedupe", evo.operators.innovation_dedupe}};

    j["matrix"] = Json{{"max_hidden", evo.matrix_max_hidden},
                       {"hidden_range", Json::array({evo.matrix_ranges.hidden_min,
                                                     evo.matrix_ranges.hidden_max})},
                       {"connection_range", Json::array({evo.matrix_ranges.connections_min,
                                                         evo.matrix_ranges.connections_max})},
                       {"weight_range", Json::array({evo.matrix_ranges.weight_lo,
                                                     evo.matrix_ranges.weight_hi})},
                       {"train_at_init", evo.matrix_train_at_init}};
    j["bitstring"] = Json{{"g_max", evo.bitstring_g_max},
                          {"w_lo", evo.bitstring_w_lo},
                          {"p_connect", evo.bitstring_p_connect}};
    j["output"] = Json{{"metrics", config.output.metrics_path},
                       {"genome", config.output.genome_path},
                       {"checkpoint_dir", config.output.checkpoint_dir},
                       {"checkpoint_interval", config.output.checkpoint_interval}};
    return j;
}

ExperimentConfig experiment_from_json(const Json& j) {
    if (!j.is_object()) throw ConfigError("configuration must be a JSON object");
    ExperimentConfig config;
    auto& evo = config.evolution;

    read(j, "schema_version", config.schema_version);
    read(j, "seed", evo.seed);
    if (const auto it = j.find("dataset"); it != j.end()) {
        read(*it, "source", config.dataset.source);
        read(*it, "inputs", config.dataset.csv_inputs);
        read(*it, "outputs", config.dataset.csv_outputs);
        read(*it, "split_fraction", config.dataset.split_fraction);
        read(*it, "whiten", config.dataset.whiten_inputs);
    }
    if (const auto it = j.find("encoding"); it != j.end())
        evo.encoding = encoding_from_name(it->get<std::string>());
    read(j, "population_size", evo.population_size);
    read(j, "max_generations", evo.max_generations);
    read(j, "offspring_per_generation", evo.offspring_per_generation);
    if (const auto it = j.find("selection"); it != j.end())
        evo.selection = selection_from_name(it->get<std::string>());
    if (const auto it = j.find("activation"); it != j.end())
        evo.activation = activation_from_name(it->get<std::string>());
    if (const auto it = j.find("fitness"); it != j.end()) {
        if (const auto m = it->find("measure"); m != it->end())
            evo.fitness.measure = measure_from_name(m->get<std::string>());
        read(*it, "o_max", evo.fitness.o_max);
        read(*it, "o_min", evo.fitness.o_min);
    }
    if (const auto it = j.find("stop"); it != j.end()) {
        if (const auto t = it->find("target_error"); t != it->end() && !t->is_null())
            evo.stop.target_error = t->get<double>();
        read(*it, "stagnation_window", evo.stop.stagnation_window);
        read(*it, "min_improvement", evo.stop.min_improvement);
    }
    if (const auto it = j.find("trainer"); it != j.end()) {
        read(*it, "bp_epochs", evo.trainer.bp_epochs);
        read(*it, "learning_rate", evo.trainer.learning_rate);
        read(*it, "momentum", evo.trainer.momentum);
        read(*it, "nesterov", evo.trainer.nesterov);
        read(*it, "dropout", evo.trainer.dropout);
        if (const auto sa = it->find("sa"); sa != it->end()) {
            read(*sa, "t0", evo.trainer.sa.t0);
            read(*sa, "cooling", evo.trainer.sa.cooling);
            read(*sa, "steps_per_temperature", evo.trainer.sa.steps_per_temperature);
            read(*sa, "t_min", evo.trainer.sa.t_min);
            read(*sa, "proposal_sigma", evo.trainer.sa.proposal_sigma);
        }
        if (const auto s = it->find("lr_schedule"); s != it->end() && !s->is_null()) {
            dlopt::LrSchedule schedule;
            std::string kind = "step";
            read(*s, "kind", kind);
            if (kind == "step")
                schedule.kind = dlopt::LrSchedule::Kind::Step;
            else if (kind == "exp")
                schedule.kind = dlopt::LrSchedule::Kind::Exponential;
            else
                throw ConfigError("trainer.lr_schedule.kind must be \"step\" or \"exp\"");
            read(*s, "lr0", schedule.lr0);
            read(*s, "factor", schedule.factor);
            read(*s, "period", schedule.period);
            read(*s, "k", schedule.k);
            evo.trainer.lr_schedule = schedule;
        }
    }
    if (const auto it = j.find("operators"); it != j.end()) {
        read(*it, "alpha", evo.operators.temperature.alpha);
        read_int_pair(*it, "delta", evo.operators.temperature.delta_min,
                      evo.operators.temperature.delta_max);
        read(*it, "f_max", evo.operators.temperature.f_max);
        if (const auto rates = it->find("bit_rates"); rates != it->end()) {
            read(*rates, "granularity", evo.operators.bit_rates.p_granularity);
            read(*rates, "connectivity", evo.operators.bit_rates.p_connectivity);
            read(*rates, "weight", evo.operators.bit_rates.p_weight);
        }
        read(*it, "crossover_points", evo.operators.crossover_points);
        read(*it, "eta", evo.operators.eta);
        read_pair(*it, "init_interval", evo.operators.init_interval);
        read(*it, "division_alpha", evo.operators.division_alpha);
        read(*it, "p_crossover", evo.operators.p_crossover);
        read(*it, "p_add_connection", evo.operators.p_add_connection);
        read(*it, "p_split_connection", evo.operators.p_split_connection);
        read(*it, "p_perturb", evo.operators.p_perturb);
        read(*it, "innovation_dedupe", evo.operators.innovation_dedupe);
    }
    if (const auto it = j.find("matrix"); it != j.end()) {
        read(*it, "max_hidden", evo.matrix_max_hidden);
        read_int_pair(*it, "hidden_range", evo.matrix_ranges.hidden_min,
                      evo.matrix_ranges.hidden_max);
        read_int_pair(*it, "connection_range", evo.matrix_ranges.connections_min,
                      evo.matrix_ranges.connections_max);
        if (const auto w = it->find("weight_range"); w != it->end()) {
            evo.matrix_ranges.weight_lo = (*w)[0].get<double>();
            evo.matrix_ranges.weight_hi = (*w)[1].get<double>();
        }
        read(*it, "train_at_init", evo.matrix_train_at_init);
    }
    if (const auto it = j.find("bitstring"); it != j.end()) {
        read(*it, "g_max", evo.bitstring_g_max);
        read(*it, "w_lo", evo.bitstring_w_lo);
        read(*it, "p_connect", evo.bitstring_p_connect);
    }
    if (const auto it = j.find("output"); it != j.end()) {
        read(*it, "metrics", config.output.metrics_path);
        read(*it, "genome", config.output.genome_path);
        read(*it, "checkpoint_dir", config.output.checkpoint_dir);
        read(*it, "checkpoint_interval", config.output.checkpoint_interval);
    }

    config.validate();
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    return experiment_from_json(load_json_file(path));
}

}  // namespace evonet
