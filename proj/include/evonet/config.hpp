#pragma once

#include <string>

#include "evonet/dataset.hpp"
#include "evonet/engine.hpp"
#include "evonet/serialize.hpp"

namespace evonet {

struct OutputSpec {
    std::string metrics_path = "metrics.csv";
    std::string genome_path = "best_genome.json";
    std::string checkpoint_dir;
    int checkpoint_interval = 0;  // generations between checkpoints; 0 = off
};

// Full run description: one JSON file reproduces the run exactly.
struct ExperimentConfig {
    int schema_version = 1;
    EvolutionConfig evolution;
    DatasetSpec dataset;
    OutputSpec output;

    std::vector<std::string> validation_errors() const;
    void validate() const;  // throws ConfigError listing every violation
};

Json experiment_to_json(const ExperimentConfig& config);
// Throws ConfigError with a diagnostic per violated constraint.
ExperimentConfig experiment_from_json(const Json& j);
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace evonet
