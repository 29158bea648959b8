#pragma once

#include <optional>
#include <string>

#include "evonet/config.hpp"

namespace evonet {

// Metrics CSV column layout, one row per generation.
inline constexpr const char* kMetricsHeader = "gen,best,mean,worst,hidden_mean,conn_mean";

struct RunOutcome {
    int exit_code = 0;  // 0 target reached, 2 stagnation/max-generations
    StopReason reason = StopReason::MaxGenerations;
    double best_error = 0.0;
    int generations = 0;
    std::string genome_path;
    std::string metrics_path;
};

// Executes the configured run: writes the metrics CSV, periodic checkpoints
// and the final best genome. With `resume`, continues from a checkpoint file
// instead of initializing.
RunOutcome run_evolve(const ExperimentConfig& config,
                      const std::optional<std::string>& resume_path = std::nullopt);

// Convenience wrapper used by the CLI: loads the config (or the snapshot
// inside the checkpoint), maps errors to exit code 1.
int run_evolve_cli(const std::optional<std::string>& config_path,
                   const std::optional<std::string>& resume_path);

struct InspectReport {
    std::string kind;
    int neuron_count = 0;
    int input_count = 0;
    int hidden_count = 0;
    int output_count = 0;
    int inactive_hidden = 0;
    int connection_count = 0;  // enabled/present
    int disabled_count = 0;
    std::string text;  // human-readable report
    std::string dot;   // DOT-format graph of the decoded network
};

InspectReport inspect_genome(const Genome& genome);
InspectReport inspect_genome_file(const std::string& genome_path);

// Line chart of best/mean/worst error against generation.
void plot_metrics(const std::string& metrics_path, const std::string& svg_path);

// Error of a stored genome on a dataset, for every measure.
std::string eval_genome_file(const std::string& genome_path, const DatasetSpec& dataset_spec,
                             std::uint64_t seed);

// Checkpoint document: config snapshot + full engine state.
Json checkpoint_to_json(const ExperimentConfig& config, const EngineState& state);
std::pair<ExperimentConfig, EngineState> checkpoint_from_json(const Json& j);

}  // namespace evonet
