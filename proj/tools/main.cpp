#include <cstdio>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "evonet/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"evonet - neuroevolution engine for feedforward networks"};
    app.require_subcommand(1);

    // evolve
    auto* evolve = app.add_subcommand("evolve", "run an evolution experiment");
    std::string config_path;
    std::string resume_path;
    evolve->add_option("--config", config_path, "experiment config JSON");
    evolve->add_option("--resume", resume_path, "checkpoint JSON to continue from");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a stored genome on a dataset");
    std::string eval_genome;
    std::string eval_dataset = "xor";
    int eval_inputs = 0;
    int eval_outputs = 0;
    double eval_split = 1.0;
    std::uint64_t eval_seed = 1;
    eval->add_option("--genome", eval_genome, "genome JSON")->required();
    eval->add_option("--dataset", eval_dataset, "builtin name (xor, parity:N) or CSV path");
    eval->add_option("--inputs", eval_inputs, "CSV input column count");
    eval->add_option("--outputs", eval_outputs, "CSV output column count");
    eval->add_option("--split-fraction", eval_split, "training split fraction");
    eval->add_option("--seed", eval_seed, "split seed");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "describe a stored genome");
    std::string inspect_genome_path;
    std::string dot_path;
    inspect->add_option("--genome", inspect_genome_path, "genome JSON")->required();
    inspect->add_option("--dot", dot_path, "write the DOT graph here instead of stdout");

    // plot-metrics
    auto* plot = app.add_subcommand("plot-metrics", "render a metrics CSV as an SVG chart");
    std::string metrics_in;
    std::string svg_out;
    plot->add_option("--in", metrics_in, "metrics CSV")->required();
    plot->add_option("--out", svg_out, "output SVG path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve->parsed()) {
            return evonet::run_evolve_cli(
                config_path.empty() ? std::nullopt : std::optional<std::string>(config_path),
                resume_path.empty() ? std::nullopt : std::optional<std::string>(resume_path));
        }
        if (eval->parsed()) {
            evonet::DatasetSpec spec;
            spec.source = eval_dataset;
            spec.csv_inputs = eval_inputs;
            spec.csv_outputs = eval_outputs;
            spec.split_fraction = eval_split;
            std::fputs(evonet::eval_genome_file(eval_genome, spec, eval_seed).c_str(), stdout);
            return 0;
        }
        if (inspect->parsed()) {
            const evonet::InspectReport report = evonet::inspect_genome_file(inspect_genome_path);
            std::fputs(report.text.c_str(), stdout);
            if (dot_path.empty()) {
                std::fputs(report.dot.c_str(), stdout);
            } else {
                std::ofstream out(dot_path);
                if (!out) {
                    std::fprintf(stderr, "error: cannot write %s\n", dot_path.c_str());
                    return 1;
                }
                out << report.dot;
            }
            return 0;
        }
        if (plot->parsed()) {
            evonet::plot_metrics(metrics_in, svg_out);
            std::printf("wrote %s\n", svg_out.c_str());
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
