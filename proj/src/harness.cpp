#include "evonet/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evonet/log.hpp"

namespace evonet {

namespace {

std::string format_double(double v) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

std::string metrics_row(const GenerationReport& r) {
    std::string row = std::to_string(r.generation);
    for (const double v : {r.best, r.mean, r.worst, r.hidden_mean, r.conn_mean})
        row += "," + format_double(v);
    return row;
}

}  // namespace

Json checkpoint_to_json(const ExperimentConfig& config, const EngineState& state) {
    return Json{{"schema_version", 1},
                {"config", experiment_to_json(config)},
                {"state", engine_state_to_json(state)}};
}

std::pair<ExperimentConfig, EngineState> checkpoint_from_json(const Json& j) {
    if (!j.is_object() || !j.contains("config") || !j.contains("state"))
        throw DecodeError("checkpoint: expected {config, state}");
    return {experiment_from_json(j.at("config")), engine_state_from_json(j.at("state"))};
}

RunOutcome run_evolve(const ExperimentConfig& config,
                      const std::optional<std::string>& resume_path) {
    config.validate();
    const Dataset dataset = load_dataset(config.dataset, config.evolution.seed);

    std::ofstream metrics(config.output.metrics_path);
    if (!metrics) throw DataError("cannot write " + config.output.metrics_path);
    metrics << kMetricsHeader << '\n';

    const bool checkpointing =
        config.output.checkpoint_interval > 0 && !config.output.checkpoint_dir.empty();
    if (checkpointing) std::filesystem::create_directories(config.output.checkpoint_dir);

    const GenerationHook hook = [&](const EngineState& state, const GenerationReport& report) {
        metrics << metrics_row(report) << '\n';
        metrics.flush();
        if (checkpointing && report.generation > 0 &&
            report.generation % config.output.checkpoint_interval == 0) {
            const std::string path = config.output.checkpoint_dir + "/checkpoint_gen" +
                                     std::to_string(report.generation) + ".json";
            write_json_file(path, checkpoint_to_json(config, state));
            log::info("checkpoint written: " + path);
        }
    };

    EvolveResult result;
    if (resume_path.has_value()) {
        auto [snapshot, state] = checkpoint_from_json(load_json_file(*resume_path));
        (void)snapshot;  // run_evolve_cli already selected which config to use
        result = evolve_from(std::move(state), config.evolution, dataset, hook);
    } else {
        result = evolve(config.evolution, dataset, hook);
    }

    write_json_file(config.output.genome_path, genome_to_json(result.best.genome));

    RunOutcome outcome;
    outcome.reason = result.reason;
    outcome.exit_code = result.reason == StopReason::TargetReached ? 0 : 2;
    outcome.best_error = result.best.error;
    outcome.generations = result.generations_run;
    outcome.genome_path = config.output.genome_path;
    outcome.metrics_path = config.output.metrics_path;
    return outcome;
}

int run_evolve_cli(const std::optional<std::string>& config_path,
                   const std::optional<std::string>& resume_path) {
    try {
        ExperimentConfig config;
        if (resume_path.has_value()) {
            auto [snapshot, state] = checkpoint_from_json(load_json_file(*resume_path));
            config = snapshot;
        } else if (config_path.has_value()) {
            config = load_experiment_config(*config_path);
        } else {
            std::fprintf(stderr, "evolve: need --config or --resume\n");
            return 1;
        }
        const RunOutcome outcome = run_evolve(config, resume_path);
        const char* reason = outcome.reason == StopReason::TargetReached ? "target reached"
                             : outcome.reason == StopReason::Stagnation  ? "stagnation"
                                                                         : "max generations";
        std::printf("finished after %d generations (%s), best error %.6g\n", outcome.generations,
                    reason, outcome.best_error);
        std::printf("metrics: %s\nbest genome: %s\n", outcome.metrics_path.c_str(),
                    outcome.genome_path.c_str());
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

// --------------------------------------------------------------------------
// inspect
// --------------------------------------------------------------------------

namespace {

void describe_connection(std::ostringstream& out, int from, int to, double weight) {
    out << "  " << from << " -> " << to << "  w=" << format_double(weight) << '\n';
}

}  // namespace

InspectReport inspect_genome(const Genome& genome) {
    InspectReport report;
    std::ostringstream text;

    if (const auto* genes = std::get_if<GeneListGenome>(&genome)) {
        report.kind = "genelist";
        report.neuron_count = static_cast<int>(genes->neurons.size());
        for (const auto& n : genes->neurons) {
            if (n.role == NeuronRole::Input) ++report.input_count;
            else if (n.role == NeuronRole::Hidden) ++report.hidden_count;
            else ++report.output_count;
        }
        report.connection_count = static_cast<int>(genes->enabled_count());
        report.disabled_count =
            static_cast<int>(genes->connections.size()) - report.connection_count;
        text << "kind: genelist\n"
             << "neurons: " << report.neuron_count << " (" << report.input_count << " input, "
             << report.hidden_count << " hidden, " << report.output_count << " output)\n"
             << "connections: " << report.connection_count << " enabled, "
             << report.disabled_count << " disabled\n";
        for (const auto& c : genes->connections) {
            text << "  " << c.in_id << " -> " << c.out_id << "  w=" << format_double(c.weight)
                 << "  innovation=" << c.innovation << (c.enabled ? "" : "  (disabled)") << '\n';
        }
    } else if (const auto* matrix = std::get_if<MatrixGenome>(&genome)) {
        report.kind = "matrix";
        report.input_count = matrix->inputs;
        report.output_count = matrix->outputs;
        report.hidden_count = matrix->hidden_count();
        report.inactive_hidden = matrix->max_hidden - report.hidden_count;
        report.neuron_count = matrix->inputs + report.hidden_count + matrix->outputs;
        report.connection_count = static_cast<int>(matrix->connection_count());
        text << "kind: matrix\n"
             << "neurons: " << report.neuron_count << " (" << report.input_count << " input, "
             << report.hidden_count << " hidden, " << report.output_count << " output)\n"
             << "hidden slots: " << matrix->max_hidden << " (" << report.inactive_hidden
             << " inactive)\n"
             << "connections: " << report.connection_count << '\n';
        for (int h = 0; h < matrix->max_hidden; ++h)
            text << "  hidden slot " << (matrix->inputs + h) << ": "
                 << (matrix->hidden_exists[static_cast<std::size_t>(h)] ? "active" : "inactive")
                 << '\n';
        for (const auto& [from, to] : matrix->connections())
            describe_connection(text, from, to, matrix->weight(from, to));
    } else {
        const auto& bits = std::get<BitStringGenome>(genome);
        report.kind = "bitstring";
        report.input_count = bits.layout.inputs;
        report.hidden_count = bits.layout.max_hidden;
        report.output_count = bits.layout.outputs;
        report.neuron_count = bits.layout.node_count();
        for (const auto& sub : bits.substrings)
            if (sub[0] == '1') ++report.connection_count;
        const MatrixGenome decoded = decode_bitstring(bits);
        text << "kind: bitstring\n"
             << "granularity: " << bits.granularity() << " (g_max " << bits.layout.g_max << ")\n"
             << "codebook: [" << bits.w_lo << ", " << bits.codebook().max_value() << "]\n"
             << "neurons: " << report.neuron_count << " (" << report.input_count << " input, "
             << report.hidden_count << " hidden, " << report.output_count << " output)\n"
             << "connections: " << report.connection_count << " of "
             << bits.layout.slots.size() << " slots\n";
        for (const auto& [from, to] : decoded.connections())
            describe_connection(text, from, to, decoded.weight(from, to));
    }

    // DOT graph of the decoded network
    const Network net = build_network(genome);
    std::ostringstream dot;
    dot << "digraph genome {\n  rankdir=LR;\n";
    for (const auto& node : net.node_order) {
        const char* shape = node.role == NeuronRole::Input    ? "box"
                            : node.role == NeuronRole::Output ? "doublecircle"
                                                              : "circle";
        dot << "  n" << node.id << " [shape=" << shape << ", label=\"" << role_name(node.role)
            << " " << node.id << "\"];\n";
    }
    for (const auto& conn : net.connections) {
        dot << "  n" << net.node_order[static_cast<std::size_t>(conn.from)].id << " -> n"
            << net.node_order[static_cast<std::size_t>(conn.to)].id << " [label=\""
            << format_double(net.weights[static_cast<std::size_t>(conn.weight_index)])
            << "\"];\n";
    }
    dot << "}\n";

    report.text = text.str();
    report.dot = dot.str();
    return report;
}

InspectReport inspect_genome_file(const std::string& genome_path) {
    return inspect_genome(genome_from_json(load_json_file(genome_path)));
}

// --------------------------------------------------------------------------
// plot-metrics
// --------------------------------------------------------------------------

void plot_metrics(const std::string& metrics_path, const std::string& svg_path) {
    std::ifstream file(metrics_path);
    if (!file) throw DataError("cannot open " + metrics_path);
    std::string line;
    if (!std::getline(file, line)) throw DataError("metrics file is empty");
    if (line.rfind("gen,", 0) != 0) throw ParseError("metrics: unexpected header \"" + line + "\"");

    std::vector<double> gens, best, mean, worst;
    std::size_t line_number = 1;
    while (std::getline(file, line)) {
        ++line_number;
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) {
            try {
                cells.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw ParseError("metrics: bad number at line " + std::to_string(line_number));
            }
        }
        if (cells.size() < 6)
            throw ParseError("metrics: short row at line " + std::to_string(line_number));
        gens.push_back(cells[0]);
        best.push_back(cells[1]);
        mean.push_back(cells[2]);
        worst.push_back(cells[3]);
    }
    if (gens.empty()) throw DataError("metrics: no data rows");

    const double x_min = gens.front();
    const double x_max = gens.back();
    double y_min = best[0];
    double y_max = best[0];
    for (const auto* series : {&best, &mean, &worst}) {
        for (const double v : *series) {
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (y_max == y_min) y_max = y_min + 1.0;

    const double width = 800.0, height = 500.0, margin = 60.0;
    const auto x_of = [&](double g) {
        if (x_max == x_min) return margin + (width - 2 * margin) / 2.0;
        return margin + (g - x_min) / (x_max - x_min) * (width - 2 * margin);
    };
    const auto y_of = [&](double v) {
        return height - margin - (v - y_min) / (y_max - y_min) * (height - 2 * margin);
    };

    std::ofstream svg(svg_path);
    if (!svg) throw DataError("cannot write " + svg_path);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    // axes
    svg << "  <line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
        << width - margin << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
        << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << margin << "\" y=\"" << height - margin / 3
        << "\" font-size=\"12\">gen " << format_double(x_min) << "</text>\n";
    svg << "  <text x=\"" << width - margin << "\" y=\"" << height - margin / 3
        << "\" font-size=\"12\" text-anchor=\"end\">gen " << format_double(x_max) << "</text>\n";
    svg << "  <text x=\"" << margin / 4 << "\" y=\"" << height - margin
        << "\" font-size=\"12\">" << format_double(y_min) << "</text>\n";
    svg << "  <text x=\"" << margin / 4 << "\" y=\"" << margin << "\" font-size=\"12\">"
        << format_double(y_max) << "</text>\n";

    const char* colors[3] = {"#1f77b4", "#2ca02c", "#d62728"};
    const char* names[3] = {"best", "mean", "worst"};
    const std::vector<double>* series[3] = {&best, &mean, &worst};
    for (int s = 0; s < 3; ++s) {
        svg << "  <polyline fill=\"none\" stroke=\"" << colors[s] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < gens.size(); ++i) {
            if (i > 0) svg << ' ';
            char point[64];
            std::snprintf(point, sizeof(point), "%.2f,%.2f", x_of(gens[i]), y_of((*series[s])[i]));
            svg << point;
        }
        svg << "\"/>\n";
        svg << "  <text x=\"" << width - margin + 4 << "\" y=\"" << margin + 16 * (s + 1)
            << "\" font-size=\"12\" fill=\"" << colors[s] << "\">" << names[s] << "</text>\n";
    }
    svg << "</svg>\n";
}

// --------------------------------------------------------------------------
// eval
// --------------------------------------------------------------------------

std::string eval_genome_file(const std::string& genome_path, const DatasetSpec& dataset_spec,
                             std::uint64_t seed) {
    const Genome genome = genome_from_json(load_json_file(genome_path));
    const Dataset dataset = load_dataset(dataset_spec, seed);
    const Network net = build_network(genome);

    std::ostringstream out;
    out << "dataset: " << dataset_spec.source << " (" << dataset.patterns() << " patterns, "
        << dataset.val().size() << " validation)\n";
    for (const Measure m : {Measure::Sqe, Measure::Abs, Measure::Exp}) {
        out << measure_name(m) << " (validation): "
            << format_double(dataset_error(net, dataset.val(), m)) << '\n';
    }
    FitnessSpec prechelt;
    prechelt.measure = Measure::Prechelt;
    out << "prechelt (validation): "
        << format_double(dataset_error(net, dataset.val(), prechelt)) << '\n';
    return out.str();
}

}  // namespace evonet
