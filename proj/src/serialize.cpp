#include "evonet/serialize.hpp"

#include <fstream>

namespace evonet {

namespace {

const Json& field(const Json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) throw DecodeError(std::string("missing field \"") + name + "\"");
    return *it;
}

Json bitstring_to_json(const BitStringGenome& g) {
    Json slots = Json::array();
    for (const auto& s : g.layout.slots) slots.push_back(Json::array({s.source, s.target}));
    Json subs = Json::array();
    for (const auto& s : g.substrings) subs.push_back(s);
    return Json{{"kind", "bitstring"},
                {"inputs", g.layout.inputs},
                {"max_hidden", g.layout.max_hidden},
                {"outputs", g.layout.outputs},
                {"g_max", g.layout.g_max},
                {"w_lo", g.w_lo},
                {"layout", slots},
                {"header", g.header},
                {"substrings", subs}};
}

BitStringGenome bitstring_from_json(const Json& j) {
    BitStringGenome g;
    g.layout.inputs = field(j, "inputs").get<int>();
    g.layout.max_hidden = field(j, "max_hidden").get<int>();
    g.layout.outputs = field(j, "outputs").get<int>();
    g.layout.g_max = field(j, "g_max").get<int>();
    g.w_lo = field(j, "w_lo").get<int>();
    for (const auto& slot : field(j, "layout")) {
        if (!slot.is_array() || slot.size() != 2)
            throw DecodeError("bitstring genome: layout slot must be a [source, target] pair");
        g.layout.slots.push_back({slot[0].get<int>(), slot[1].get<int>()});
    }
    g.header = field(j, "header").get<std::string>();
    for (const auto& sub : field(j, "substrings")) g.substrings.push_back(sub.get<std::string>());
    g.validate();
    return g;
}

Json matrix_to_json(const MatrixGenome& g) {
    Json connectivity = Json::array();
    for (const auto bit : g.connectivity) connectivity.push_back(static_cast<int>(bit));
    Json exists = Json::array();
    for (const auto bit : g.hidden_exists) exists.push_back(static_cast<int>(bit));
    return Json{{"kind", "matrix"},      {"inputs", g.inputs},
                {"max_hidden", g.max_hidden}, {"outputs", g.outputs},
                {"connectivity", connectivity}, {"weights", g.weights},
                {"hidden_exists", exists}};
}

MatrixGenome matrix_from_json(const Json& j) {
    MatrixGenome g(field(j, "inputs").get<int>(), field(j, "max_hidden").get<int>(),
                   field(j, "outputs").get<int>());
    const auto& connectivity = field(j, "connectivity");
    const auto& weights = field(j, "weights");
    const auto& exists = field(j, "hidden_exists");
    if (connectivity.size() != g.connectivity.size() || weights.size() != g.weights.size() ||
        exists.size() != g.hidden_exists.size())
        throw DecodeError("matrix genome: array sizes do not match the node counts");
    for (std::size_t i = 0; i < g.connectivity.size(); ++i)
        g.connectivity[i] = connectivity[i].get<int>() != 0 ? 1 : 0;
    for (std::size_t i = 0; i < g.weights.size(); ++i) g.weights[i] = weights[i].get<double>();
    for (std::size_t i = 0; i < g.hidden_exists.size(); ++i)
        g.hidden_exists[i] = exists[i].get<int>() != 0 ? 1 : 0;
    g.validate();
    return g;
}

Json genelist_to_json(const GeneListGenome& g) {
    Json neurons = Json::array();
    for (const auto& n : g.neurons)
        neurons.push_back(Json{{"id", n.id}, {"role", std::string(role_name(n.role))}});
    Json connections = Json::array();
    for (const auto& c : g.connections)
        connections.push_back(Json{{"in", c.in_id},
                                   {"out", c.out_id},
                                   {"weight", c.weight},
                                   {"enabled", c.enabled},
                                   {"innovation", c.innovation}});
    return Json{{"kind", "genelist"}, {"neurons", neurons}, {"connections", connections}};
}

GeneListGenome genelist_from_json(const Json& j) {
    GeneListGenome g;
    for (const auto& n : field(j, "neurons"))
        g.neurons.push_back(
            {field(n, "id").get<int>(), role_from_name(field(n, "role").get<std::string>())});
    for (const auto& c : field(j, "connections"))
        g.connections.push_back({field(c, "in").get<int>(), field(c, "out").get<int>(),
                                 field(c, "weight").get<double>(),
                                 field(c, "enabled").get<bool>(),
                                 field(c, "innovation").get<int>()});
    g.validate();
    return g;
}

}  // namespace

Json genome_to_json(const Genome& genome) {
    if (const auto* bits = std::get_if<BitStringGenome>(&genome)) return bitstring_to_json(*bits);
    if (const auto* matrix = std::get_if<MatrixGenome>(&genome)) return matrix_to_json(*matrix);
    return genelist_to_json(std::get<GeneListGenome>(genome));
}

Genome genome_from_json(const Json& j) {
    if (!j.is_object()) throw DecodeError("genome: expected a JSON object");
    const std::string kind = field(j, "kind").get<std::string>();
    if (kind == "bitstring") return bitstring_from_json(j);
    if (kind == "matrix") return matrix_from_json(j);
    if (kind == "genelist") return genelist_from_json(j);
    throw DecodeError("genome: unknown kind \"" + kind + "\"");
}

Json individual_to_json(const Individual& individual) {
    Json j{{"genome", genome_to_json(individual.genome)},
           {"error", individual.error},
           {"lineage", individual.lineage}};
    if (individual.success.has_value())
        j["success"] = *individual.success;
    else
        j["success"] = nullptr;
    return j;
}

Individual individual_from_json(const Json& j) {
    Individual individual;
    individual.genome = genome_from_json(field(j, "genome"));
    individual.error = field(j, "error").get<double>();
    const auto& success = field(j, "success");
    if (!success.is_null()) individual.success = success.get<bool>();
    for (const auto& p : field(j, "lineage")) individual.lineage.push_back(p.get<int>());
    return individual;
}

Json report_to_json(const GenerationReport& report) {
    Json counts = Json::object();
    for (const auto& [op, count] : report.operator_counts) counts[op] = count;
    Json attempts = Json::array();
    for (const auto& seq : report.epnet_attempts) attempts.push_back(seq);
    return Json{{"generation", report.generation},
                {"best", report.best},
                {"mean", report.mean},
                {"worst", report.worst},
                {"hidden_mean", report.hidden_mean},
                {"conn_mean", report.conn_mean},
                {"operator_counts", counts},
                {"epnet_attempts", attempts}};
}

GenerationReport report_from_json(const Json& j) {
    GenerationReport report;
    report.generation = field(j, "generation").get<int>();
    report.best = field(j, "best").get<double>();
    report.mean = field(j, "mean").get<double>();
    report.worst = field(j, "worst").get<double>();
    report.hidden_mean = field(j, "hidden_mean").get<double>();
    report.conn_mean = field(j, "conn_mean").get<double>();
    for (const auto& [op, count] : field(j, "operator_counts").items())
        report.operator_counts[op] = count.get<long>();
    for (const auto& seq : field(j, "epnet_attempts"))
        report.epnet_attempts.push_back(seq.get<std::vector<std::string>>());
    return report;
}

Json registry_to_json(const InnovationRegistry& registry) {
    Json history = Json::array();
    for (const auto& entry : registry.history)
        history.push_back(Json{{"kind", entry.kind},
                               {"in", entry.in_id},
                               {"out", entry.out_id},
                               {"number", entry.number}});
    return Json{{"counter", registry.counter},
                {"dedupe", registry.dedupe_within_generation},
                {"history", history}};
}

InnovationRegistry registry_from_json(const Json& j) {
    InnovationRegistry registry;
    registry.counter = field(j, "counter").get<int>();
    registry.dedupe_within_generation = field(j, "dedupe").get<bool>();
    for (const auto& entry : field(j, "history"))
        registry.history.push_back({field(entry, "kind").get<std::string>(),
                                    field(entry, "in").get<int>(),
                                    field(entry, "out").get<int>(),
                                    field(entry, "number").get<int>()});
    return registry;
}

Json engine_state_to_json(const EngineState& state) {
    Json population = Json::array();
    for (const auto& ind : state.population) population.push_back(individual_to_json(ind));
    Json history = Json::array();
    for (const auto& report : state.history) history.push_back(report_to_json(report));
    return Json{{"population", population},
                {"registry", registry_to_json(state.registry)},
                {"next_generation", state.next_generation},
                {"history", history}};
}

EngineState engine_state_from_json(const Json& j) {
    EngineState state;
    for (const auto& ind : field(j, "population"))
        state.population.push_back(individual_from_json(ind));
    state.registry = registry_from_json(field(j, "registry"));
    state.next_generation = field(j, "next_generation").get<int>();
    for (const auto& report : field(j, "history"))
        state.history.push_back(report_from_json(report));
    return state;
}

Json load_json_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw DataError("cannot open " + path);
    Json j;
    try {
        file >> j;
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream file(path);
    if (!file) throw DataError("cannot write " + path);
    file << j.dump(2) << '\n';
}

}  // namespace evonet
