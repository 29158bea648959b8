#include "evonet/variation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "evonet/log.hpp"

namespace evonet {

// --------------------------------------------------------------------------
// Temperature machinery
// --------------------------------------------------------------------------

void TemperatureParams::validate() const {
    if (alpha <= 0.0) throw ParamError("temperature params: alpha must be positive");
    if (delta_min < 0 || delta_max < delta_min)
        throw ParamError("temperature params: need 0 <= delta_min <= delta_max");
    if (f_max <= 0.0) throw ParamError("temperature params: f_max must be positive");
}

double temperature(double fitness, double f_max) {
    if (f_max <= 0.0) throw ParamError("temperature: f_max must be positive");
    if (fitness < 0.0 || fitness > f_max)
        throw ParamError("temperature: fitness outside [0, f_max]");
    return 1.0 - fitness / f_max;
}

double instantaneous_temperature(double t, Rng& rng) {
    if (t < 0.0 || t > 1.0) throw ParamError("instantaneous_temperature: T outside [0, 1]");
    return rng.uniform() * t;
}

namespace {

double perturbation_sigma(const TemperatureParams& params, double t_inst) {
    if (t_inst < 0.0) throw ParamError("perturb_weights: negative instantaneous temperature");
    return std::sqrt(params.alpha * t_inst);
}

}  // namespace

void perturb_weights(MatrixGenome& genome, const TemperatureParams& params, double t_inst,
                     Rng& rng) {
    params.validate();
    const double sigma = perturbation_sigma(params, t_inst);
    if (sigma == 0.0) return;
    for (const auto& [from, to] : genome.connections())
        genome.set_connection(from, to, genome.weight(from, to) + rng.normal(0.0, sigma));
}

void perturb_weights(GeneListGenome& genome, const TemperatureParams& params, double t_inst,
                     Rng& rng) {
    params.validate();
    const double sigma = perturbation_sigma(params, t_inst);
    if (sigma == 0.0) return;
    for (auto& gene : genome.connections)
        if (gene.enabled) gene.weight += rng.normal(0.0, sigma);
}

int structural_mutation_count(const TemperatureParams& params, double t_inst, Rng& rng) {
    params.validate();
    if (t_inst < 0.0 || t_inst > 1.0)
        throw ParamError("structural_mutation_count: T~ outside [0, 1]");
    const double span = static_cast<double>(params.delta_max - params.delta_min);
    const int count =
        params.delta_min + static_cast<int>(std::floor(rng.uniform() * t_inst * span));
    return std::clamp(count, params.delta_min, params.delta_max);
}

// --------------------------------------------------------------------------
// Connection importance
// --------------------------------------------------------------------------

double connection_test(double weight, std::span<const double> deltas) {
    if (deltas.size() < 2) throw ParamError("connection_test: needs at least two patterns");
    bool all_equal = true;
    for (const double d : deltas) all_equal = all_equal && d == deltas[0];
    if (all_equal) return kConnectionTestSentinel;
    double sum = 0.0;
    for (const double d : deltas) sum += weight + d;
    const double mean = sum / static_cast<double>(deltas.size());
    double sq = 0.0;
    for (const double d : deltas) {
        const double dev = (weight + d) - mean;
        sq += dev * dev;
    }
    if (sq == 0.0) return kConnectionTestSentinel;
    return sum / std::sqrt(sq);
}

namespace {

// Per-pattern xi values for a set of slots; slot weight w and per-pattern
// delta -eta * act_from * delta_to reconstruct Eq-style deltas for present
// and candidate connections alike.
std::vector<ConnectionImportance> importances_for_slots(
    const MatrixGenome& genome, const std::vector<std::pair<int, int>>& slots,
    const DataSplit& validation, double eta, Activation activation) {
    if (validation.size() == 0) throw DataError("connection importance: empty validation split");
    if (validation.size() < 2)
        throw ParamError("connection importance: needs at least two validation patterns");

    const Network net = build_network(genome, activation);
    const NodeBackpropData data = backprop_node_data(net, validation, Measure::Abs);

    std::map<int, std::size_t> position;
    for (std::size_t pos = 0; pos < net.node_order.size(); ++pos)
        position[net.node_order[pos].id] = pos;

    std::vector<ConnectionImportance> out;
    out.reserve(slots.size());
    std::vector<double> deltas(validation.size());
    for (const auto& [from, to] : slots) {
        const auto it_from = position.find(from);
        const auto it_to = position.find(to);
        if (it_from == position.end() || it_to == position.end()) {
            // endpoint pruned from the evaluated network: no gradient signal
            out.push_back({from, to, kConnectionTestSentinel});
            continue;
        }
        const double w = genome.connected(from, to) ? genome.weight(from, to) : 0.0;
        for (std::size_t p = 0; p < validation.size(); ++p) {
            const double grad = data.act.at(p, it_from->second) * data.delta.at(p, it_to->second);
            deltas[p] = -eta * grad;
        }
        out.push_back({from, to, connection_test(w, deltas)});
    }
    return out;
}

}  // namespace

std::vector<ConnectionImportance> connection_importances(const MatrixGenome& genome,
                                                         const DataSplit& validation, double eta,
                                                         Activation activation) {
    return importances_for_slots(genome, genome.connections(), validation, eta, activation);
}

std::vector<ConnectionImportance> candidate_importances(const MatrixGenome& genome,
                                                        const DataSplit& validation, double eta,
                                                        Activation activation) {
    return importances_for_slots(genome, genome.absent_slots(), validation, eta, activation);
}

// --------------------------------------------------------------------------
// Structural mutations on matrix genomes
// --------------------------------------------------------------------------

void delete_neurons(MatrixGenome& genome, int count, Rng& rng) {
    if (count < 0) throw ParamError("delete_neurons: negative count");
    std::vector<int> hidden;
    for (int idx = genome.inputs; idx < genome.inputs + genome.max_hidden; ++idx)
        if (genome.node_exists(idx)) hidden.push_back(idx);
    if (count > static_cast<int>(hidden.size())) {
        log::debug("delete_neurons: count " + std::to_string(count) + " clamped to " +
                   std::to_string(hidden.size()));
        count = static_cast<int>(hidden.size());
    }
    for (int k = 0; k < count; ++k) {
        const auto pick = static_cast<std::size_t>(
            rng.uniform_int(static_cast<long long>(k), static_cast<long long>(hidden.size()) - 1));
        std::swap(hidden[static_cast<std::size_t>(k)], hidden[pick]);
        const int idx = hidden[static_cast<std::size_t>(k)];
        genome.hidden_exists[static_cast<std::size_t>(idx - genome.inputs)] = 0;
        for (int other = 0; other < genome.node_count(); ++other) {
            genome.clear_connection(idx, other);
            genome.clear_connection(other, idx);
        }
    }
}

void delete_connections(MatrixGenome& genome, int count, const DataSplit& validation, double eta,
                        Activation activation) {
    if (count < 0) throw ParamError("delete_connections: negative count");
    if (count == 0) return;
    auto importances = connection_importances(genome, validation, eta, activation);
    if (count > static_cast<int>(importances.size())) {
        log::debug("delete_connections: count clamped to " + std::to_string(importances.size()));
        count = static_cast<int>(importances.size());
    }
    std::stable_sort(importances.begin(), importances.end(),
                     [](const ConnectionImportance& a, const ConnectionImportance& b) {
                         return std::abs(a.test) < std::abs(b.test);
                     });
    for (int k = 0; k < count; ++k)
        genome.clear_connection(importances[static_cast<std::size_t>(k)].from,
                                importances[static_cast<std::size_t>(k)].to);
}

void add_connections(MatrixGenome& genome, int count, const DataSplit& validation, double eta,
                     std::pair<double, double> init_interval, Activation activation, Rng& rng) {
    if (count < 0) throw ParamError("add_connections: negative count");
    if (count == 0) return;
    if (genome.absent_slots().empty())
        throw ExhaustedSlotsError("add_connections: no absent legal slot");
    auto candidates = candidate_importances(genome, validation, eta, activation);
    if (count > static_cast<int>(candidates.size())) {
        log::debug("add_connections: count clamped to " + std::to_string(candidates.size()));
        count = static_cast<int>(candidates.size());
    }
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const ConnectionImportance& a, const ConnectionImportance& b) {
                         return std::abs(a.test) > std::abs(b.test);
                     });
    for (int k = 0; k < count; ++k) {
        const auto& slot = candidates[static_cast<std::size_t>(k)];
        genome.set_connection(slot.from, slot.to,
                              rng.uniform(init_interval.first, init_interval.second));
    }
}

void cell_division(MatrixGenome& genome, int hidden_node_index, double alpha) {
    if (!genome.is_hidden(hidden_node_index) || !genome.node_exists(hidden_node_index))
        throw InvalidTargetError("cell_division: node " + std::to_string(hidden_node_index) +
                                 " is not an existing hidden neuron");
    if (genome.hidden_count() >= genome.max_hidden)
        throw CapacityError("cell_division: hidden-neuron capacity reached");

    // Re-pack hidden slots with a twin inserted right after its parent. The
    // map keeps relative order, so upper-triangular support is preserved and
    // the twin sits between the parent's sources and targets.
    std::vector<int> alive;
    for (int idx = genome.inputs; idx < genome.inputs + genome.max_hidden; ++idx)
        if (genome.node_exists(idx)) alive.push_back(idx);

    MatrixGenome divided(genome.inputs, genome.max_hidden, genome.outputs);
    std::vector<int> remap(static_cast<std::size_t>(genome.node_count()), -1);
    for (int idx = 0; idx < genome.inputs; ++idx) remap[static_cast<std::size_t>(idx)] = idx;
    for (int idx = genome.inputs + genome.max_hidden; idx < genome.node_count(); ++idx)
        remap[static_cast<std::size_t>(idx)] = idx;

    int next = genome.inputs;
    int twin = -1;
    for (const int idx : alive) {
        remap[static_cast<std::size_t>(idx)] = next++;
        if (idx == hidden_node_index) twin = next++;
    }
    for (int slot = genome.inputs; slot < next; ++slot)
        divided.hidden_exists[static_cast<std::size_t>(slot - genome.inputs)] = 1;

    const int parent = remap[static_cast<std::size_t>(hidden_node_index)];
    for (const auto& [from, to] : genome.connections()) {
        const double w = genome.weight(from, to);
        const int new_from = remap[static_cast<std::size_t>(from)];
        const int new_to = remap[static_cast<std::size_t>(to)];
        if (to == hidden_node_index) {
            // both halves inherit the incoming weight unchanged
            divided.set_connection(new_from, new_to, w);
            divided.set_connection(new_from, twin, w);
        } else if (from == hidden_node_index) {
            divided.set_connection(parent, new_to, (1.0 + alpha) * w);
            divided.set_connection(twin, new_to, -alpha * w);
        } else {
            divided.set_connection(new_from, new_to, w);
        }
    }
    genome = std::move(divided);
}

// --------------------------------------------------------------------------
// Innovation registry and gene-list mutations
// --------------------------------------------------------------------------

int InnovationRegistry::assign(const std::string& kind, int in_id, int out_id) {
    if (dedupe_within_generation) {
        const auto key = std::make_tuple(kind, in_id, out_id);
        if (const auto it = current_generation_.find(key); it != current_generation_.end())
            return it->second;
        const int number = counter++;
        current_generation_.emplace(key, number);
        history.push_back({kind, in_id, out_id, number});
        return number;
    }
    const int number = counter++;
    history.push_back({kind, in_id, out_id, number});
    return number;
}

void InnovationRegistry::begin_generation() { current_generation_.clear(); }

namespace {

// true when adding in -> out keeps the enabled graph acyclic (no enabled path
// out -> ... -> in exists)
bool addition_keeps_acyclic(const GeneListGenome& genome, int in_id, int out_id) {
    std::map<int, std::vector<int>> adj;
    for (const auto& c : genome.connections)
        if (c.enabled) adj[c.in_id].push_back(c.out_id);
    std::set<int> seen{out_id};
    std::vector<int> stack{out_id};
    while (!stack.empty()) {
        const int cur = stack.back();
        stack.pop_back();
        if (cur == in_id) return false;
        for (const int next : adj[cur])
            if (seen.insert(next).second) stack.push_back(next);
    }
    return true;
}

}  // namespace

void neat_add_connection(GeneListGenome& genome, InnovationRegistry& registry, Rng& rng,
                         std::pair<double, double> weight_interval) {
    std::vector<std::pair<int, int>> legal;
    for (const auto& in : genome.neurons) {
        for (const auto& out : genome.neurons) {
            if (in.id == out.id) continue;
            if (out.role == NeuronRole::Input) continue;
            if (genome.has_connection(in.id, out.id)) continue;
            if (!addition_keeps_acyclic(genome, in.id, out.id)) continue;
            legal.emplace_back(in.id, out.id);
        }
    }
    if (legal.empty()) throw ExhaustedSlotsError("neat_add_connection: no legal pair left");
    const auto& pick = legal[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<long long>(legal.size()) - 1))];
    ConnectionGene gene;
    gene.in_id = pick.first;
    gene.out_id = pick.second;
    gene.weight = rng.uniform(weight_interval.first, weight_interval.second);
    gene.enabled = true;
    gene.innovation = registry.assign("add_connection", gene.in_id, gene.out_id);
    genome.connections.push_back(gene);
}

void neat_split_connection(GeneListGenome& genome, InnovationRegistry& registry,
                           int gene_innovation) {
    ConnectionGene* gene = genome.find_by_innovation(gene_innovation);
    if (gene == nullptr)
        throw InvalidTargetError("neat_split_connection: no gene with innovation " +
                                 std::to_string(gene_innovation));
    if (!gene->enabled)
        throw InvalidTargetError("neat_split_connection: gene already disabled");

    const int in_id = gene->in_id;
    const int out_id = gene->out_id;
    const double old_weight = gene->weight;
    gene->enabled = false;

    const int new_id = genome.max_neuron_id() + 1;
    genome.neurons.push_back({new_id, NeuronRole::Hidden});
    genome.connections.push_back(
        {in_id, new_id, 1.0, true, registry.assign("split_in", in_id, new_id)});
    genome.connections.push_back(
        {new_id, out_id, old_weight, true, registry.assign("split_out", new_id, out_id)});
}

// --------------------------------------------------------------------------
// Bit-string mutations and crossover
// --------------------------------------------------------------------------

void BitMutationRates::validate() const {
    for (const double p : {p_granularity, p_connectivity, p_weight})
        if (p < 0.0 || p > 1.0) throw ParamError("bit mutation rates must lie in [0, 1]");
}

namespace {

std::string resize_weight_bits(const std::string& bits, int width) {
    std::string out = bits;
    while (static_cast<int>(out.size()) > width) out.erase(out.begin());  // drop MSB
    while (static_cast<int>(out.size()) < width) out.insert(out.begin(), '0');
    return out;
}

}  // namespace

void mutate_bitstring(BitStringGenome& genome, const BitMutationRates& rates, Rng& rng) {
    rates.validate();
    genome.validate();

    for (char& bit : genome.header)
        if (rng.bernoulli(rates.p_granularity)) bit = (bit == '0') ? '1' : '0';
    int header_value = 0;
    for (const char bit : genome.header) header_value = (header_value << 1) | (bit == '1' ? 1 : 0);
    const int g = std::clamp(1 + header_value, 2, genome.layout.g_max);
    // rewrite so header and granularity stay consistent
    for (int i = static_cast<int>(genome.header.size()) - 1, v = g - 1; i >= 0; --i, v >>= 1)
        genome.header[static_cast<std::size_t>(i)] = (v & 1) ? '1' : '0';

    for (auto& sub : genome.substrings) {
        const bool was_present = sub[0] == '1';
        const bool flip_connectivity = rng.bernoulli(rates.p_connectivity);
        const bool present = was_present != flip_connectivity;
        if (!present) {
            sub = "0";
            continue;
        }
        std::string weight_bits = was_present ? sub.substr(1) : std::string{};
        weight_bits = resize_weight_bits(weight_bits, g - 1);
        for (char& bit : weight_bits)
            if (rng.bernoulli(rates.p_weight)) bit = (bit == '0') ? '1' : '0';
        sub = "1" + weight_bits;
    }
}

std::pair<std::string, std::string> npoint_crossover(std::string_view a, std::string_view b,
                                                     int n, Rng& rng) {
    if (a.size() != b.size())
        throw IncompatibleParentsError("npoint_crossover: parents of different fixed lengths");
    const auto len = static_cast<int>(a.size());
    if (n < 1 || n >= len) throw ParamError("npoint_crossover: need 1 <= n < length");

    // n distinct cut positions in 1..len-1
    std::vector<int> cuts(static_cast<std::size_t>(len - 1));
    for (int i = 0; i < len - 1; ++i) cuts[static_cast<std::size_t>(i)] = i + 1;
    for (int i = 0; i < n; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(i, static_cast<long long>(cuts.size()) - 1));
        std::swap(cuts[static_cast<std::size_t>(i)], cuts[j]);
    }
    cuts.resize(static_cast<std::size_t>(n));
    std::sort(cuts.begin(), cuts.end());

    std::string child1(a);
    std::string child2(b);
    bool swapped = false;
    std::size_t cut_idx = 0;
    for (int pos = 0; pos < len; ++pos) {
        if (cut_idx < cuts.size() && pos == cuts[cut_idx]) {
            swapped = !swapped;
            ++cut_idx;
        }
        if (swapped) {
            child1[static_cast<std::size_t>(pos)] = b[static_cast<std::size_t>(pos)];
            child2[static_cast<std::size_t>(pos)] = a[static_cast<std::size_t>(pos)];
        }
    }
    return {std::move(child1), std::move(child2)};
}

// --------------------------------------------------------------------------
// Innovation-based alignment
// --------------------------------------------------------------------------

std::vector<AlignedGene> align_by_innovation(const GeneListGenome& a, const GeneListGenome& b) {
    std::map<int, AlignedGene> table;
    for (const auto& gene : a.connections) {
        table[gene.innovation].innovation = gene.innovation;
        table[gene.innovation].from_a = gene;
    }
    for (const auto& gene : b.connections) {
        table[gene.innovation].innovation = gene.innovation;
        table[gene.innovation].from_b = gene;
    }
    std::vector<AlignedGene> rows;
    rows.reserve(table.size());
    for (auto& [innovation, row] : table) rows.push_back(std::move(row));
    return rows;
}

GeneListGenome recombine(const GeneListGenome& a, const GeneListGenome& b, bool a_fitter,
                         Rng& rng) {
    const GeneListGenome& fitter = a_fitter ? a : b;
    const auto table = align_by_innovation(a, b);

    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        GeneListGenome child;
        child.neurons = fitter.neurons;
        for (const auto& row : table) {
            if (row.matching()) {
                child.connections.push_back(rng.bernoulli(0.5) ? *row.from_a : *row.from_b);
            } else {
                const auto& only = row.from_a.has_value() ? row.from_a : row.from_b;
                const bool from_fitter = a_fitter == row.from_a.has_value();
                if (from_fitter) child.connections.push_back(*only);
            }
        }
        if (child.enabled_acyclic()) return child;
    }
    return fitter;
}

}  // namespace evonet
