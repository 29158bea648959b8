#include "evonet/genome.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "evonet/log.hpp"

namespace evonet {

namespace {

bool is_bits(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c == '0' || c == '1'; });
}

int bits_to_int(std::string_view s) {
    int v = 0;
    for (const char c : s) v = (v << 1) | (c == '1' ? 1 : 0);
    return v;
}

std::string int_to_bits(int value, int width) {
    std::string out(static_cast<std::size_t>(width), '0');
    for (int i = width - 1; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = (value & 1) ? '1' : '0';
        value >>= 1;
    }
    return out;
}

}  // namespace

// --------------------------------------------------------------------------
// WeightCodebook
// --------------------------------------------------------------------------

bool WeightCodebook::contains(double w) const {
    if (w != std::floor(w)) return false;
    return w >= w_lo && w <= max_value();
}

int WeightCodebook::decode(const std::string& weight_bits) const {
    return w_lo + bits_to_int(weight_bits);
}

std::string WeightCodebook::encode(int w) const {
    if (!contains(w))
        throw RepresentationError("weight " + std::to_string(w) + " outside codebook [" +
                                  std::to_string(w_lo) + ", " + std::to_string(max_value()) + "]");
    return int_to_bits(w - w_lo, bits);
}

// --------------------------------------------------------------------------
// BitLayout
// --------------------------------------------------------------------------

int BitLayout::header_bits() const {
    int h = 1;
    while ((1 << h) < g_max) ++h;
    return h;
}

void BitLayout::validate() const {
    if (inputs < 1 || outputs < 1) throw ParamError("layout needs at least one input and output");
    if (max_hidden < 0) throw ParamError("layout: negative hidden capacity");
    if (g_max < 2) throw ParamError("layout: g_max must be at least 2");
    for (const auto& s : slots) {
        if (s.source < 0 || s.target >= node_count() || s.source >= s.target)
            throw ParamError("layout slot outside strict upper-triangular bounds");
        if (s.target < inputs) throw ParamError("layout slot targets an input node");
    }
}

BitLayout BitLayout::full_feedforward(int inputs, int max_hidden, int outputs, int g_max) {
    BitLayout layout{inputs, max_hidden, outputs, g_max, {}};
    for (int target = inputs; target < layout.node_count(); ++target)
        for (int source = 0; source < target; ++source)
            layout.slots.push_back({source, target});
    layout.validate();
    return layout;
}

int fixed_length_of(std::size_t slot_count, int g_max, int header_bits) {
    if (g_max < 2) throw ParamError("fixed_length_of: g_max must be at least 2");
    return header_bits + static_cast<int>(slot_count) * g_max;
}

int fixed_length_of(const BitLayout& layout) {
    return fixed_length_of(layout.slots.size(), layout.g_max, layout.header_bits());
}

// --------------------------------------------------------------------------
// BitStringGenome
// --------------------------------------------------------------------------

int BitStringGenome::granularity() const { return 1 + bits_to_int(header); }

std::size_t BitStringGenome::logical_length() const {
    std::size_t len = header.size();
    for (const auto& s : substrings) len += s.size();
    return len;
}

std::string BitStringGenome::padded_bits() const {
    std::string out = header;
    for (const auto& s : substrings) out += s;
    out.resize(static_cast<std::size_t>(fixed_length_of(layout)), '0');
    return out;
}

BitStringGenome BitStringGenome::from_padded_bits(const BitLayout& layout, int w_lo,
                                                  std::string_view bits) {
    layout.validate();
    if (!is_bits(bits)) throw DecodeError("bit string contains characters other than 0/1");
    if (static_cast<int>(bits.size()) != fixed_length_of(layout))
        throw DecodeError("bit string length " + std::to_string(bits.size()) +
                          " does not match fixed length " +
                          std::to_string(fixed_length_of(layout)));

    BitStringGenome genome;
    genome.layout = layout;
    genome.w_lo = w_lo;

    const int h = layout.header_bits();
    std::size_t pos = 0;
    const int g_raw = 1 + bits_to_int(bits.substr(pos, static_cast<std::size_t>(h)));
    pos += static_cast<std::size_t>(h);
    const int g = std::clamp(g_raw, 2, layout.g_max);
    genome.header = int_to_bits(g - 1, h);

    genome.substrings.reserve(layout.slots.size());
    for (std::size_t slot = 0; slot < layout.slots.size(); ++slot) {
        if (pos >= bits.size()) throw DecodeError("bit string too short for its slots");
        if (bits[pos] == '0') {
            genome.substrings.emplace_back("0");
            ++pos;
        } else {
            const std::size_t need = static_cast<std::size_t>(g);
            if (pos + need > bits.size())
                throw DecodeError("bit string truncates a present substring");
            genome.substrings.emplace_back(bits.substr(pos, need));
            pos += need;
        }
    }
    return genome;
}

void BitStringGenome::validate() const {
    layout.validate();
    if (!is_bits(header)) throw DecodeError("header contains characters other than 0/1");
    if (static_cast<int>(header.size()) != layout.header_bits())
        throw DecodeError("header width " + std::to_string(header.size()) + " differs from " +
                          std::to_string(layout.header_bits()));
    const int g = granularity();
    if (g <= 1 || g > layout.g_max)
        throw DecodeError("granularity " + std::to_string(g) + " outside (1, " +
                          std::to_string(layout.g_max) + "]");
    if (substrings.size() != layout.slots.size())
        throw DecodeError("substring count differs from layout slot count");
    for (const auto& s : substrings) {
        if (!is_bits(s)) throw DecodeError("substring contains characters other than 0/1");
        if (s.empty()) throw DecodeError("empty substring");
        if (s[0] == '0') {
            if (s.size() != 1) throw DecodeError("absent substring must be exactly \"0\"");
        } else if (static_cast<int>(s.size()) != g) {
            throw DecodeError("present substring has " + std::to_string(s.size()) +
                              " bits, expected " + std::to_string(g));
        }
    }
}

BitStringGenome random_bitstring_genome(const BitLayout& layout, int w_lo, double p_connect,
                                        Rng& rng) {
    layout.validate();
    BitStringGenome genome;
    genome.layout = layout;
    genome.w_lo = w_lo;
    const int g = static_cast<int>(rng.uniform_int(2, layout.g_max));
    genome.header = int_to_bits(g - 1, layout.header_bits());
    genome.substrings.reserve(layout.slots.size());
    for (std::size_t i = 0; i < layout.slots.size(); ++i) {
        if (rng.bernoulli(p_connect)) {
            std::string s = "1";
            for (int b = 1; b < g; ++b) s += rng.bernoulli(0.5) ? '1' : '0';
            genome.substrings.push_back(std::move(s));
        } else {
            genome.substrings.emplace_back("0");
        }
    }
    return genome;
}

// --------------------------------------------------------------------------
// MatrixGenome
// --------------------------------------------------------------------------

MatrixGenome::MatrixGenome(int m, int max_h, int n)
    : inputs(m),
      max_hidden(max_h),
      outputs(n),
      connectivity(static_cast<std::size_t>(node_count()) * node_count(), 0),
      weights(static_cast<std::size_t>(node_count()) * node_count(), 0.0),
      hidden_exists(static_cast<std::size_t>(max_h), 0) {}

int MatrixGenome::hidden_count() const {
    return static_cast<int>(std::count(hidden_exists.begin(), hidden_exists.end(), 1));
}

bool MatrixGenome::node_exists(int idx) const {
    if (is_hidden(idx)) return hidden_exists[static_cast<std::size_t>(idx - inputs)] != 0;
    return idx >= 0 && idx < node_count();
}

bool MatrixGenome::connected(int from, int to) const {
    return connectivity[static_cast<std::size_t>(from) * node_count() + to] != 0;
}

double MatrixGenome::weight(int from, int to) const {
    return weights[static_cast<std::size_t>(from) * node_count() + to];
}

void MatrixGenome::set_connection(int from, int to, double w) {
    connectivity[static_cast<std::size_t>(from) * node_count() + to] = 1;
    weights[static_cast<std::size_t>(from) * node_count() + to] = w;
}

void MatrixGenome::clear_connection(int from, int to) {
    connectivity[static_cast<std::size_t>(from) * node_count() + to] = 0;
    weights[static_cast<std::size_t>(from) * node_count() + to] = 0.0;
}

std::size_t MatrixGenome::connection_count() const {
    return static_cast<std::size_t>(std::count(connectivity.begin(), connectivity.end(), 1));
}

std::vector<std::pair<int, int>> MatrixGenome::connections() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < node_count(); ++i)
        for (int j = 0; j < node_count(); ++j)
            if (connected(i, j)) out.emplace_back(i, j);
    return out;
}

bool MatrixGenome::legal_slot(int from, int to) const {
    if (from < 0 || to >= node_count() || from >= to) return false;
    if (is_input(to)) return false;
    return node_exists(from) && node_exists(to);
}

std::vector<std::pair<int, int>> MatrixGenome::absent_slots() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < node_count(); ++i)
        for (int j = i + 1; j < node_count(); ++j)
            if (legal_slot(i, j) && !connected(i, j)) out.emplace_back(i, j);
    return out;
}

void MatrixGenome::validate() const {
    if (inputs < 1 || outputs < 1)
        throw ParamError("matrix genome needs at least one input and output");
    const auto n = static_cast<std::size_t>(node_count());
    if (connectivity.size() != n * n || weights.size() != n * n)
        throw DimensionError("matrix genome: matrix shape mismatch");
    if (hidden_exists.size() != static_cast<std::size_t>(max_hidden))
        throw DimensionError("matrix genome: existence vector length mismatch");
    for (int i = 0; i < node_count(); ++i) {
        for (int j = 0; j < node_count(); ++j) {
            if (connected(i, j)) {
                if (i >= j) throw CyclicGenomeError("matrix genome: non-upper-triangular entry");
                if (is_input(j)) throw ParamError("matrix genome: connection targets an input");
                if (!node_exists(i) || !node_exists(j))
                    throw ParamError("matrix genome: connection touches a non-existing neuron");
            } else if (weight(i, j) != 0.0) {
                throw ParamError("matrix genome: weight without connectivity at (" +
                                 std::to_string(i) + ", " + std::to_string(j) + ")");
            }
        }
    }
}

namespace {

std::size_t legal_slot_count_for(int inputs, int max_hidden, int outputs, int hidden) {
    MatrixGenome probe(inputs, max_hidden, outputs);
    for (int k = 0; k < hidden; ++k) probe.hidden_exists[static_cast<std::size_t>(k)] = 1;
    return probe.absent_slots().size();
}

}  // namespace

MatrixGenome random_matrix_genome(int inputs, int max_hidden, int outputs,
                                  const MatrixInitRanges& ranges, Rng& rng) {
    if (inputs < 1 || outputs < 1)
        throw ParamError("random_matrix_genome: needs at least one input and output");
    if (ranges.hidden_min < 0 || ranges.hidden_max > max_hidden ||
        ranges.hidden_min > ranges.hidden_max)
        throw InfeasibleRangeError("random_matrix_genome: hidden range outside [0, max_hidden]");
    if (ranges.connections_min < 0 || ranges.connections_min > ranges.connections_max)
        throw InfeasibleRangeError("random_matrix_genome: bad connection range");
    if (ranges.weight_lo > ranges.weight_hi)
        throw InfeasibleRangeError("random_matrix_genome: bad weight range");

    const std::size_t capacity =
        legal_slot_count_for(inputs, max_hidden, outputs, ranges.hidden_max);
    if (static_cast<std::size_t>(ranges.connections_min) > capacity)
        throw InfeasibleRangeError("random_matrix_genome: connections_min " +
                                   std::to_string(ranges.connections_min) +
                                   " exceeds the " + std::to_string(capacity) +
                                   " legal slots available at hidden_max");

    MatrixGenome genome(inputs, max_hidden, outputs);
    const int hidden = static_cast<int>(rng.uniform_int(ranges.hidden_min, ranges.hidden_max));
    for (int k = 0; k < hidden; ++k) genome.hidden_exists[static_cast<std::size_t>(k)] = 1;

    auto slots = genome.absent_slots();
    const auto want =
        static_cast<std::size_t>(rng.uniform_int(ranges.connections_min, ranges.connections_max));
    const std::size_t take = std::min(want, slots.size());
    // partial Fisher-Yates: the first `take` entries end up a uniform subset
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<long long>(i), static_cast<long long>(slots.size()) - 1));
        std::swap(slots[i], slots[j]);
        genome.set_connection(slots[i].first, slots[i].second,
                              rng.uniform(ranges.weight_lo, ranges.weight_hi));
    }
    return genome;
}

// --------------------------------------------------------------------------
// GeneListGenome
// --------------------------------------------------------------------------

NeuronRole role_from_name(std::string_view name) {
    if (name == "input") return NeuronRole::Input;
    if (name == "hidden") return NeuronRole::Hidden;
    if (name == "output") return NeuronRole::Output;
    throw ParamError("unknown neuron role: " + std::string(name));
}

std::string_view role_name(NeuronRole role) {
    switch (role) {
        case NeuronRole::Input: return "input";
        case NeuronRole::Hidden: return "hidden";
        case NeuronRole::Output: return "output";
    }
    return "hidden";
}

bool GeneListGenome::has_neuron(int id) const { return neuron(id) != nullptr; }

const NeuronGene* GeneListGenome::neuron(int id) const {
    for (const auto& n : neurons)
        if (n.id == id) return &n;
    return nullptr;
}

int GeneListGenome::max_neuron_id() const {
    int best = 0;
    for (const auto& n : neurons) best = std::max(best, n.id);
    return best;
}

int GeneListGenome::max_innovation() const {
    int best = 0;
    for (const auto& c : connections) best = std::max(best, c.innovation);
    return best;
}

bool GeneListGenome::has_connection(int in_id, int out_id) const {
    for (const auto& c : connections)
        if (c.in_id == in_id && c.out_id == out_id) return true;
    return false;
}

ConnectionGene* GeneListGenome::find_by_innovation(int innovation) {
    for (auto& c : connections)
        if (c.innovation == innovation) return &c;
    return nullptr;
}

const ConnectionGene* GeneListGenome::find_by_innovation(int innovation) const {
    for (const auto& c : connections)
        if (c.innovation == innovation) return &c;
    return nullptr;
}

std::size_t GeneListGenome::enabled_count() const {
    return static_cast<std::size_t>(
        std::count_if(connections.begin(), connections.end(),
                      [](const ConnectionGene& c) { return c.enabled; }));
}

std::size_t GeneListGenome::hidden_count() const {
    return static_cast<std::size_t>(
        std::count_if(neurons.begin(), neurons.end(),
                      [](const NeuronGene& n) { return n.role == NeuronRole::Hidden; }));
}

bool GeneListGenome::enabled_acyclic() const {
    // Kahn over enabled genes
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> adj;
    for (const auto& n : neurons) indegree[n.id] = 0;
    for (const auto& c : connections) {
        if (!c.enabled) continue;
        adj[c.in_id].push_back(c.out_id);
        ++indegree[c.out_id];
    }
    std::set<int> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.insert(id);
    std::size_t seen = 0;
    while (!ready.empty()) {
        const int id = *ready.begin();
        ready.erase(ready.begin());
        ++seen;
        for (const int next : adj[id])
            if (--indegree[next] == 0) ready.insert(next);
    }
    return seen == neurons.size();
}

void GeneListGenome::validate() const {
    std::set<int> ids;
    for (const auto& n : neurons)
        if (!ids.insert(n.id).second)
            throw ParamError("gene list: duplicate neuron id " + std::to_string(n.id));
    std::set<int> innovations;
    for (const auto& c : connections) {
        if (!innovations.insert(c.innovation).second)
            throw ParamError("gene list: duplicate innovation " + std::to_string(c.innovation));
        if (!ids.count(c.in_id) || !ids.count(c.out_id))
            throw ParamError("gene list: connection references a missing neuron");
    }
    if (!enabled_acyclic()) throw CyclicGenomeError("gene list: enabled genes form a cycle");
}

GeneListGenome minimal_genelist(int inputs, int outputs, Rng& rng) {
    if (inputs < 1 || outputs < 1)
        throw ParamError("minimal_genelist: needs at least one input and output");
    GeneListGenome genome;
    for (int i = 1; i <= inputs; ++i) genome.neurons.push_back({i, NeuronRole::Input});
    for (int o = 1; o <= outputs; ++o) genome.neurons.push_back({inputs + o, NeuronRole::Output});
    int innovation = 1;
    for (int i = 1; i <= inputs; ++i)
        for (int o = 1; o <= outputs; ++o)
            genome.connections.push_back(
                {i, inputs + o, rng.uniform(-1.0, 1.0), true, innovation++});
    return genome;
}

// --------------------------------------------------------------------------
// Conversions
// --------------------------------------------------------------------------

MatrixGenome decode_bitstring(const BitStringGenome& genome) {
    genome.validate();
    const auto& layout = genome.layout;
    MatrixGenome matrix(layout.inputs, layout.max_hidden, layout.outputs);
    // neuron count is constant under this encoding, so every hidden slot exists
    std::fill(matrix.hidden_exists.begin(), matrix.hidden_exists.end(), 1);
    const WeightCodebook codebook = genome.codebook();
    for (std::size_t i = 0; i < layout.slots.size(); ++i) {
        const auto& sub = genome.substrings[i];
        if (sub[0] == '0') continue;
        const int w = codebook.decode(sub.substr(1));
        matrix.set_connection(layout.slots[i].source, layout.slots[i].target,
                              static_cast<double>(w));
    }
    return matrix;
}

BitStringGenome encode_bitstring(const MatrixGenome& matrix, int granularity,
                                 const BitLayout& layout, int w_lo) {
    layout.validate();
    if (granularity <= 1 || granularity > layout.g_max)
        throw ParamError("encode_bitstring: granularity outside (1, g_max]");
    if (matrix.node_count() != layout.node_count())
        throw DimensionError("encode_bitstring: layout and matrix node counts differ");

    BitStringGenome genome;
    genome.layout = layout;
    genome.w_lo = w_lo;
    genome.header = int_to_bits(granularity - 1, layout.header_bits());
    const WeightCodebook codebook{w_lo, granularity - 1};
    genome.substrings.reserve(layout.slots.size());
    for (const auto& slot : layout.slots) {
        if (!matrix.connected(slot.source, slot.target)) {
            genome.substrings.emplace_back("0");
            continue;
        }
        const double w = matrix.weight(slot.source, slot.target);
        if (!codebook.contains(w))
            throw RepresentationError("encode_bitstring: weight " + std::to_string(w) +
                                      " not representable with granularity " +
                                      std::to_string(granularity));
        genome.substrings.push_back("1" + codebook.encode(static_cast<int>(w)));
    }
    return genome;
}

void validate_genome(const Genome& genome) {
    std::visit([](const auto& g) { g.validate(); }, genome);
}

}  // namespace evonet
