#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "evonet/errors.hpp"
#include "evonet/rng.hpp"

namespace evonet {

// ---------------------------------------------------------------------------
// Bit-string representation
// ---------------------------------------------------------------------------

// Maps the (g-1)-bit weight field of a substring to an integer weight using
// offset-binary: bit value b decodes to w_lo + b, so a 3-bit field with
// w_lo = -2 covers -2..5.
struct WeightCodebook {
    int w_lo = -2;
    int bits = 3;

    int value_count() const { return 1 << bits; }
    int max_value() const { return w_lo + value_count() - 1; }
    bool contains(double w) const;
    int decode(const std::string& weight_bits) const;
    std::string encode(int w) const;
};

struct SlotRef {
    int source = 0;
    int target = 0;

    friend bool operator==(const SlotRef&, const SlotRef&) = default;
};

// Fixed wiring plan for a bit-string genome: node counts, the ordered list of
// connection slots (slots feeding the same target neuron are contiguous), and
// the granularity ceiling. The header width is the smallest that can name
// every permitted granularity.
struct BitLayout {
    int inputs = 0;
    int max_hidden = 0;
    int outputs = 0;
    int g_max = 4;
    std::vector<SlotRef> slots;

    int node_count() const { return inputs + max_hidden + outputs; }
    int header_bits() const;
    void validate() const;

    // Every legal feedforward slot (source < target, target not an input),
    // ordered target-major so same-target substrings sit side by side.
    static BitLayout full_feedforward(int inputs, int max_hidden, int outputs, int g_max);
};

// H + slot_count * g_max: the padded storage length shared by all individuals
// of one layout, so fixed-length crossover always applies.
int fixed_length_of(std::size_t slot_count, int g_max, int header_bits);
int fixed_length_of(const BitLayout& layout);

// Chromosome of '0'/'1' substrings. The header encodes g-1 in binary; each
// slot substring is either "0" (connection absent, weight bits disappear) or
// '1' followed by g-1 weight bits.
struct BitStringGenome {
    BitLayout layout;
    int w_lo = -2;
    std::string header;
    std::vector<std::string> substrings;

    int granularity() const;
    WeightCodebook codebook() const { return {w_lo, granularity() - 1}; }

    // header length plus 1 bit per absent slot and g bits per present slot
    std::size_t logical_length() const;
    std::string padded_bits() const;
    static BitStringGenome from_padded_bits(const BitLayout& layout, int w_lo,
                                            std::string_view bits);

    void validate() const;
};

BitStringGenome random_bitstring_genome(const BitLayout& layout, int w_lo, double p_connect,
                                        Rng& rng);

// ---------------------------------------------------------------------------
// Matrix representation
// ---------------------------------------------------------------------------

// Connectivity and weight matrices over inputs+max_hidden+outputs nodes plus
// an existence vector for the hidden block. Feedforward scope: support is
// strictly upper triangular, and a connection never targets an input node.
struct MatrixGenome {
    int inputs = 0;
    int max_hidden = 0;
    int outputs = 0;
    std::vector<std::uint8_t> connectivity;  // row-major (node_count^2)
    std::vector<double> weights;             // row-major, zero wherever connectivity is zero
    std::vector<std::uint8_t> hidden_exists;

    MatrixGenome() = default;
    MatrixGenome(int m, int max_h, int n);

    int node_count() const { return inputs + max_hidden + outputs; }
    int hidden_count() const;

    bool is_input(int idx) const { return idx < inputs; }
    bool is_hidden(int idx) const { return idx >= inputs && idx < inputs + max_hidden; }
    bool is_output(int idx) const { return idx >= inputs + max_hidden; }
    bool node_exists(int idx) const;

    bool connected(int from, int to) const;
    double weight(int from, int to) const;
    void set_connection(int from, int to, double w);
    void clear_connection(int from, int to);

    std::size_t connection_count() const;
    // present connections in ascending (from, to) order
    std::vector<std::pair<int, int>> connections() const;
    // absent legal slots between existing nodes, ascending (from, to) order
    std::vector<std::pair<int, int>> absent_slots() const;
    // is (from, to) a slot a feedforward connection may occupy
    bool legal_slot(int from, int to) const;

    void validate() const;
};

struct MatrixInitRanges {
    int hidden_min = 0;
    int hidden_max = 0;
    int connections_min = 0;
    int connections_max = 0;
    double weight_lo = -0.5;
    double weight_hi = 0.5;
};

// Hidden count and connection count drawn uniformly from the ranges,
// connections placed uniformly among legal slots, weights uniform in the
// small initial interval.
MatrixGenome random_matrix_genome(int inputs, int max_hidden, int outputs,
                                  const MatrixInitRanges& ranges, Rng& rng);

// ---------------------------------------------------------------------------
// Gene-list representation
// ---------------------------------------------------------------------------

enum class NeuronRole { Input, Hidden, Output };

NeuronRole role_from_name(std::string_view name);
std::string_view role_name(NeuronRole role);

struct NeuronGene {
    int id = 0;
    NeuronRole role = NeuronRole::Hidden;
};

struct ConnectionGene {
    int in_id = 0;
    int out_id = 0;
    double weight = 0.0;
    bool enabled = true;
    int innovation = 0;
};

struct GeneListGenome {
    std::vector<NeuronGene> neurons;
    std::vector<ConnectionGene> connections;

    bool has_neuron(int id) const;
    const NeuronGene* neuron(int id) const;
    int max_neuron_id() const;
    int max_innovation() const;
    bool has_connection(int in_id, int out_id) const;
    ConnectionGene* find_by_innovation(int innovation);
    const ConnectionGene* find_by_innovation(int innovation) const;

    std::size_t enabled_count() const;
    std::size_t hidden_count() const;

    // true when the graph over enabled genes has no cycle
    bool enabled_acyclic() const;

    void validate() const;
};

// The simplest network: input and output neuron genes only, fully connected
// input->output with uniform random weights in [-1, 1]. Innovation numbers
// run 1..(m*n) in (in_id, out_id) order.
GeneListGenome minimal_genelist(int inputs, int outputs, Rng& rng);

// ---------------------------------------------------------------------------
// Conversions and the genome sum type
// ---------------------------------------------------------------------------

// Connectivity bit per slot copied into the matrix; weight bits go through
// the codebook; absent slots leave both matrices at zero.
MatrixGenome decode_bitstring(const BitStringGenome& genome);

// Inverse of decode on the layout slots. Every present weight must be an
// integer the codebook can represent.
BitStringGenome encode_bitstring(const MatrixGenome& matrix, int granularity,
                                 const BitLayout& layout, int w_lo);

using Genome = std::variant<BitStringGenome, MatrixGenome, GeneListGenome>;

void validate_genome(const Genome& genome);

}  // namespace evonet
