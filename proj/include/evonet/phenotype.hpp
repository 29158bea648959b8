#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evonet/data.hpp"
#include "evonet/dlopt.hpp"
#include "evonet/fitness.hpp"
#include "evonet/genome.hpp"
#include "evonet/rng.hpp"

namespace evonet {

enum class Activation { Sigmoid, Tanh, Identity, Relu };

Activation activation_from_name(std::string_view name);
std::string_view activation_name(Activation a);
double activate(Activation a, double x);
// derivative of the activation given its pre-activation and activation value
double activate_derivative(Activation a, double pre, double act);

struct NetworkNode {
    int id = 0;
    NeuronRole role = NeuronRole::Hidden;
};

struct NetworkConnection {
    int from = 0;          // position in node_order
    int to = 0;            // position in node_order
    int weight_index = 0;  // index into weights
};

// Decoded feedforward phenotype. node_order is a topological order of the
// connection graph; input nodes pass the pattern through unchanged, hidden
// and output nodes apply the activation to their weighted input sum.
struct Network {
    std::vector<NetworkNode> node_order;
    std::vector<NetworkConnection> connections;
    std::vector<double> weights;
    Activation activation = Activation::Sigmoid;
    std::vector<int> input_positions;   // pattern order
    std::vector<int> output_positions;  // output order
    std::vector<std::vector<int>> incoming;  // connection indices per node position

    int input_count() const { return static_cast<int>(input_positions.size()); }
    int output_count() const { return static_cast<int>(output_positions.size()); }

    // fills incoming and the input/output position lists from node_order
    void finalize();

    std::vector<double> forward(std::span<const double> input) const;
};

struct ForwardTrace {
    std::vector<double> pre;
    std::vector<double> act;
};

// Decode a genome into an evaluable network. Disabled and absent connections
// are excluded; hidden neurons with no path from any input and no path to
// any output are pruned from the evaluation order (the genome keeps them).
Network build_network(const BitStringGenome& genome, Activation act = Activation::Sigmoid);
Network build_network(const MatrixGenome& genome, Activation act = Activation::Sigmoid);
Network build_network(const GeneListGenome& genome, Activation act = Activation::Sigmoid);
Network build_network(const Genome& genome, Activation act = Activation::Sigmoid);

ForwardTrace forward_trace(const Network& net, std::span<const double> input);

// Gradient of the summed error over the batch with respect to every weight.
// Loss must be sqe, abs or exp; abs uses the zero subgradient at ties.
std::vector<double> backprop_gradients(const Network& net, const DataSplit& batch, Measure loss);

// Per-pattern node activations and deltas (dE/d pre-activation), as used by
// the connection-importance statistic. Row k holds pattern k of the split.
struct NodeBackpropData {
    Mat act;    // patterns x nodes
    Mat delta;  // patterns x nodes, zero at input nodes
};
NodeBackpropData backprop_node_data(const Network& net, const DataSplit& batch, Measure loss);

// Configured error of the network over a pattern split.
double dataset_error(const Network& net, const DataSplit& split, const FitnessSpec& spec);
double dataset_error(const Network& net, const DataSplit& split, Measure measure);

struct BpOptions {
    dlopt::MomentumState momentum;
    std::optional<dlopt::LrSchedule> schedule;
    bool nesterov = false;
    double dropout_p = 0.0;
    std::uint64_t dropout_seed = 0;
};

struct TrainResult {
    double error_before = 0.0;
    double error_after = 0.0;
};

// Full-batch backpropagation for a fixed number of epochs. Gradients come
// from the training split; both reported errors are measured on the
// validation split with the configured measure (prechelt trains on its sqe
// gradient). Weights are updated in place.
TrainResult partial_train_bp(Network& net, const DataSplit& train, const DataSplit& val,
                             int epochs, BpOptions& options, const FitnessSpec& spec);

// Simulated-annealing weight trainer used by the hybrid pipeline.
struct SaSchedule {
    double t0 = 1.0;
    double cooling = 0.9;
    int steps_per_temperature = 10;
    double t_min = 1e-2;
    double proposal_sigma = 0.3;

    void validate() const;
};

struct SaStats {
    long proposed = 0;
    long accepted = 0;
    long improved = 0;
};

struct SaResult {
    double error_after = 0.0;
    SaStats stats;
};

// The Metropolis rule: accept when the error did not grow, otherwise with
// probability e^(-delta/T).
bool sa_accept(double delta_error, double temperature, Rng& rng);

// Perturbs one uniformly chosen weight per step with a normal proposal and
// returns the best weights seen, so the result never scores worse than the
// input network.
SaResult train_sa(Network& net, const DataSplit& val, const SaSchedule& schedule,
                  const FitnessSpec& spec, Rng& rng);

// Writes the network's (possibly trained) weights back into the genome the
// network was decoded from. Connections pruned from the network keep their
// genome weights.
void write_back_weights(const Network& net, MatrixGenome& genome);
void write_back_weights(const Network& net, GeneListGenome& genome);
void write_back_weights(const Network& net, Genome& genome);

}  // namespace evonet
