#include "evonet/phenotype.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace evonet {

// --------------------------------------------------------------------------
// Activations
// --------------------------------------------------------------------------

Activation activation_from_name(std::string_view name) {
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    if (name == "relu") return Activation::Relu;
    throw ParamError("unknown activation: " + std::string(name));
}

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
        case Activation::Relu: return "relu";
    }
    return "sigmoid";
}

double activate(Activation a, double x) {
    switch (a) {
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::Tanh: return std::tanh(x);
        case Activation::Identity: return x;
        case Activation::Relu: return x > 0.0 ? x : 0.0;
    }
    return x;
}

double activate_derivative(Activation a, double pre, double act) {
    switch (a) {
        case Activation::Sigmoid: return act * (1.0 - act);
        case Activation::Tanh: return 1.0 - act * act;
        case Activation::Identity: return 1.0;
        case Activation::Relu: return pre > 0.0 ? 1.0 : 0.0;
    }
    return 1.0;
}

// --------------------------------------------------------------------------
// Network
// --------------------------------------------------------------------------

void Network::finalize() {
    incoming.assign(node_order.size(), {});
    for (std::size_t ci = 0; ci < connections.size(); ++ci)
        incoming[static_cast<std::size_t>(connections[ci].to)].push_back(static_cast<int>(ci));
    input_positions.clear();
    output_positions.clear();
    for (std::size_t pos = 0; pos < node_order.size(); ++pos) {
        if (node_order[pos].role == NeuronRole::Input)
            input_positions.push_back(static_cast<int>(pos));
        else if (node_order[pos].role == NeuronRole::Output)
            output_positions.push_back(static_cast<int>(pos));
    }
}

std::vector<double> Network::forward(std::span<const double> input) const {
    const ForwardTrace trace = forward_trace(*this, input);
    std::vector<double> out(output_positions.size());
    for (std::size_t k = 0; k < output_positions.size(); ++k)
        out[k] = trace.act[static_cast<std::size_t>(output_positions[k])];
    return out;
}

ForwardTrace forward_trace(const Network& net, std::span<const double> input) {
    if (input.size() != net.input_positions.size())
        throw DimensionError("forward: input length " + std::to_string(input.size()) +
                             " differs from input node count " +
                             std::to_string(net.input_positions.size()));
    ForwardTrace trace;
    trace.pre.assign(net.node_order.size(), 0.0);
    trace.act.assign(net.node_order.size(), 0.0);
    std::vector<int> input_ordinal(net.node_order.size(), -1);
    for (std::size_t k = 0; k < net.input_positions.size(); ++k)
        input_ordinal[static_cast<std::size_t>(net.input_positions[k])] = static_cast<int>(k);

    for (std::size_t pos = 0; pos < net.node_order.size(); ++pos) {
        if (net.node_order[pos].role == NeuronRole::Input) {
            trace.act[pos] = input[static_cast<std::size_t>(input_ordinal[pos])];
            continue;
        }
        double sum = 0.0;
        for (const int ci : net.incoming[pos]) {
            const auto& conn = net.connections[static_cast<std::size_t>(ci)];
            sum += net.weights[static_cast<std::size_t>(conn.weight_index)] *
                   trace.act[static_cast<std::size_t>(conn.from)];
        }
        trace.pre[pos] = sum;
        trace.act[pos] = activate(net.activation, sum);
    }
    return trace;
}

// --------------------------------------------------------------------------
// Decoding genomes into networks
// --------------------------------------------------------------------------

namespace {

struct NodeSpec {
    int id;
    NeuronRole role;
};

// Shared assembly: nodes already in topological order, edges as (from_id,
// to_id, weight). Prunes hidden nodes that neither see an input nor reach an
// output, then finalizes.
Network assemble(const std::vector<NodeSpec>& nodes,
                 const std::vector<std::tuple<int, int, double>>& edges, Activation act) {
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < nodes.size(); ++i) slot[nodes[i].id] = i;

    std::vector<std::vector<std::size_t>> fwd(nodes.size()), back(nodes.size());
    for (const auto& [from, to, w] : edges) {
        fwd[slot.at(from)].push_back(slot.at(to));
        back[slot.at(to)].push_back(slot.at(from));
    }

    auto reach = [&](const std::vector<std::vector<std::size_t>>& adj,
                     NeuronRole seed) {
        std::vector<char> seen(nodes.size(), 0);
        std::vector<std::size_t> stack;
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].role == seed) {
                seen[i] = 1;
                stack.push_back(i);
            }
        while (!stack.empty()) {
            const std::size_t cur = stack.back();
            stack.pop_back();
            for (const std::size_t next : adj[cur])
                if (!seen[next]) {
                    seen[next] = 1;
                    stack.push_back(next);
                }
        }
        return seen;
    };
    const auto from_input = reach(fwd, NeuronRole::Input);
    const auto to_output = reach(back, NeuronRole::Output);

    std::vector<int> position(nodes.size(), -1);
    Network net;
    net.activation = act;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const bool keep = nodes[i].role != NeuronRole::Hidden || from_input[i] || to_output[i];
        if (!keep) continue;
        position[i] = static_cast<int>(net.node_order.size());
        net.node_order.push_back({nodes[i].id, nodes[i].role});
    }
    for (const auto& [from, to, w] : edges) {
        const int p_from = position[slot.at(from)];
        const int p_to = position[slot.at(to)];
        if (p_from < 0 || p_to < 0) continue;
        net.connections.push_back({p_from, p_to, static_cast<int>(net.weights.size())});
        net.weights.push_back(w);
    }
    net.finalize();
    return net;
}

}  // namespace

Network build_network(const MatrixGenome& genome, Activation act) {
    genome.validate();
    std::vector<NodeSpec> nodes;
    for (int idx = 0; idx < genome.node_count(); ++idx) {
        if (!genome.node_exists(idx)) continue;
        const NeuronRole role = genome.is_input(idx)    ? NeuronRole::Input
                                : genome.is_output(idx) ? NeuronRole::Output
                                                        : NeuronRole::Hidden;
        nodes.push_back({idx, role});
    }
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& [from, to] : genome.connections())
        edges.emplace_back(from, to, genome.weight(from, to));
    // upper-triangular support means index order is already topological
    return assemble(nodes, edges, act);
}

Network build_network(const GeneListGenome& genome, Activation act) {
    genome.validate();
    for (const auto& c : genome.connections) {
        if (!c.enabled) continue;
        const NeuronGene* target = genome.neuron(c.out_id);
        if (target != nullptr && target->role == NeuronRole::Input)
            throw ParamError("build_network: connection targets an input neuron");
    }

    // Kahn over enabled genes, smallest id first for a stable order
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> adj;
    for (const auto& n : genome.neurons) indegree[n.id] = 0;
    for (const auto& c : genome.connections) {
        if (!c.enabled) continue;
        adj[c.in_id].push_back(c.out_id);
        ++indegree[c.out_id];
    }
    std::set<int> ready;
    for (const auto& [id, deg] : indegree)
        if (deg == 0) ready.insert(id);
    std::vector<int> topo;
    while (!ready.empty()) {
        const int id = *ready.begin();
        ready.erase(ready.begin());
        topo.push_back(id);
        for (const int next : adj[id])
            if (--indegree[next] == 0) ready.insert(next);
    }
    if (topo.size() != genome.neurons.size())
        throw CyclicGenomeError("build_network: enabled genes form a cycle");

    std::vector<NodeSpec> nodes;
    nodes.reserve(topo.size());
    for (const int id : topo) nodes.push_back({id, genome.neuron(id)->role});
    std::vector<std::tuple<int, int, double>> edges;
    for (const auto& c : genome.connections)
        if (c.enabled) edges.emplace_back(c.in_id, c.out_id, c.weight);

    Network net = assemble(nodes, edges, act);

    // present the pattern in genome neuron order, not topological order
    std::map<int, int> pos_of;
    for (std::size_t p = 0; p < net.node_order.size(); ++p)
        pos_of[net.node_order[p].id] = static_cast<int>(p);
    net.input_positions.clear();
    net.output_positions.clear();
    for (const auto& n : genome.neurons) {
        if (n.role == NeuronRole::Input)
            net.input_positions.push_back(pos_of.at(n.id));
        else if (n.role == NeuronRole::Output)
            net.output_positions.push_back(pos_of.at(n.id));
    }
    return net;
}

Network build_network(const BitStringGenome& genome, Activation act) {
    return build_network(decode_bitstring(genome), act);
}

Network build_network(const Genome& genome, Activation act) {
    return std::visit([act](const auto& g) { return build_network(g, act); }, genome);
}

// --------------------------------------------------------------------------
// Backpropagation
// --------------------------------------------------------------------------

namespace {

double loss_derivative(Measure loss, double target, double actual) {
    const double diff = actual - target;
    switch (loss) {
        case Measure::Sqe: return 2.0 * diff;
        case Measure::Abs: return diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        case Measure::Exp: {
            if (diff == 0.0) return 0.0;
            return std::exp(std::abs(diff)) * (diff > 0.0 ? 1.0 : -1.0);
        }
        case Measure::Prechelt: break;
    }
    throw ParamError("backprop loss must be sqe, abs or exp");
}

// One full backward sweep; optionally drops nodes (mask 0 => unit removed for
// this pass) and optionally records per-pattern node data.
std::vector<double> backprop_impl(const Network& net, const DataSplit& batch, Measure loss,
                                  std::span<const std::uint8_t> node_mask,
                                  NodeBackpropData* node_data) {
    if (batch.size() == 0) throw DataError("backprop: empty batch");
    const std::size_t n = net.node_order.size();
    std::vector<double> grad(net.weights.size(), 0.0);
    if (node_data != nullptr) {
        node_data->act = Mat(batch.size(), n);
        node_data->delta = Mat(batch.size(), n);
    }

    std::vector<int> input_ordinal(n, -1);
    for (std::size_t k = 0; k < net.input_positions.size(); ++k)
        input_ordinal[static_cast<std::size_t>(net.input_positions[k])] = static_cast<int>(k);

    std::vector<double> pre(n), act(n), da(n), delta(n);
    for (std::size_t p = 0; p < batch.size(); ++p) {
        const auto input = batch.input(p);
        if (input.size() != net.input_positions.size())
            throw DimensionError("backprop: input width mismatch");
        const auto target = batch.target(p);
        if (target.size() != net.output_positions.size())
            throw DimensionError("backprop: target width mismatch");

        // forward
        for (std::size_t pos = 0; pos < n; ++pos) {
            if (net.node_order[pos].role == NeuronRole::Input) {
                pre[pos] = 0.0;
                act[pos] = input[static_cast<std::size_t>(input_ordinal[pos])];
            } else {
                double sum = 0.0;
                for (const int ci : net.incoming[pos]) {
                    const auto& conn = net.connections[static_cast<std::size_t>(ci)];
                    sum += net.weights[static_cast<std::size_t>(conn.weight_index)] *
                           act[static_cast<std::size_t>(conn.from)];
                }
                pre[pos] = sum;
                act[pos] = activate(net.activation, sum);
            }
            if (!node_mask.empty() && node_mask[pos] == 0) act[pos] = 0.0;
        }

        // backward
        std::fill(da.begin(), da.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (std::size_t k = 0; k < net.output_positions.size(); ++k) {
            const auto pos = static_cast<std::size_t>(net.output_positions[k]);
            da[pos] += loss_derivative(loss, target[k], act[pos]);
        }
        for (std::size_t rev = n; rev-- > 0;) {
            if (net.node_order[rev].role == NeuronRole::Input) continue;
            if (!node_mask.empty() && node_mask[rev] == 0) continue;
            const double d = da[rev] * activate_derivative(net.activation, pre[rev], act[rev]);
            delta[rev] = d;
            for (const int ci : net.incoming[rev]) {
                const auto& conn = net.connections[static_cast<std::size_t>(ci)];
                grad[static_cast<std::size_t>(conn.weight_index)] +=
                    act[static_cast<std::size_t>(conn.from)] * d;
                da[static_cast<std::size_t>(conn.from)] +=
                    net.weights[static_cast<std::size_t>(conn.weight_index)] * d;
            }
        }
        if (node_data != nullptr) {
            for (std::size_t pos = 0; pos < n; ++pos) {
                node_data->act.at(p, pos) = act[pos];
                node_data->delta.at(p, pos) = delta[pos];
            }
        }
    }
    return grad;
}

}  // namespace

std::vector<double> backprop_gradients(const Network& net, const DataSplit& batch, Measure loss) {
    return backprop_impl(net, batch, loss, {}, nullptr);
}

NodeBackpropData backprop_node_data(const Network& net, const DataSplit& batch, Measure loss) {
    NodeBackpropData data;
    backprop_impl(net, batch, loss, {}, &data);
    return data;
}

// --------------------------------------------------------------------------
// Error over a split
// --------------------------------------------------------------------------

double dataset_error(const Network& net, const DataSplit& split, const FitnessSpec& spec) {
    if (split.size() == 0) throw DataError("dataset_error: empty split");
    double sum = 0.0;
    for (std::size_t p = 0; p < split.size(); ++p) {
        const auto out = net.forward(split.input(p));
        const auto target = split.target(p);
        switch (spec.measure) {
            case Measure::Sqe:
            case Measure::Prechelt: sum += error_sqe(target, out); break;
            case Measure::Abs: sum += error_abs(target, out); break;
            case Measure::Exp: sum += error_exp(target, out); break;
        }
    }
    if (spec.measure == Measure::Prechelt) {
        FitnessSpec eff = spec;
        eff.n_outputs = net.output_count();
        eff.t_patterns = static_cast<int>(split.size());
        return error_prechelt(eff, sum);
    }
    return sum;
}

double dataset_error(const Network& net, const DataSplit& split, Measure measure) {
    FitnessSpec spec;
    spec.measure = measure;
    return dataset_error(net, split, spec);
}

// --------------------------------------------------------------------------
// Partial BP training
// --------------------------------------------------------------------------

namespace {

Network inference_scaled(const Network& net, double dropout_p) {
    Network scaled = net;
    for (const auto& conn : scaled.connections) {
        if (scaled.node_order[static_cast<std::size_t>(conn.from)].role == NeuronRole::Hidden)
            scaled.weights[static_cast<std::size_t>(conn.weight_index)] *= (1.0 - dropout_p);
    }
    return scaled;
}

double eval_error(const Network& net, const DataSplit& val, const FitnessSpec& spec,
                  double dropout_p) {
    if (dropout_p > 0.0) return dataset_error(inference_scaled(net, dropout_p), val, spec);
    return dataset_error(net, val, spec);
}

}  // namespace

TrainResult partial_train_bp(Network& net, const DataSplit& train, const DataSplit& val,
                             int epochs, BpOptions& options, const FitnessSpec& spec) {
    if (epochs < 1) throw ParamError("partial_train_bp: epochs must be >= 1");
    if (train.size() == 0 || val.size() == 0) throw DataError("partial_train_bp: empty dataset");
    options.momentum.validate(net.weights.size());
    if (options.dropout_p < 0.0 || options.dropout_p >= 1.0)
        throw ParamError("partial_train_bp: dropout must be in [0, 1)");

    const Measure loss = spec.measure == Measure::Prechelt ? Measure::Sqe : spec.measure;
    TrainResult result;
    result.error_before = eval_error(net, val, spec, options.dropout_p);

    const double base_alpha = options.momentum.alpha;
    std::vector<std::uint8_t> mask;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        if (options.schedule.has_value())
            options.momentum.alpha = dlopt::lr_at(*options.schedule, epoch);

        std::span<const std::uint8_t> mask_view;
        if (options.dropout_p > 0.0) {
            Rng mask_rng = Rng::derive(options.dropout_seed, "bp-dropout",
                                       static_cast<std::uint64_t>(epoch));
            mask.assign(net.node_order.size(), 1);
            for (std::size_t pos = 0; pos < net.node_order.size(); ++pos)
                if (net.node_order[pos].role == NeuronRole::Hidden &&
                    mask_rng.bernoulli(options.dropout_p))
                    mask[pos] = 0;
            mask_view = mask;
        }

        std::vector<double> delta;
        if (options.nesterov) {
            delta = dlopt::nesterov_step(
                options.momentum, net.weights,
                [&](std::span<const double> lookahead) {
                    Network probe = net;
                    probe.weights.assign(lookahead.begin(), lookahead.end());
                    return backprop_impl(probe, train, loss, mask_view, nullptr);
                });
        } else {
            const auto grad = backprop_impl(net, train, loss, mask_view, nullptr);
            delta = dlopt::momentum_step(options.momentum, grad);
        }
        for (std::size_t i = 0; i < net.weights.size(); ++i) net.weights[i] += delta[i];
    }
    options.momentum.alpha = base_alpha;

    result.error_after = eval_error(net, val, spec, options.dropout_p);
    return result;
}

// --------------------------------------------------------------------------
// Simulated annealing
// --------------------------------------------------------------------------

void SaSchedule::validate() const {
    if (!(t0 > t_min) || !(t_min > 0.0))
        throw ParamError("sa schedule: requires t0 > t_min > 0");
    if (cooling <= 0.0 || cooling >= 1.0) throw ParamError("sa schedule: cooling must be in (0, 1)");
    if (steps_per_temperature < 1) throw ParamError("sa schedule: steps_per_temperature must be >= 1");
    if (proposal_sigma < 0.0) throw ParamError("sa schedule: negative proposal sigma");
}

bool sa_accept(double delta_error, double temperature, Rng& rng) {
    if (delta_error <= 0.0) return true;
    return rng.uniform() < std::exp(-delta_error / temperature);
}

SaResult train_sa(Network& net, const DataSplit& val, const SaSchedule& schedule,
                  const FitnessSpec& spec, Rng& rng) {
    schedule.validate();
    SaResult result;
    double current = dataset_error(net, val, spec);
    double best_error = current;
    std::vector<double> best_weights = net.weights;

    if (!net.weights.empty()) {
        for (double t = schedule.t0; t >= schedule.t_min; t *= schedule.cooling) {
            for (int step = 0; step < schedule.steps_per_temperature; ++step) {
                ++result.stats.proposed;
                const auto i = static_cast<std::size_t>(
                    rng.uniform_int(0, static_cast<long long>(net.weights.size()) - 1));
                const double saved = net.weights[i];
                net.weights[i] = saved + rng.normal(0.0, schedule.proposal_sigma);
                const double proposed = dataset_error(net, val, spec);
                if (sa_accept(proposed - current, t, rng)) {
                    ++result.stats.accepted;
                    current = proposed;
                    if (current < best_error) {
                        ++result.stats.improved;
                        best_error = current;
                        best_weights = net.weights;
                    }
                } else {
                    net.weights[i] = saved;
                }
            }
        }
    }
    net.weights = best_weights;
    result.error_after = best_error;
    return result;
}

// --------------------------------------------------------------------------
// Weight write-back
// --------------------------------------------------------------------------

void write_back_weights(const Network& net, MatrixGenome& genome) {
    for (const auto& conn : net.connections) {
        const int from = net.node_order[static_cast<std::size_t>(conn.from)].id;
        const int to = net.node_order[static_cast<std::size_t>(conn.to)].id;
        if (!genome.connected(from, to))
            throw ParamError("write_back_weights: network does not match genome");
        genome.set_connection(from, to, net.weights[static_cast<std::size_t>(conn.weight_index)]);
    }
}

void write_back_weights(const Network& net, GeneListGenome& genome) {
    for (const auto& conn : net.connections) {
        const int from = net.node_order[static_cast<std::size_t>(conn.from)].id;
        const int to = net.node_order[static_cast<std::size_t>(conn.to)].id;
        bool found = false;
        for (auto& gene : genome.connections) {
            if (gene.enabled && gene.in_id == from && gene.out_id == to) {
                gene.weight = net.weights[static_cast<std::size_t>(conn.weight_index)];
                found = true;
                break;
            }
        }
        if (!found) throw ParamError("write_back_weights: network does not match genome");
    }
}

void write_back_weights(const Network& net, Genome& genome) {
    if (auto* matrix = std::get_if<MatrixGenome>(&genome)) {
        write_back_weights(net, *matrix);
    } else if (auto* genes = std::get_if<GeneListGenome>(&genome)) {
        write_back_weights(net, *genes);
    } else {
        throw ParamError("write_back_weights: bit-string weights are quantized");
    }
}

}  // namespace evonet
