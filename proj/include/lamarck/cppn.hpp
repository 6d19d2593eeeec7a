#pragma once

// Body genome: a compositional pattern producing network (CPPN) with NEAT-style
// structural variation. Four inputs (x, y, z, tree depth) and five outputs
// (brick, hinge, empty, rotation 0, rotation 90).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

enum class Activation { linear, sine, gaussian, sigmoid, abs };

inline constexpr std::array<Activation, 5> kHiddenActivations = {
    Activation::sine, Activation::gaussian, Activation::sigmoid, Activation::linear, Activation::abs};

inline double activate(Activation a, double x) {
    switch (a) {
        case Activation::linear: return x;
        case Activation::sine: return std::sin(x);
        case Activation::gaussian: return std::exp(-x * x);
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-x));
        case Activation::abs: return std::abs(x);
    }
    return x;
}

inline std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::sine: return "sine";
        case Activation::gaussian: return "gaussian";
        case Activation::sigmoid: return "sigmoid";
        case Activation::abs: return "abs";
    }
    return "linear";
}

inline Activation activation_from_string(std::string_view s) {
    for (auto a : {Activation::linear, Activation::sine, Activation::gaussian, Activation::sigmoid,
                   Activation::abs}) {
        if (to_string(a) == s) return a;
    }
    throw std::invalid_argument("unknown activation: " + std::string(s));
}

enum class NodeRole { input, output, hidden };

struct CppnNode {
    int id = 0;
    NodeRole role = NodeRole::hidden;
    Activation activation = Activation::linear;
    double bias = 0.0;

    friend bool operator==(const CppnNode&, const CppnNode&) = default;
};

struct CppnConnection {
    int source = 0;
    int target = 0;
    double weight = 0.0;
    bool enabled = true;
    std::int64_t innovation = 0;

    friend bool operator==(const CppnConnection&, const CppnConnection&) = default;
};

struct BodyGenotype {
    static constexpr int kInputs = 4;
    static constexpr int kOutputs = 5;
    static constexpr int kFirstHiddenId = kInputs + kOutputs;

    std::vector<CppnNode> nodes;              // sorted by id
    std::vector<CppnConnection> connections;  // sorted by innovation

    friend bool operator==(const BodyGenotype&, const BodyGenotype&) = default;

    const CppnNode* find_node(int id) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                   [](const CppnNode& n, int v) { return n.id < v; });
        return (it != nodes.end() && it->id == id) ? &*it : nullptr;
    }

    bool has_connection(int source, int target) const {
        return std::any_of(connections.begin(), connections.end(), [&](const CppnConnection& c) {
            return c.source == source && c.target == target;
        });
    }
};

/// Run-wide registry that hands out innovation numbers and hidden-node ids, so
/// that the same structural change made in two lineages gets the same label.
/// Structural mutations must be applied in a fixed order for reproducibility.
class InnovationTracker {
public:
    InnovationTracker() {
        for (int i = 0; i < BodyGenotype::kInputs; ++i) {
            for (int o = 0; o < BodyGenotype::kOutputs; ++o) {
                connection(i, BodyGenotype::kInputs + o);
            }
        }
        next_node_ = BodyGenotype::kFirstHiddenId;
    }

    std::int64_t connection(int source, int target) {
        auto [it, inserted] = connections_.try_emplace({source, target}, next_innovation_);
        if (inserted) ++next_innovation_;
        return it->second;
    }

    /// Node id for splitting the connection with innovation `innovation` inside `g`.
    int split_node(std::int64_t innovation, const BodyGenotype& g) {
        auto& ids = splits_[innovation];
        for (int id : ids) {
            if (!g.find_node(id)) return id;
        }
        ids.push_back(next_node_);
        return next_node_++;
    }

    std::int64_t next_innovation() const { return next_innovation_; }
    int next_node() const { return next_node_; }
    const std::map<std::pair<int, int>, std::int64_t>& connections() const { return connections_; }
    const std::map<std::int64_t, std::vector<int>>& splits() const { return splits_; }

    static InnovationTracker restore(std::map<std::pair<int, int>, std::int64_t> connections,
                                     std::map<std::int64_t, std::vector<int>> splits,
                                     std::int64_t next_innovation, int next_node) {
        InnovationTracker t;
        t.connections_ = std::move(connections);
        t.splits_ = std::move(splits);
        t.next_innovation_ = next_innovation;
        t.next_node_ = next_node;
        return t;
    }

    friend bool operator==(const InnovationTracker&, const InnovationTracker&) = default;

private:
    std::map<std::pair<int, int>, std::int64_t> connections_;
    std::map<std::int64_t, std::vector<int>> splits_;
    std::int64_t next_innovation_ = 0;
    int next_node_ = BodyGenotype::kFirstHiddenId;
};

/// Topological order of node ids over all connection genes (enabled or not).
/// Returns nullopt when the graph has a cycle.
inline std::optional<std::vector<int>> topological_order(const BodyGenotype& g) {
    std::map<int, int> indegree;
    std::map<int, std::vector<int>> out;
    for (const auto& n : g.nodes) indegree[n.id] = 0;
    for (const auto& c : g.connections) {
        ++indegree[c.target];
        out[c.source].push_back(c.target);
    }
    std::vector<int> ready;
    for (const auto& [id, d] : indegree) {
        if (d == 0) ready.push_back(id);
    }
    std::vector<int> order;
    order.reserve(indegree.size());
    // Smallest id first keeps the order canonical.
    std::sort(ready.begin(), ready.end(), std::greater<>());
    while (!ready.empty()) {
        int id = ready.back();
        ready.pop_back();
        order.push_back(id);
        for (int t : out[id]) {
            if (--indegree[t] == 0) {
                ready.push_back(t);
                std::sort(ready.begin(), ready.end(), std::greater<>());
            }
        }
    }
    if (order.size() != indegree.size()) return std::nullopt;
    return order;
}

inline bool is_acyclic(const BodyGenotype& g) { return topological_order(g).has_value(); }

/// Checks the structural invariants: fixed I/O nodes, sorted unique genes,
/// dangling-free connections, acyclicity.
inline bool is_valid(const BodyGenotype& g) {
    for (int i = 0; i < BodyGenotype::kFirstHiddenId; ++i) {
        const auto* n = g.find_node(i);
        if (!n) return false;
        auto expected = i < BodyGenotype::kInputs ? NodeRole::input : NodeRole::output;
        if (n->role != expected) return false;
    }
    for (std::size_t i = 1; i < g.nodes.size(); ++i) {
        if (g.nodes[i - 1].id >= g.nodes[i].id) return false;
    }
    for (std::size_t i = 0; i < g.connections.size(); ++i) {
        const auto& c = g.connections[i];
        if (i > 0 && g.connections[i - 1].innovation >= c.innovation) return false;
        const auto* s = g.find_node(c.source);
        const auto* t = g.find_node(c.target);
        if (!s || !t || s->role == NodeRole::output || t->role == NodeRole::input) return false;
        if (!std::isfinite(c.weight)) return false;
    }
    return is_acyclic(g);
}

/// Feed-forward evaluation over enabled connections.
inline std::array<double, BodyGenotype::kOutputs> query(const BodyGenotype& g, double x, double y,
                                                        double z, double depth) {
    auto order = topological_order(g);
    if (!order) throw std::logic_error("cppn has a cycle");
    std::map<int, double> value;
    std::map<int, double> sum;
    const std::array<double, 4> inputs = {x, y, z, depth};
    for (int id : *order) {
        const auto* n = g.find_node(id);
        double v = 0.0;
        if (n->role == NodeRole::input) {
            v = inputs[static_cast<std::size_t>(id)];
        } else {
            double s = n->bias + sum[id];
            v = activate(n->role == NodeRole::output ? Activation::sigmoid : n->activation, s);
        }
        value[id] = v;
        for (const auto& c : g.connections) {
            if (c.enabled && c.source == id) sum[c.target] += c.weight * v;
        }
    }
    std::array<double, BodyGenotype::kOutputs> out{};
    for (int o = 0; o < BodyGenotype::kOutputs; ++o) out[o] = value[BodyGenotype::kInputs + o];
    return out;
}

/// Minimal starting topology: every input wired to every output, no hidden nodes.
inline BodyGenotype random_body(Rng& rng, InnovationTracker& tracker) {
    BodyGenotype g;
    for (int i = 0; i < BodyGenotype::kInputs; ++i) {
        g.nodes.push_back({i, NodeRole::input, Activation::linear, 0.0});
    }
    for (int o = 0; o < BodyGenotype::kOutputs; ++o) {
        g.nodes.push_back(
            {BodyGenotype::kInputs + o, NodeRole::output, Activation::sigmoid, uniform(rng, -1.0, 1.0)});
    }
    for (int i = 0; i < BodyGenotype::kInputs; ++i) {
        for (int o = 0; o < BodyGenotype::kOutputs; ++o) {
            int t = BodyGenotype::kInputs + o;
            g.connections.push_back({i, t, uniform(rng, -1.0, 1.0), true, tracker.connection(i, t)});
        }
    }
    return g;
}

/// NEAT crossover. `fitter` supplies all disjoint and excess genes; matching
/// genes (same innovation) are drawn from either parent with equal odds.
inline BodyGenotype body_crossover(const BodyGenotype& fitter, const BodyGenotype& other, Rng& rng) {
    BodyGenotype child;
    child.nodes.reserve(fitter.nodes.size());
    for (const auto& n : fitter.nodes) {
        const auto* m = other.find_node(n.id);
        if (m && n.role == NodeRole::hidden && m->role == NodeRole::hidden) {
            child.nodes.push_back(uniform01(rng) < 0.5 ? n : *m);
        } else if (m && n.role == NodeRole::output) {
            CppnNode picked = n;
            picked.bias = uniform01(rng) < 0.5 ? n.bias : m->bias;
            child.nodes.push_back(picked);
        } else {
            child.nodes.push_back(n);
        }
    }
    std::map<std::int64_t, const CppnConnection*> other_genes;
    for (const auto& c : other.connections) other_genes[c.innovation] = &c;
    child.connections.reserve(fitter.connections.size());
    for (const auto& c : fitter.connections) {
        auto it = other_genes.find(c.innovation);
        if (it != other_genes.end()) {
            child.connections.push_back(uniform01(rng) < 0.5 ? c : *it->second);
        } else {
            child.connections.push_back(c);
        }
    }
    return child;
}

struct BodyMutationParams {
    double probability = 0.8;  // gate: chance that a genotype is mutated at all
    double weight_rate = 0.9;  // per connection weight and per output/hidden bias
    double weight_sd = 0.5;
    double add_connection_rate = 0.05;
    double add_node_rate = 0.03;
    double toggle_rate = 0.02;
};

/// What body_mutate did; the attempt flags record that the event was drawn,
/// the success flags that it changed the structure.
struct BodyMutationReport {
    bool gated_in = false;
    int weights_perturbed = 0;
    int biases_perturbed = 0;
    bool add_connection_attempted = false;
    bool add_connection_applied = false;
    bool add_node_attempted = false;
    bool add_node_applied = false;
    bool toggle_attempted = false;
    bool toggle_applied = false;
};

namespace detail {

inline bool reaches(const BodyGenotype& g, int from, int to) {
    std::vector<int> stack{from};
    std::vector<int> seen;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == to) return true;
        if (std::find(seen.begin(), seen.end(), v) != seen.end()) continue;
        seen.push_back(v);
        for (const auto& c : g.connections) {
            if (c.source == v) stack.push_back(c.target);
        }
    }
    return false;
}

inline void sort_genes(BodyGenotype& g) {
    std::sort(g.nodes.begin(), g.nodes.end(), [](auto& a, auto& b) { return a.id < b.id; });
    std::sort(g.connections.begin(), g.connections.end(),
              [](auto& a, auto& b) { return a.innovation < b.innovation; });
}

inline bool add_connection(BodyGenotype& g, Rng& rng, InnovationTracker& tracker) {
    std::vector<std::pair<int, int>> candidates;
    for (const auto& s : g.nodes) {
        if (s.role == NodeRole::output) continue;
        for (const auto& t : g.nodes) {
            if (t.role == NodeRole::input || s.id == t.id) continue;
            if (g.has_connection(s.id, t.id)) continue;
            if (reaches(g, t.id, s.id)) continue;
            candidates.emplace_back(s.id, t.id);
        }
    }
    if (candidates.empty()) return false;
    auto [s, t] = candidates[uniform_index(rng, candidates.size())];
    g.connections.push_back({s, t, uniform(rng, -1.0, 1.0), true, tracker.connection(s, t)});
    sort_genes(g);
    return true;
}

inline bool add_node(BodyGenotype& g, Rng& rng, InnovationTracker& tracker) {
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < g.connections.size(); ++i) {
        if (g.connections[i].enabled) enabled.push_back(i);
    }
    if (enabled.empty()) return false;
    auto& split = g.connections[enabled[uniform_index(rng, enabled.size())]];
    split.enabled = false;
    const int source = split.source;
    const int target = split.target;
    const double weight = split.weight;
    const int k = tracker.split_node(split.innovation, g);
    auto act = kHiddenActivations[uniform_index(rng, kHiddenActivations.size())];
    g.nodes.push_back({k, NodeRole::hidden, act, 0.0});
    g.connections.push_back({source, k, 1.0, true, tracker.connection(source, k)});
    g.connections.push_back({k, target, weight, true, tracker.connection(k, target)});
    sort_genes(g);
    return true;
}

}  // namespace detail

inline BodyGenotype body_mutate(const BodyGenotype& g, Rng& rng, const BodyMutationParams& params,
                                InnovationTracker& tracker, BodyMutationReport* report = nullptr) {
    BodyMutationReport r;
    BodyGenotype out = g;
    if (uniform01(rng) >= params.probability) {
        if (report) *report = r;
        return out;
    }
    r.gated_in = true;
    for (auto& c : out.connections) {
        if (uniform01(rng) < params.weight_rate) {
            c.weight += gaussian(rng, 0.0, params.weight_sd);
            ++r.weights_perturbed;
        }
    }
    for (auto& n : out.nodes) {
        if (n.role == NodeRole::input) continue;
        if (uniform01(rng) < params.weight_rate) {
            n.bias += gaussian(rng, 0.0, params.weight_sd);
            ++r.biases_perturbed;
        }
    }
    if (uniform01(rng) < params.add_connection_rate) {
        r.add_connection_attempted = true;
        r.add_connection_applied = detail::add_connection(out, rng, tracker);
    }
    if (uniform01(rng) < params.add_node_rate) {
        r.add_node_attempted = true;
        r.add_node_applied = detail::add_node(out, rng, tracker);
    }
    if (uniform01(rng) < params.toggle_rate && !out.connections.empty()) {
        r.toggle_attempted = true;
        auto& c = out.connections[uniform_index(rng, out.connections.size())];
        c.enabled = !c.enabled;
        r.toggle_applied = true;
    }
    if (report) *report = r;
    return out;
}

}  // namespace lamarck
