#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamarck/brain_genotype.hpp"
#include "lamarck/cppn.hpp"

namespace lamarck {

struct Lineage {
    std::vector<std::int64_t> parents;  // fitter parent first; empty for the initial population
    int generation = 0;
    friend bool operator==(const Lineage&, const Lineage&) = default;
};

struct Genotype {
    BodyGenotype body;
    BrainGenotype brain;
    Lineage lineage;
    friend bool operator==(const Genotype&, const Genotype&) = default;
};

namespace detail {

struct Fnv {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    void bytes(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xFF;
            h *= 0x100000001B3ULL;
        }
    }
    void real(double d) { bytes(std::bit_cast<std::uint64_t>(d)); }
    void integer(std::int64_t i) { bytes(static_cast<std::uint64_t>(i)); }
};

}  // namespace detail

/// Bitwise content hash of body and brain (lineage excluded).
inline std::uint64_t genotype_hash(const Genotype& g) {
    detail::Fnv f;
    for (const auto& n : g.body.nodes) {
        f.integer(n.id);
        f.integer(static_cast<int>(n.role));
        f.integer(static_cast<int>(n.activation));
        f.real(n.bias);
    }
    for (const auto& c : g.body.connections) {
        f.integer(c.source);
        f.integer(c.target);
        f.real(c.weight);
        f.integer(c.enabled);
        f.integer(c.innovation);
    }
    for (double w : g.brain.flat()) f.real(w);
    return f.h;
}

// --- text serialisation -----------------------------------------------------
//
// body:  {"nodes": [[id, role, activation, bias], ...],
//         "connections": [[source, target, weight, enabled, innovation], ...]}
// brain: flat array of 440*14 reals, row-major.

inline std::string_view to_string(NodeRole r) {
    switch (r) {
        case NodeRole::input: return "input";
        case NodeRole::output: return "output";
        case NodeRole::hidden: return "hidden";
    }
    return "hidden";
}

inline NodeRole role_from_string(std::string_view s) {
    if (s == "input") return NodeRole::input;
    if (s == "output") return NodeRole::output;
    if (s == "hidden") return NodeRole::hidden;
    throw std::invalid_argument("unknown node role: " + std::string(s));
}

inline nlohmann::json to_json(const BodyGenotype& g) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : g.nodes) {
        nodes.push_back({n.id, to_string(n.role), to_string(n.activation), n.bias});
    }
    nlohmann::json conns = nlohmann::json::array();
    for (const auto& c : g.connections) {
        conns.push_back({c.source, c.target, c.weight, c.enabled, c.innovation});
    }
    return {{"nodes", nodes}, {"connections", conns}};
}

inline BodyGenotype body_from_json(const nlohmann::json& j) {
    BodyGenotype g;
    for (const auto& n : j.at("nodes")) {
        g.nodes.push_back({n.at(0).get<int>(), role_from_string(n.at(1).get<std::string>()),
                           activation_from_string(n.at(2).get<std::string>()), n.at(3).get<double>()});
    }
    for (const auto& c : j.at("connections")) {
        g.connections.push_back({c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<double>(),
                                 c.at(3).get<bool>(), c.at(4).get<std::int64_t>()});
    }
    if (!is_valid(g)) throw std::invalid_argument("serialised body genotype is not valid");
    return g;
}

inline nlohmann::json to_json(const BrainGenotype& g) {
    auto flat = g.flat();
    return nlohmann::json(std::vector<double>(flat.begin(), flat.end()));
}

inline BrainGenotype brain_from_json(const nlohmann::json& j) {
    return BrainGenotype(j.get<std::vector<double>>());
}

inline nlohmann::json to_json(const InnovationTracker& t) {
    nlohmann::json conns = nlohmann::json::array();
    for (const auto& [key, innov] : t.connections()) conns.push_back({key.first, key.second, innov});
    nlohmann::json splits = nlohmann::json::array();
    for (const auto& [innov, ids] : t.splits()) splits.push_back({innov, ids});
    return {{"connections", conns},
            {"splits", splits},
            {"next_innovation", t.next_innovation()},
            {"next_node", t.next_node()}};
}

inline InnovationTracker tracker_from_json(const nlohmann::json& j) {
    std::map<std::pair<int, int>, std::int64_t> conns;
    for (const auto& c : j.at("connections")) {
        conns[{c.at(0).get<int>(), c.at(1).get<int>()}] = c.at(2).get<std::int64_t>();
    }
    std::map<std::int64_t, std::vector<int>> splits;
    for (const auto& s : j.at("splits")) {
        splits[s.at(0).get<std::int64_t>()] = s.at(1).get<std::vector<int>>();
    }
    return InnovationTracker::restore(std::move(conns), std::move(splits),
                                      j.at("next_innovation").get<std::int64_t>(),
                                      j.at("next_node").get<int>());
}

}  // namespace lamarck
