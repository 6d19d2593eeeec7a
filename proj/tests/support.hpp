#pragma once

// Helpers shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "lamarck/lamarck.hpp"

namespace lamarck::testing {

// --- bodies from a cell map --------------------------------------------------------

/// Query callable placing a module of the given kind at listed grid3 cells and
/// leaving every other slot empty.
struct CellQuery {
    std::map<Vec3i, std::pair<ModuleKind, int>> cells;  // kind, rotation
    mutable int calls = 0;

    std::array<double, 5> operator()(double x, double y, double z, double) const {
        ++calls;
        const Vec3i p{static_cast<int>(x), static_cast<int>(y), static_cast<int>(z)};
        auto it = cells.find(p);
        if (it == cells.end()) return {0, 0, 1, 1, 0};
        const bool brick = it->second.first == ModuleKind::brick;
        const bool r90 = it->second.second == 90;
        return {brick ? 1.0 : 0.0, brick ? 0.0 : 1.0, 0.0, r90 ? 0.0 : 1.0, r90 ? 1.0 : 0.0};
    }
};

inline ModuleTree body_from_cells(std::initializer_list<std::pair<Vec3i, ModuleKind>> cells) {
    CellQuery q;
    for (const auto& [p, k] : cells) q.cells[p] = {k, 0};
    return develop_body(q);
}

/// CPPN with all connection weights 0, so each output is sigmoid(bias).
inline BodyGenotype constant_body(std::array<double, 5> output_bias) {
    InnovationTracker tracker;
    Rng rng(1);
    BodyGenotype g = random_body(rng, tracker);
    for (auto& c : g.connections) c.weight = 0.0;
    for (auto& n : g.nodes) {
        if (n.role == NodeRole::output) n.bias = output_bias[static_cast<std::size_t>(n.id - BodyGenotype::kInputs)];
    }
    return g;
}

/// Random CPPN grown by a few rounds of mutation, for property tests.
inline BodyGenotype grown_body(std::uint64_t seed, int rounds = 6) {
    InnovationTracker tracker;
    Rng rng(seed);
    BodyGenotype g = random_body(rng, tracker);
    BodyMutationParams p;
    p.probability = 1.0;
    p.add_connection_rate = 0.5;
    p.add_node_rate = 0.5;
    for (int i = 0; i < rounds; ++i) g = body_mutate(g, rng, p, tracker);
    return g;
}

// --- brute-force tree edit distance --------------------------------------------------

/// Ordered labeled forest as a canonical string: label followed by a
/// parenthesized child list, e.g. "A(B()C())". Labels are single characters.
struct Forest {
    struct Node {
        char label;
        std::vector<Node> kids;
    };
    std::vector<Node> roots;
};

inline void encode(const std::vector<Forest::Node>& nodes, std::string& out) {
    for (const auto& n : nodes) {
        out += n.label;
        out += '(';
        encode(n.kids, out);
        out += ')';
    }
}

inline std::string encode(const std::vector<Forest::Node>& nodes) {
    std::string s;
    encode(nodes, s);
    return s;
}

inline std::vector<Forest::Node> decode(const std::string& s) {
    std::vector<Forest::Node> out;
    std::size_t i = 0;
    std::function<std::vector<Forest::Node>()> parse = [&]() {
        std::vector<Forest::Node> nodes;
        while (i < s.size() && s[i] != ')') {
            Forest::Node n{s[i], {}};
            i += 2;  // label and '('
            n.kids = parse();
            ++i;  // ')'
            nodes.push_back(std::move(n));
        }
        return nodes;
    };
    return parse();
}

inline int count_nodes(const std::vector<Forest::Node>& nodes) {
    int c = 0;
    for (const auto& n : nodes) c += 1 + count_nodes(n.kids);
    return c;
}

/// Every forest one unit edit away: relabel, delete (children move up) or
/// insert (the new node adopts a consecutive run of siblings).
inline void neighbours(const std::vector<Forest::Node>& list, const std::string& labels,
                       const std::function<void(std::vector<Forest::Node>)>& emit) {
    // Edits inside one child subtree.
    for (std::size_t i = 0; i < list.size(); ++i) {
        neighbours(list[i].kids, labels, [&](std::vector<Forest::Node> kids) {
            auto copy = list;
            copy[i].kids = std::move(kids);
            emit(std::move(copy));
        });
        for (char l : labels) {
            if (l == list[i].label) continue;
            auto copy = list;
            copy[i].label = l;
            emit(std::move(copy));
        }
        auto copy = list;
        auto kids = copy[i].kids;
        copy.erase(copy.begin() + static_cast<std::ptrdiff_t>(i));
        copy.insert(copy.begin() + static_cast<std::ptrdiff_t>(i), kids.begin(), kids.end());
        emit(std::move(copy));
    }
    for (std::size_t a = 0; a <= list.size(); ++a) {
        for (std::size_t b = a; b <= list.size(); ++b) {
            for (char l : labels) {
                Forest::Node n{l, std::vector<Forest::Node>(list.begin() + static_cast<std::ptrdiff_t>(a),
                                                             list.begin() + static_cast<std::ptrdiff_t>(b))};
                std::vector<Forest::Node> copy(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(a));
                copy.push_back(std::move(n));
                copy.insert(copy.end(), list.begin() + static_cast<std::ptrdiff_t>(b), list.end());
                emit(std::move(copy));
            }
        }
    }
}

/// All labeled ordered trees with 1..max_nodes nodes over `labels`.
inline std::vector<std::string> all_trees(int max_nodes, const std::string& labels) {
    // Forests by size, then trees = label + forest of size n-1.
    std::vector<std::vector<std::vector<Forest::Node>>> forests(static_cast<std::size_t>(max_nodes));
    forests[0].push_back({});
    std::vector<std::vector<Forest::Node>> trees_by_size[8];
    for (int n = 1; n < max_nodes + 1; ++n) {
        for (const auto& f : forests[static_cast<std::size_t>(n - 1)]) {
            for (char l : labels) trees_by_size[n].push_back({Forest::Node{l, f}});
        }
        if (n >= max_nodes) break;
        // forests of size n: first tree of size k, rest forest of size n-k
        for (int k = 1; k <= n; ++k) {
            for (const auto& t : trees_by_size[k]) {
                for (const auto& rest : forests[static_cast<std::size_t>(n - k)]) {
                    std::vector<Forest::Node> f = t;
                    f.insert(f.end(), rest.begin(), rest.end());
                    forests[static_cast<std::size_t>(n)].push_back(std::move(f));
                }
            }
        }
    }
    std::vector<std::string> out;
    for (int n = 1; n <= max_nodes; ++n) {
        for (const auto& t : trees_by_size[n]) out.push_back(encode(t));
    }
    return out;
}

/// Breadth-first search over forests of at most `max_nodes` nodes: unit edit
/// distance from `source` to every reachable forest.
inline std::unordered_map<std::string, int> edit_distances_from(const std::string& source, int max_nodes,
                                                               const std::string& labels) {
    std::unordered_map<std::string, int> dist{{source, 0}};
    std::deque<std::string> queue{source};
    while (!queue.empty()) {
        const std::string cur = queue.front();
        queue.pop_front();
        const int d = dist[cur];
        neighbours(decode(cur), labels, [&](std::vector<Forest::Node> f) {
            if (count_nodes(f) > max_nodes) return;
            std::string key = encode(f);
            if (dist.emplace(key, d + 1).second) queue.push_back(std::move(key));
        });
    }
    return dist;
}

inline LabeledTree to_labeled(const std::string& encoded) {
    LabeledTree t;
    const auto roots = decode(encoded);
    std::function<void(const Forest::Node&, int)> add = [&](const Forest::Node& n, int parent) {
        const int me = t.add(std::string(1, n.label), parent);
        for (const auto& k : n.kids) add(k, me);
    };
    for (const auto& r : roots) add(r, -1);
    return t;
}

// --- small run configurations ------------------------------------------------------

inline ExperimentConfig desk_config(const std::string& setup, InheritanceMode mode, std::uint64_t seed) {
    ExperimentConfig cfg;
    apply_profile(cfg, "desk");
    cfg.evolution.setup = setup;
    cfg.evolution.mode = mode;
    cfg.evolution.seed = seed;
    return cfg;
}

/// Observer that keeps everything in memory.
struct Recorder : RunObserver {
    std::vector<Individual> born;
    std::vector<std::tuple<int, std::string, std::string, std::vector<Reevaluation>>> changes;
    std::vector<GenerationSummary> generations;
    std::vector<InnovationTracker> trackers;

    void on_individual(const Individual& i) override { born.push_back(i); }
    void on_reevaluation(int g, const std::string& from, const std::string& to,
                         const std::vector<Reevaluation>& p) override {
        changes.emplace_back(g, from, to, p);
    }
    void on_generation(const GenerationSummary& s) override {
        generations.push_back(s);
        trackers.push_back(*s.tracker);
        generations.back().tracker = nullptr;
    }
};

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace lamarck::testing
