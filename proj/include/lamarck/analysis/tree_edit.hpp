#pragma once

// Unit-cost edit distance between ordered labeled trees (Zhang-Shasha).

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamarck/morphology.hpp"

namespace lamarck {

/// Ordered labeled tree; node 0 is the root, children in order.
struct LabeledTree {
    std::vector<std::string> labels;
    std::vector<std::vector<int>> children;

    std::size_t size() const { return labels.size(); }

    int add(std::string label, int parent = -1) {
        labels.push_back(std::move(label));
        children.emplace_back();
        const int id = static_cast<int>(labels.size()) - 1;
        if (parent >= 0) children[static_cast<std::size_t>(parent)].push_back(id);
        return id;
    }
};

/// Labels are kind + rotation, children ordered by socket.
inline LabeledTree labeled_tree(const ModuleTree& t) {
    LabeledTree out;
    auto visit = [&](auto&& self, int id, int parent) -> void {
        const int me = out.add(module_label(t.at(id)), parent);
        for (int c : t.children(id)) self(self, c, me);
    };
    visit(visit, 0, -1);
    return out;
}

/// From the nested-list morphology form [kind, rotation, socket, [children]].
inline LabeledTree labeled_tree(const nlohmann::json& nested) {
    LabeledTree out;
    auto visit = [&](auto&& self, const nlohmann::json& n, int parent) -> void {
        Module m;
        m.kind = module_kind_from_string(n.at(0).get<std::string>());
        m.rotation = n.at(1).get<int>();
        const int me = out.add(module_label(m), parent);
        for (const auto& c : n.at(3)) self(self, c, me);
    };
    visit(visit, nested, -1);
    return out;
}

namespace detail {

struct Postorder {
    std::vector<std::string> label;  // by postorder index
    std::vector<int> leftmost;       // leftmost leaf descendant, postorder index
    std::vector<int> keyroots;
};

inline Postorder postorder(const LabeledTree& t) {
    Postorder p;
    if (t.size() == 0) return p;
    auto visit = [&](auto&& self, int id) -> int {
        int lm = -1;
        for (int c : t.children[static_cast<std::size_t>(id)]) {
            const int clm = self(self, c);
            if (lm < 0) lm = clm;
        }
        const int me = static_cast<int>(p.label.size());
        p.label.push_back(t.labels[static_cast<std::size_t>(id)]);
        p.leftmost.push_back(lm < 0 ? me : lm);
        return p.leftmost.back();
    };
    visit(visit, 0);
    // A keyroot is the highest node with a given leftmost leaf.
    const int n = static_cast<int>(p.label.size());
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = n - 1; i >= 0; --i) {
        const auto l = static_cast<std::size_t>(p.leftmost[static_cast<std::size_t>(i)]);
        if (!seen[l]) {
            seen[l] = true;
            p.keyroots.push_back(i);
        }
    }
    std::sort(p.keyroots.begin(), p.keyroots.end());
    return p;
}

}  // namespace detail

/// Minimum number of node insertions, deletions and relabelings turning a into b.
inline int tree_edit_distance(const LabeledTree& a, const LabeledTree& b) {
    const auto pa = detail::postorder(a);
    const auto pb = detail::postorder(b);
    const int n = static_cast<int>(pa.label.size());
    const int m = static_cast<int>(pb.label.size());
    if (n == 0 || m == 0) return n + m;

    std::vector<std::vector<int>> td(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(m), 0));
    std::vector<std::vector<int>> fd(static_cast<std::size_t>(n + 1), std::vector<int>(static_cast<std::size_t>(m + 1), 0));

    for (int i : pa.keyroots) {
        for (int j : pb.keyroots) {
            const int li = pa.leftmost[static_cast<std::size_t>(i)];
            const int lj = pb.leftmost[static_cast<std::size_t>(j)];
            // fd is indexed with offsets: row x stands for postorder node li + x - 1.
            auto F = [&](int x, int y) -> int& {
                return fd[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
            };
            const int rows = i - li + 1;
            const int cols = j - lj + 1;
            F(0, 0) = 0;
            for (int x = 1; x <= rows; ++x) F(x, 0) = F(x - 1, 0) + 1;
            for (int y = 1; y <= cols; ++y) F(0, y) = F(0, y - 1) + 1;
            for (int x = 1; x <= rows; ++x) {
                const int ni = li + x - 1;
                for (int y = 1; y <= cols; ++y) {
                    const int nj = lj + y - 1;
                    const int del = F(x - 1, y) + 1;
                    const int ins = F(x, y - 1) + 1;
                    if (pa.leftmost[static_cast<std::size_t>(ni)] == li && pb.leftmost[static_cast<std::size_t>(nj)] == lj) {
                        const int rel = F(x - 1, y - 1) +
                                        (pa.label[static_cast<std::size_t>(ni)] == pb.label[static_cast<std::size_t>(nj)] ? 0 : 1);
                        F(x, y) = std::min({del, ins, rel});
                        td[static_cast<std::size_t>(ni)][static_cast<std::size_t>(nj)] = F(x, y);
                    } else {
                        const int px = pa.leftmost[static_cast<std::size_t>(ni)] - li;
                        const int py = pb.leftmost[static_cast<std::size_t>(nj)] - lj;
                        const int sub = F(px, py) + td[static_cast<std::size_t>(ni)][static_cast<std::size_t>(nj)];
                        F(x, y) = std::min({del, ins, sub});
                    }
                }
            }
        }
    }
    return td[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(m - 1)];
}

inline int tree_edit_distance(const ModuleTree& a, const ModuleTree& b) {
    return tree_edit_distance(labeled_tree(a), labeled_tree(b));
}

}  // namespace lamarck
