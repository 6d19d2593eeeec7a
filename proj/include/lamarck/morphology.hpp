#pragma once

// Body development: breadth-first growth of a module tree from the core,
// asking the CPPN what to place at every open socket.

#include <algorithm>
#include <concepts>
#include <array>
#include <cstddef>
#include <deque>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "lamarck/brain_genotype.hpp"
#include "lamarck/cppn.hpp"

namespace lamarck {

enum class ModuleKind { core, brick, hinge };

inline std::string_view to_string(ModuleKind k) {
    switch (k) {
        case ModuleKind::core: return "core";
        case ModuleKind::brick: return "brick";
        case ModuleKind::hinge: return "hinge";
    }
    return "core";
}

inline ModuleKind module_kind_from_string(std::string_view s) {
    if (s == "core") return ModuleKind::core;
    if (s == "brick") return ModuleKind::brick;
    if (s == "hinge") return ModuleKind::hinge;
    throw std::invalid_argument("unknown module kind: " + std::string(s));
}

struct Vec3i {
    int x = 0;
    int y = 0;
    int z = 0;
    friend bool operator==(const Vec3i&, const Vec3i&) = default;
    friend auto operator<=>(const Vec3i&, const Vec3i&) = default;
    friend Vec3i operator+(Vec3i a, Vec3i b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3i operator-(Vec3i a) { return {-a.x, -a.y, -a.z}; }
};

inline constexpr Vec3i cross(Vec3i a, Vec3i b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline constexpr std::size_t kMaxModules = 10;

/// Attachment sockets per module kind, in the order they are explored.
/// core: front, left, right, back; brick: front, left, right; hinge: front.
enum class Socket { front, left, right, back };

inline constexpr std::array<Socket, 4> kCoreSockets = {Socket::front, Socket::left, Socket::right, Socket::back};
inline constexpr std::array<Socket, 3> kBrickSockets = {Socket::front, Socket::left, Socket::right};
inline constexpr std::array<Socket, 1> kHingeSockets = {Socket::front};

inline constexpr std::span<const Socket> sockets_of(ModuleKind k) {
    switch (k) {
        case ModuleKind::core: return kCoreSockets;
        case ModuleKind::brick: return kBrickSockets;
        case ModuleKind::hinge: return kHingeSockets;
    }
    return {};
}

struct Module {
    int id = 0;
    ModuleKind kind = ModuleKind::core;
    int rotation = 0;  // degrees, 0 or 90
    int parent = -1;
    int socket = -1;  // index into sockets_of(parent kind)
    int depth = 0;
    Vec3i position;
    Vec3i forward{0, 1, 0};
    Vec3i up{0, 0, 1};  // already includes this module's own rotation

    Cell cell() const { return {position.x, position.y}; }
    friend bool operator==(const Module&, const Module&) = default;
};

/// Direction of a socket in world coordinates for a module with the given frame.
inline constexpr Vec3i socket_direction(Socket s, Vec3i forward, Vec3i up) {
    const Vec3i left = cross(up, forward);
    switch (s) {
        case Socket::front: return forward;
        case Socket::left: return left;
        case Socket::right: return -left;
        case Socket::back: return -forward;
    }
    return forward;
}

class ModuleTree {
public:
    ModuleTree() { modules_.push_back(Module{}); }

    const std::vector<Module>& modules() const { return modules_; }
    std::size_t size() const { return modules_.size(); }
    const Module& at(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= modules_.size()) {
            throw std::out_of_range("unknown module id " + std::to_string(id));
        }
        return modules_[static_cast<std::size_t>(id)];
    }
    const Module& core() const { return modules_.front(); }

    /// Children of `id` ordered by socket.
    std::vector<int> children(int id) const {
        std::vector<int> out;
        for (const auto& m : modules_) {
            if (m.parent == id) out.push_back(m.id);
        }
        std::sort(out.begin(), out.end(), [&](int a, int b) { return at(a).socket < at(b).socket; });
        return out;
    }

    /// Hinge module ids in breadth-first (construction) order.
    std::vector<int> joints() const {
        std::vector<int> out;
        for (const auto& m : modules_) {
            if (m.kind == ModuleKind::hinge) out.push_back(m.id);
        }
        return out;
    }

    void append(Module m) {
        m.id = static_cast<int>(modules_.size());
        modules_.push_back(m);
    }

    friend bool operator==(const ModuleTree&, const ModuleTree&) = default;

private:
    std::vector<Module> modules_;
};

/// Grows a body with a query callable `(x, y, z, depth) -> std::array<double, 5>`
/// whose outputs are scores for (brick, hinge, empty, rotation 0, rotation 90).
/// The highest score wins, ties resolve to the earlier output.
///
/// A slot whose cell is already taken ends that branch. The vertical column
/// above and below the core (grid2 cell (0, 0)) counts as taken, since the
/// brain genome has no row for it.
template <typename Query>
    requires std::invocable<Query&, double, double, double, double>
ModuleTree develop_body(Query&& query) {
    ModuleTree tree;
    std::set<Vec3i> occupied{tree.core().position};
    std::deque<int> open{0};
    while (!open.empty() && tree.size() < kMaxModules) {
        const Module parent = tree.at(open.front());
        open.pop_front();
        auto sockets = sockets_of(parent.kind);
        for (std::size_t s = 0; s < sockets.size() && tree.size() < kMaxModules; ++s) {
            const Vec3i dir = socket_direction(sockets[s], parent.forward, parent.up);
            const Vec3i pos = parent.position + dir;
            if (occupied.contains(pos) || (pos.x == 0 && pos.y == 0)) continue;
            const int depth = parent.depth + 1;
            const std::array<double, 5> out = query(static_cast<double>(pos.x), static_cast<double>(pos.y),
                                                    static_cast<double>(pos.z), static_cast<double>(depth));
            const auto type = std::max_element(out.begin(), out.begin() + 3) - out.begin();
            if (type == 2) continue;
            Module m;
            m.kind = type == 0 ? ModuleKind::brick : ModuleKind::hinge;
            m.rotation = out[4] > out[3] ? 90 : 0;
            m.parent = parent.id;
            m.socket = static_cast<int>(s);
            m.depth = depth;
            m.position = pos;
            m.forward = dir;
            m.up = m.rotation == 90 ? cross(dir, parent.up) : parent.up;
            tree.append(m);
            occupied.insert(pos);
            open.push_back(tree.modules().back().id);
        }
    }
    return tree;
}

inline ModuleTree develop_body(const BodyGenotype& g) {
    return develop_body([&g](double x, double y, double z, double d) { return query(g, x, y, z, d); });
}

/// Number of edges on the tree path between two modules.
inline int tree_distance(const ModuleTree& t, int a, int b) {
    const Module* ma = &t.at(a);
    const Module* mb = &t.at(b);
    int dist = 0;
    while (ma->depth > mb->depth) {
        ma = &t.at(ma->parent);
        ++dist;
    }
    while (mb->depth > ma->depth) {
        mb = &t.at(mb->parent);
        ++dist;
    }
    while (ma->id != mb->id) {
        ma = &t.at(ma->parent);
        mb = &t.at(mb->parent);
        dist += 2;
    }
    return dist;
}

// Nested-list form: [kind, rotation, socket, [children...]], children in socket order.
inline nlohmann::json to_json(const ModuleTree& t, int id = 0) {
    const Module& m = t.at(id);
    nlohmann::json kids = nlohmann::json::array();
    for (int c : t.children(id)) kids.push_back(to_json(t, c));
    return nlohmann::json::array({to_string(m.kind), m.rotation, m.socket, kids});
}

/// Short label used by tree comparisons: kind initial + rotation, e.g. "H90".
inline std::string module_label(const Module& m) {
    const char k = m.kind == ModuleKind::core ? 'C' : (m.kind == ModuleKind::brick ? 'B' : 'H');
    return std::string(1, k) + std::to_string(m.rotation);
}

}  // namespace lamarck
