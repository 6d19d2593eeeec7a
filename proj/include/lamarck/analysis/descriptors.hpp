#pragma once

// Eight normalized morphological traits of a module tree.

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <string_view>
#include <utility>

#include "lamarck/morphology.hpp"

namespace lamarck {

struct DescriptorVector {
    double branching = 0.0;
    double limbs = 0.0;
    double length_of_limbs = 0.0;
    double coverage = 0.0;
    double joints = 0.0;
    double proportion = 0.0;
    double symmetry = 0.0;
    double size = 0.0;

    static constexpr std::size_t kSize = 8;
    static constexpr std::array<std::string_view, kSize> kNames = {
        "branching", "limbs", "length_of_limbs", "coverage", "joints", "proportion", "symmetry", "size"};

    std::array<double, kSize> values() const {
        return {branching, limbs, length_of_limbs, coverage, joints, proportion, symmetry, size};
    }
};

/// Largest possible number of limbs (leaf modules) for a body of n modules.
inline int max_limbs(int n) {
    if (n < 6) return std::max(0, n - 1);
    return 2 * ((n - 6) / 3) + (n - 6) % 3 + 4;
}

inline DescriptorVector descriptors(const ModuleTree& t) {
    DescriptorVector d;
    const int n = static_cast<int>(t.size());
    const auto& mods = t.modules();

    std::vector<int> child_count(mods.size(), 0);
    for (const auto& m : mods) {
        if (m.parent >= 0) ++child_count[static_cast<std::size_t>(m.parent)];
    }

    int branching_modules = 0;
    int leaves = 0;
    int hinges = 0;
    int max_depth = 0;
    for (const auto& m : mods) {
        const int c = child_count[static_cast<std::size_t>(m.id)];
        if (c >= 3) ++branching_modules;
        if (c == 0 && m.kind != ModuleKind::core) ++leaves;
        if (m.kind == ModuleKind::hinge) ++hinges;
        max_depth = std::max(max_depth, m.depth);
    }

    const int max_branching = (n - 1) / 3;
    d.branching = max_branching > 0 ? static_cast<double>(branching_modules) / max_branching : 0.0;
    const int lmax = max_limbs(n);
    d.limbs = lmax > 0 ? static_cast<double>(leaves) / lmax : 0.0;
    d.length_of_limbs = n > 1 ? static_cast<double>(max_depth) / (n - 1) : 0.0;
    d.joints = n > 1 ? static_cast<double>(hinges) / (n - 1) : 0.0;

    std::set<std::pair<int, int>> cells;
    int xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    for (const auto& m : mods) {
        cells.insert({m.position.x, m.position.y});
        xmin = std::min(xmin, m.position.x);
        xmax = std::max(xmax, m.position.x);
        ymin = std::min(ymin, m.position.y);
        ymax = std::max(ymax, m.position.y);
    }
    const int width = xmax - xmin + 1;
    const int depth = ymax - ymin + 1;
    d.coverage = static_cast<double>(cells.size()) / (width * depth);
    d.proportion = static_cast<double>(std::min(width, depth)) / std::max(width, depth);

    // Reflections about the two horizontal grid axes through the core; a
    // module matches if a module of the same kind sits at its mirror image.
    if (n > 1) {
        std::set<std::pair<Vec3i, ModuleKind>> placed;
        for (const auto& m : mods) placed.insert({m.position, m.kind});
        int match_x = 0;
        int match_y = 0;
        for (const auto& m : mods) {
            if (m.kind == ModuleKind::core) continue;
            const Vec3i p = m.position;
            if (placed.contains({Vec3i{-p.x, p.y, p.z}, m.kind})) ++match_x;
            if (placed.contains({Vec3i{p.x, -p.y, p.z}, m.kind})) ++match_y;
        }
        d.symmetry = static_cast<double>(std::max(match_x, match_y)) / (n - 1);
    } else {
        d.symmetry = 1.0;
    }

    d.size = static_cast<double>(n) / static_cast<double>(kMaxModules);
    return d;
}

/// Euclidean distance between descriptor vectors.
inline double descriptor_distance(const DescriptorVector& a, const DescriptorVector& b) {
    const auto va = a.values();
    const auto vb = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += (va[i] - vb[i]) * (va[i] - vb[i]);
    return std::sqrt(s);
}

}  // namespace lamarck
