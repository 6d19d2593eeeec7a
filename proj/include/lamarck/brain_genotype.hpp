#pragma once

// Brain genome: a fixed 440 x 14 table of CPG weights addressed by the 2D grid
// position of a joint. Each row is one cell of the 21 x 21 body grid (centre
// excluded); columns 0..12 are the cells within Manhattan distance 2 of it and
// column 13 is the link to another joint projected onto the same cell.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline constexpr int kGridRadius = 10;
inline constexpr int kGridSide = 2 * kGridRadius + 1;
inline constexpr std::size_t kBrainRows = kGridSide * kGridSide - 1;
inline constexpr std::size_t kNeighbourColumns = 13;
inline constexpr std::size_t kSameCellColumn = kNeighbourColumns;
inline constexpr std::size_t kBrainColumns = kNeighbourColumns + 1;

static_assert(kBrainRows == 440, "one row per non-centre cell of the 21x21 grid");
static_assert(kBrainColumns == 14, "13 neighbourhood columns + 1 same-cell column");

/// The 13 offsets with |dx| + |dy| <= 2, in lexicographic (dx, dy) order.
inline constexpr std::array<Cell, kNeighbourColumns> kNeighbourOffsets = {{
    {-2, 0}, {-1, -1}, {-1, 0}, {-1, 1}, {0, -2}, {0, -1}, {0, 0},
    {0, 1},  {0, 2},   {1, -1}, {1, 0},  {1, 1},  {2, 0},
}};

/// Column holding a joint's own oscillator weight: the (0, 0) offset.
inline constexpr std::size_t kInternalColumn = 6;

static_assert(kNeighbourOffsets[kInternalColumn] == Cell{0, 0});

inline constexpr bool in_grid(Cell c) {
    return c.x >= -kGridRadius && c.x <= kGridRadius && c.y >= -kGridRadius && c.y <= kGridRadius;
}

/// Row of a cell; throws for the centre cell or cells outside the grid.
inline std::size_t row_of(Cell c) {
    if (!in_grid(c) || (c.x == 0 && c.y == 0)) {
        throw std::out_of_range("no brain row for cell (" + std::to_string(c.x) + "," +
                                std::to_string(c.y) + ")");
    }
    const auto flat = static_cast<std::size_t>((c.x + kGridRadius) * kGridSide + (c.y + kGridRadius));
    constexpr std::size_t centre = kGridRadius * kGridSide + kGridRadius;
    return flat < centre ? flat : flat - 1;
}

inline Cell cell_of(std::size_t row) {
    if (row >= kBrainRows) throw std::out_of_range("brain row out of range");
    constexpr std::size_t centre = kGridRadius * kGridSide + kGridRadius;
    const std::size_t flat = row < centre ? row : row + 1;
    return {static_cast<int>(flat / kGridSide) - kGridRadius,
            static_cast<int>(flat % kGridSide) - kGridRadius};
}

/// Column for a relative offset within the neighbourhood, or -1.
inline constexpr int column_of(Cell offset) {
    for (std::size_t i = 0; i < kNeighbourOffsets.size(); ++i) {
        if (kNeighbourOffsets[i] == offset) return static_cast<int>(i);
    }
    return -1;
}

struct BrainAddress {
    std::size_t row = 0;
    std::size_t column = 0;
    friend bool operator==(const BrainAddress&, const BrainAddress&) = default;
    friend auto operator<=>(const BrainAddress&, const BrainAddress&) = default;
};

class BrainGenotype {
public:
    BrainGenotype() : weights_(kBrainRows * kBrainColumns, 0.0) {}

    explicit BrainGenotype(std::vector<double> weights) : weights_(std::move(weights)) {
        if (weights_.size() != kBrainRows * kBrainColumns) {
            throw std::invalid_argument("brain genotype needs 440x14 entries, got " +
                                        std::to_string(weights_.size()));
        }
        for (double w : weights_) {
            if (!std::isfinite(w)) throw std::invalid_argument("brain genotype entry is not finite");
        }
    }

    static constexpr std::size_t rows() { return kBrainRows; }
    static constexpr std::size_t columns() { return kBrainColumns; }

    double operator()(std::size_t row, std::size_t col) const { return weights_.at(row * kBrainColumns + col); }
    double& operator()(std::size_t row, std::size_t col) { return weights_.at(row * kBrainColumns + col); }
    double operator[](BrainAddress a) const { return (*this)(a.row, a.column); }
    double& operator[](BrainAddress a) { return (*this)(a.row, a.column); }

    /// Row-major view of all 6160 entries.
    std::span<const double> flat() const { return weights_; }
    std::span<double> flat() { return weights_; }

    friend bool operator==(const BrainGenotype&, const BrainGenotype&) = default;

private:
    std::vector<double> weights_;
};

inline BrainGenotype random_brain(Rng& rng) {
    BrainGenotype g;
    for (double& w : g.flat()) w = uniform(rng, -1.0, 1.0);
    return g;
}

/// Adds N(0, sd) to each entry independently with probability `p`.
/// Draw order per entry: one uniform, then a gaussian only if selected.
inline void gaussian_mutate(std::span<double> values, Rng& rng, double p, double sd) {
    for (double& v : values) {
        if (uniform01(rng) < p) v += gaussian(rng, 0.0, sd);
    }
}

struct BrainMutationParams {
    double probability = 0.8;
    double sd = 0.5;
};

inline BrainGenotype brain_mutate(const BrainGenotype& g, Rng& rng, const BrainMutationParams& params = {}) {
    BrainGenotype out = g;
    gaussian_mutate(out.flat(), rng, params.probability, params.sd);
    return out;
}

/// Uniform crossover; each entry comes from either parent with equal odds.
/// The evolution loop reproduces brains asexually and does not call this.
inline BrainGenotype brain_crossover(const BrainGenotype& a, const BrainGenotype& b, Rng& rng) {
    BrainGenotype out = a;
    auto src = b.flat();
    auto dst = out.flat();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        if (uniform01(rng) >= 0.5) dst[i] = src[i];
    }
    return out;
}

}  // namespace lamarck
