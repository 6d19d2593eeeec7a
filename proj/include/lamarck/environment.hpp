#pragma once

// Terrains, environment-change schedules and the point-navigation task.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

enum class TerrainKind { flat, rugged };

inline std::string_view to_string(TerrainKind k) { return k == TerrainKind::flat ? "flat" : "rugged"; }

inline TerrainKind terrain_kind_from_string(std::string_view s) {
    if (s == "flat") return TerrainKind::flat;
    if (s == "rugged") return TerrainKind::rugged;
    throw std::invalid_argument("unknown terrain: " + std::string(s));
}

inline constexpr double kArenaHalfWidth = 5.0;

/// Height field over the 10 x 10 m arena. Rugged terrain is two octaves of
/// seeded value noise; flat terrain is identically zero.
class Terrain {
public:
    Terrain() = default;
    Terrain(TerrainKind kind, double amplitude, double wavelength, std::uint64_t seed)
        : kind_(kind), amplitude_(amplitude), wavelength_(wavelength), seed_(seed) {
        if (kind == TerrainKind::rugged && !(amplitude >= 0.0 && wavelength > 0.0)) {
            throw std::invalid_argument("rugged terrain needs amplitude >= 0 and wavelength > 0");
        }
    }

    static Terrain flat() { return {}; }

    TerrainKind kind() const { return kind_; }
    double amplitude() const { return amplitude_; }
    double wavelength() const { return wavelength_; }
    std::uint64_t seed() const { return seed_; }
    std::string id() const { return std::string(to_string(kind_)); }

    double height(double x, double y) const {
        if (kind_ == TerrainKind::flat) return 0.0;
        double h = 0.0;
        double norm = 0.0;
        double scale = 1.0;
        for (int octave = 0; octave < 2; ++octave) {
            const double freq = static_cast<double>(1 << octave) / wavelength_;
            h += scale * value_noise(x * freq, y * freq, octave);
            norm += scale;
            scale *= 0.5;
        }
        return amplitude_ * h / norm;
    }

    /// Magnitude of the height gradient (central differences).
    double slope(double x, double y) const {
        if (kind_ == TerrainKind::flat) return 0.0;
        constexpr double e = 1e-4;
        const double gx = (height(x + e, y) - height(x - e, y)) / (2 * e);
        const double gy = (height(x, y + e) - height(x, y - e)) / (2 * e);
        return std::hypot(gx, gy);
    }

    friend bool operator==(const Terrain&, const Terrain&) = default;

private:
    double lattice(std::int64_t ix, std::int64_t iy, int octave) const {
        std::uint64_t h = detail::splitmix64(seed_ ^ static_cast<std::uint64_t>(octave) * 0x632BE59BD9B4E019ULL);
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(ix));
        h = detail::splitmix64(h ^ static_cast<std::uint64_t>(iy));
        return static_cast<double>(h >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    }

    static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }

    double value_noise(double x, double y, int octave) const {
        const double fx = std::floor(x);
        const double fy = std::floor(y);
        const auto ix = static_cast<std::int64_t>(fx);
        const auto iy = static_cast<std::int64_t>(fy);
        const double tx = fade(x - fx);
        const double ty = fade(y - fy);
        const double a = lattice(ix, iy, octave);
        const double b = lattice(ix + 1, iy, octave);
        const double c = lattice(ix, iy + 1, octave);
        const double d = lattice(ix + 1, iy + 1, octave);
        const double top = a + (b - a) * tx;
        const double bottom = c + (d - c) * tx;
        return top + (bottom - top) * ty;
    }

    TerrainKind kind_ = TerrainKind::flat;
    double amplitude_ = 0.0;
    double wavelength_ = 1.0;
    std::uint64_t seed_ = 0;
};

struct TerrainParams {
    double rugged_amplitude = 0.12;
    double rugged_wavelength = 0.8;
    std::uint64_t seed = 7;
};

inline Terrain make_terrain(TerrainKind kind, const TerrainParams& p) {
    if (kind == TerrainKind::flat) return Terrain::flat();
    return Terrain(TerrainKind::rugged, p.rugged_amplitude, p.rugged_wavelength, p.seed);
}

// --- schedules ----------------------------------------------------------------

struct EnvironmentPhase {
    Terrain terrain;
    int start = 0;
    friend bool operator==(const EnvironmentPhase&, const EnvironmentPhase&) = default;
};

struct EnvironmentSchedule {
    std::vector<EnvironmentPhase> phases;
    int generations = 0;

    /// Terrain active at generation g; the last phase stays active past the end.
    const Terrain& terrain_at(int g) const {
        const EnvironmentPhase* current = &phases.front();
        for (const auto& p : phases) {
            if (p.start <= g) current = &p;
        }
        return current->terrain;
    }

    bool is_change(int g) const {
        return std::any_of(phases.begin() + 1, phases.end(), [g](const auto& p) { return p.start == g; });
    }
};

struct SetupName {
    TerrainKind first = TerrainKind::flat;
    int changes = 0;
};

inline constexpr std::array<std::string_view, 6> kSetupNames = {"Flat_0", "Rugged_0", "Flat_2",
                                                                 "Rugged_2", "Flat_5", "Rugged_5"};

inline SetupName parse_setup(std::string_view name) {
    if (std::find(kSetupNames.begin(), kSetupNames.end(), name) == kSetupNames.end()) {
        throw std::invalid_argument("unknown setup '" + std::string(name) +
                                    "' (expected Flat_0, Rugged_0, Flat_2, Rugged_2, Flat_5 or Rugged_5)");
    }
    SetupName s;
    s.first = name.starts_with("Flat") ? TerrainKind::flat : TerrainKind::rugged;
    s.changes = name.back() - '0';
    return s;
}

/// Alternating phases starting with the named terrain; change j of c happens at
/// generation ceil(G * j / (c + 1)).
inline EnvironmentSchedule make_schedule(std::string_view setup, int generations, const TerrainParams& terrain = {}) {
    const SetupName s = parse_setup(setup);
    if (generations < s.changes + 1) {
        throw std::invalid_argument("setup " + std::string(setup) + " needs at least " +
                                    std::to_string(s.changes + 1) + " generations");
    }
    EnvironmentSchedule out;
    out.generations = generations;
    TerrainKind kind = s.first;
    out.phases.push_back({make_terrain(kind, terrain), 0});
    for (int j = 1; j <= s.changes; ++j) {
        kind = kind == TerrainKind::flat ? TerrainKind::rugged : TerrainKind::flat;
        const int start = static_cast<int>((static_cast<long long>(generations) * j + s.changes) / (s.changes + 1));
        out.phases.push_back({make_terrain(kind, terrain), start});
    }
    return out;
}

// --- task ----------------------------------------------------------------------

struct TaskSpec {
    std::vector<Vec2> targets{{1.0, -1.0}, {0.0, -2.0}};
    Vec2 start{0.0, 0.0};
    double target_radius = 0.01;
    double duration = 60.0;   // seconds
    double sample_rate = 5.0;  // Hz
    double path_penalty = 0.1;

    int sample_count() const { return static_cast<int>(std::lround(duration * sample_rate)) + 1; }
};

struct TargetHits {
    int reached = 0;
    std::vector<int> sample_index;  // sample at which each reached target was hit
};

namespace detail {

/// Parameter in [0, 1] of the point of segment ab closest to p.
inline double closest_param(Vec2 a, Vec2 b, Vec2 p) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    if (len2 == 0.0) return 0.0;
    return std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
}

inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return {a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t}; }

}  // namespace detail

/// Incremental, in-order target tracker. The sampled path is treated as a
/// polyline: a target is hit when some point of a segment comes within the
/// radius. Later targets only count once all earlier ones are hit.
class TargetTracker {
public:
    explicit TargetTracker(const TaskSpec& task) : task_(&task) {}

    void start(Vec2 p) {
        last_ = p;
        started_ = true;
        while (next_ < task_->targets.size() && distance(p, task_->targets[next_]) <= task_->target_radius) {
            hits_.push_back(0);
            ++next_;
        }
    }

    void advance(Vec2 p, int sample) {
        if (!started_) {
            start(p);
            return;
        }
        Vec2 a = last_;
        while (next_ < task_->targets.size()) {
            const Vec2 target = task_->targets[next_];
            const double t = detail::closest_param(a, p, target);
            const Vec2 c = detail::lerp(a, p, t);
            if (distance(c, target) > task_->target_radius) break;
            hits_.push_back(sample);
            ++next_;
            a = c;
        }
        last_ = p;
    }

    std::size_t next_target() const { return next_; }
    bool done() const { return next_ >= task_->targets.size(); }
    const std::vector<int>& hits() const { return hits_; }

private:
    const TaskSpec* task_;
    std::size_t next_ = 0;
    Vec2 last_{};
    bool started_ = false;
    std::vector<int> hits_;
};

inline TargetHits targets_reached(std::span<const Vec2> path, const TaskSpec& task) {
    TargetTracker tracker(task);
    for (std::size_t i = 0; i < path.size(); ++i) tracker.advance(path[i], static_cast<int>(i));
    return {static_cast<int>(tracker.hits().size()), tracker.hits()};
}

inline double path_length(std::span<const Vec2> path) {
    double len = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) len += distance(path[i - 1], path[i]);
    return len;
}

/// Point-navigation fitness:
///   F = sum_{i<=k} |P_i - P_{i-1}| + (|P_{k+1} - P_k| - |P_T - P_{k+1}|) - omega * L
/// with P_0 the start point, P_T the final position and L the sampled path length.
/// The middle term is 0 once every target has been reached.
inline double fitness(std::span<const Vec2> path, const TaskSpec& task) {
    if (path.empty()) throw std::invalid_argument("fitness of an empty trajectory");
    const int k = targets_reached(path, task).reached;
    auto point = [&](int i) { return i == 0 ? task.start : task.targets[static_cast<std::size_t>(i - 1)]; };
    double f = 0.0;
    for (int i = 1; i <= k; ++i) f += distance(point(i), point(i - 1));
    if (static_cast<std::size_t>(k) < task.targets.size()) {
        f += distance(point(k + 1), point(k)) - distance(path.back(), point(k + 1));
    }
    return f - task.path_penalty * path_length(path);
}

}  // namespace lamarck
