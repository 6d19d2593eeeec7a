#pragma once

// Experiment configuration as a plain key = value text file. Lines starting
// with '#' are comments. Unknown keys are an error. See docs/config.md.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "lamarck/evolution.hpp"

namespace lamarck {

struct ExperimentConfig {
    EvolutionConfig evolution;
    int repetitions = 10;
    std::string output = "runs";
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

inline std::string format_real(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("cannot format number");
    return std::string(buf, end);
}

inline double parse_real(const std::string& key, const std::string& v) {
    double out = 0.0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) throw ConfigError("config key '" + key + "': not a number: " + v);
    return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int out = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || end != v.data() + v.size()) throw ConfigError("config key '" + key + "': not an integer: " + v);
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key '" + key + "': not a boolean: " + v);
}

inline std::vector<Vec2> parse_targets(const std::string& key, const std::string& v) {
    std::vector<Vec2> out;
    std::stringstream ss(v);
    std::string point;
    while (std::getline(ss, point, ';')) {
        const auto comma = point.find(',');
        if (comma == std::string::npos) throw ConfigError("config key '" + key + "': expected x,y;x,y...");
        out.push_back({parse_real(key, trim(point.substr(0, comma))), parse_real(key, trim(point.substr(comma + 1)))});
    }
    return out;
}

inline std::string format_targets(const std::vector<Vec2>& t) {
    std::string out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ';';
        out += format_real(t[i].x) + ',' + format_real(t[i].y);
    }
    return out;
}

struct Field {
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

#define LAMARCK_REAL(path)                                                                   \
    Field {                                                                                  \
        [](const ExperimentConfig& c) { return format_real(c.path); },                       \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.path = parse_real(k, v); } \
    }
#define LAMARCK_INT(path, type)                                                              \
    Field {                                                                                  \
        [](const ExperimentConfig& c) { return std::to_string(c.path); },                    \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.path = parse_int<type>(k, v); } \
    }
#define LAMARCK_BOOL(path)                                                                   \
    Field {                                                                                  \
        [](const ExperimentConfig& c) { return std::string(c.path ? "true" : "false"); },    \
            [](ExperimentConfig& c, const std::string& k, const std::string& v) { c.path = parse_bool(k, v); } \
    }

/// Ordered key table; the order is the order of the config echo.
inline const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = {
        {"setup", Field{[](const ExperimentConfig& c) { return c.evolution.setup; },
                        [](ExperimentConfig& c, const std::string&, const std::string& v) {
                            parse_setup(v);
                            c.evolution.setup = v;
                        }}},
        {"mode", Field{[](const ExperimentConfig& c) { return std::string(to_string(c.evolution.mode)); },
                       [](ExperimentConfig& c, const std::string&, const std::string& v) {
                           c.evolution.mode = inheritance_mode_from_string(v);
                       }}},
        {"seed", LAMARCK_INT(evolution.seed, std::uint64_t)},
        {"population", LAMARCK_INT(evolution.population, int)},
        {"offspring", LAMARCK_INT(evolution.offspring, int)},
        {"generations", LAMARCK_INT(evolution.generations, int)},
        {"tournament", LAMARCK_INT(evolution.tournament, int)},
        {"repetitions", LAMARCK_INT(repetitions, int)},
        {"body.crossover_probability", LAMARCK_REAL(evolution.body_crossover_probability)},
        {"body.mutation_probability", LAMARCK_REAL(evolution.body_mutation.probability)},
        {"body.weight_rate", LAMARCK_REAL(evolution.body_mutation.weight_rate)},
        {"body.weight_sd", LAMARCK_REAL(evolution.body_mutation.weight_sd)},
        {"body.add_connection_rate", LAMARCK_REAL(evolution.body_mutation.add_connection_rate)},
        {"body.add_node_rate", LAMARCK_REAL(evolution.body_mutation.add_node_rate)},
        {"body.toggle_rate", LAMARCK_REAL(evolution.body_mutation.toggle_rate)},
        {"brain.mutation_probability", LAMARCK_REAL(evolution.brain_mutation.probability)},
        {"brain.mutation_sd", LAMARCK_REAL(evolution.brain_mutation.sd)},
        {"learner.population", LAMARCK_INT(evolution.learner.population, int)},
        {"learner.candidates", LAMARCK_INT(evolution.learner.candidates, int)},
        {"learner.top", LAMARCK_INT(evolution.learner.top, int)},
        {"learner.scale", LAMARCK_REAL(evolution.learner.scale)},
        {"learner.crossover", LAMARCK_REAL(evolution.learner.crossover)},
        {"learner.iterations", LAMARCK_INT(evolution.learner.iterations, int)},
        {"learner.init_sd", LAMARCK_REAL(evolution.learner.init_sd)},
        {"learner.learn_initial", LAMARCK_BOOL(evolution.learn_initial)},
        {"reevaluate_learned", LAMARCK_BOOL(evolution.reevaluate_learned)},
        {"task.targets", Field{[](const ExperimentConfig& c) { return format_targets(c.evolution.task.targets); },
                               [](ExperimentConfig& c, const std::string& k, const std::string& v) {
                                   c.evolution.task.targets = parse_targets(k, v);
                               }}},
        {"task.target_radius", LAMARCK_REAL(evolution.task.target_radius)},
        {"task.duration", LAMARCK_REAL(evolution.task.duration)},
        {"task.sample_rate", LAMARCK_REAL(evolution.task.sample_rate)},
        {"task.path_penalty", LAMARCK_REAL(evolution.task.path_penalty)},
        {"terrain.amplitude", LAMARCK_REAL(evolution.terrain.rugged_amplitude)},
        {"terrain.wavelength", LAMARCK_REAL(evolution.terrain.rugged_wavelength)},
        {"terrain.seed", LAMARCK_INT(evolution.terrain.seed, std::uint64_t)},
        {"surrogate.thrust", LAMARCK_REAL(evolution.surrogate.thrust)},
        {"surrogate.drag", LAMARCK_REAL(evolution.surrogate.drag)},
        {"surrogate.turning", LAMARCK_REAL(evolution.surrogate.turning)},
        {"surrogate.dt", LAMARCK_REAL(evolution.surrogate.dt)},
        {"surrogate.initial_heading", LAMARCK_REAL(evolution.surrogate.initial_heading)},
        {"steering.exponent", LAMARCK_INT(evolution.surrogate.steering_exponent, int)},
        {"steering.convention",
         Field{[](const ExperimentConfig& c) { return std::string(to_string(c.evolution.surrogate.steering)); },
               [](ExperimentConfig& c, const std::string&, const std::string& v) {
                   c.evolution.surrogate.steering = steering_convention_from_string(v);
               }}},
    };
    return table;
}

#undef LAMARCK_REAL
#undef LAMARCK_INT
#undef LAMARCK_BOOL

}  // namespace detail

/// Sets one key. Throws ConfigError for unknown keys or malformed values.
inline void set_option(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, field] : detail::fields()) {
        if (name == key) {
            try {
                field.set(cfg, key, value);
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError("config key '" + key + "': " + e.what());
            }
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

inline void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        set_option(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
    }
}

inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    apply_config_text(cfg, ss.str());
}

/// Canonical key = value listing of every option.
inline std::string config_echo(const ExperimentConfig& cfg) {
    std::string out;
    for (const auto& [name, field] : detail::fields()) out += name + " = " + field.get(cfg) + "\n";
    return out;
}

/// Named parameter sets. "paper" is the full-scale default; "desk" is a small
/// profile for quick runs (8 + 4 x 6 individuals, 20 assessments each, 12 s rollouts).
inline void apply_profile(ExperimentConfig& cfg, std::string_view profile) {
    if (profile == "paper") {
        const ExperimentConfig fresh;
        cfg.evolution.population = fresh.evolution.population;
        cfg.evolution.offspring = fresh.evolution.offspring;
        cfg.evolution.generations = fresh.evolution.generations;
        cfg.evolution.learner = fresh.evolution.learner;
        cfg.evolution.task.duration = fresh.evolution.task.duration;
        return;
    }
    if (profile == "desk") {
        cfg.evolution.population = 8;
        cfg.evolution.offspring = 4;
        cfg.evolution.generations = 6;
        cfg.evolution.learner.population = 5;
        cfg.evolution.learner.candidates = 15;
        cfg.evolution.learner.top = 5;
        cfg.evolution.learner.iterations = 2;
        cfg.evolution.task.duration = 12.0;
        return;
    }
    throw ConfigError("unknown profile '" + std::string(profile) + "' (expected paper or desk)");
}

}  // namespace lamarck
