#pragma once

// Line-delimited JSON run log. One record per line:
//   header        schema name/version and the full config
//   individual    every newborn, after learning
//   reevaluation  survivor fitness before/after a terrain change
//   generation    end-of-generation checkpoint (survivors, innovation tracker)
// Wall-clock times go to a separate timing file so that the log itself is a
// pure function of (config, seed). See docs/runlog.md.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lamarck/config.hpp"
#include "lamarck/evolution.hpp"
#include "lamarck/genotype.hpp"

namespace lamarck {

inline constexpr const char* kLogSchema = "lamarck-runlog";
inline constexpr int kLogMajorVersion = 1;
inline constexpr int kLogMinorVersion = 0;

inline constexpr const char* kLogFile = "log.jsonl";
inline constexpr const char* kTimingFile = "timing.jsonl";
inline constexpr const char* kConfigFile = "config.txt";

/// Missing, corrupt or incompatible log data.
class LogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

// NaN and infinities are stored as null.
inline nlohmann::json real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

inline double real_of(const nlohmann::json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline nlohmann::json reals(std::span<const double> v) {
    auto out = nlohmann::json::array();
    for (double x : v) out.push_back(real(x));
    return out;
}

inline std::vector<double> reals_of(const nlohmann::json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(real_of(x));
    return out;
}

inline nlohmann::json config_object(const ExperimentConfig& cfg) {
    nlohmann::json out = nlohmann::json::object();
    std::istringstream in(config_echo(cfg));
    std::string line;
    while (std::getline(in, line)) {
        const auto eq = line.find(" = ");
        out[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return out;
}

}  // namespace detail

// --- records ---------------------------------------------------------------------

struct IndividualRecord {
    int generation = 0;
    std::int64_t id = 0;
    std::vector<std::int64_t> parents;
    std::string terrain;
    Genotype genotype;                 // inheritable state after learning
    std::vector<double> learned;       // CPG weights used during the lifetime
    double fitness_before = 0.0;
    double fitness_after = 0.0;
    std::vector<double> learning_curve;
    int assessments = 0;
    std::uint64_t birth_hash = 0;
    std::uint64_t genotype_hash = 0;
    nlohmann::json tree;               // nested-list morphology
};

struct ReevaluationRecord {
    int generation = 0;
    std::string from;
    std::string to;
    std::vector<Reevaluation> pairs;
};

struct GenerationRecord {
    int generation = 0;
    std::string terrain;
    std::vector<std::int64_t> survivors;
    std::vector<double> fitness;
    nlohmann::json tracker;
    std::int64_t next_id = 0;
};

inline nlohmann::json header_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["type"] = "header";
    j["schema"] = kLogSchema;
    j["version"] = std::to_string(kLogMajorVersion) + "." + std::to_string(kLogMinorVersion);
    j["config"] = detail::config_object(cfg);
    return j;
}

inline nlohmann::json individual_json(const Individual& ind) {
    nlohmann::json j;
    j["type"] = "individual";
    j["generation"] = ind.generation();
    j["id"] = ind.id;
    j["parents"] = ind.genotype.lineage.parents;
    j["terrain"] = ind.terrain;
    j["body"] = to_json(ind.genotype.body);
    j["brain"] = detail::reals(ind.genotype.brain.flat());
    j["learned"] = detail::reals(ind.learned);
    j["fitness_before"] = detail::real(ind.fitness_before);
    j["fitness_after"] = detail::real(ind.fitness_after);
    j["learning_delta"] = detail::real(ind.fitness_after - ind.fitness_before);
    j["learning_curve"] = detail::reals(ind.learning_curve);
    j["assessments"] = ind.assessments;
    j["birth_hash"] = ind.birth_hash;
    j["genotype_hash"] = genotype_hash(ind.genotype);
    j["tree"] = to_json(ind.body);
    return j;
}

inline nlohmann::json reevaluation_json(int generation, const std::string& from, const std::string& to,
                                        const std::vector<Reevaluation>& pairs) {
    nlohmann::json j;
    j["type"] = "reevaluation";
    j["generation"] = generation;
    j["from"] = from;
    j["to"] = to;
    auto arr = nlohmann::json::array();
    for (const auto& p : pairs) arr.push_back({p.id, detail::real(p.old_fitness), detail::real(p.new_fitness)});
    j["pairs"] = std::move(arr);
    return j;
}

inline nlohmann::json generation_json(const GenerationSummary& s) {
    nlohmann::json j;
    j["type"] = "generation";
    j["generation"] = s.generation;
    j["terrain"] = s.terrain;
    j["survivors"] = s.survivors;
    j["fitness"] = detail::reals(s.fitness);
    j["tracker"] = s.tracker ? to_json(*s.tracker) : nlohmann::json(nullptr);
    j["next_id"] = s.next_id;
    return j;
}

inline IndividualRecord individual_from_json(const nlohmann::json& j) {
    IndividualRecord r;
    r.generation = j.at("generation").get<int>();
    r.id = j.at("id").get<std::int64_t>();
    r.parents = j.at("parents").get<std::vector<std::int64_t>>();
    r.terrain = j.at("terrain").get<std::string>();
    r.genotype.body = body_from_json(j.at("body"));
    r.genotype.brain = BrainGenotype(detail::reals_of(j.at("brain")));
    r.genotype.lineage = {r.parents, r.generation};
    r.learned = detail::reals_of(j.at("learned"));
    r.fitness_before = detail::real_of(j.at("fitness_before"));
    r.fitness_after = detail::real_of(j.at("fitness_after"));
    r.learning_curve = detail::reals_of(j.at("learning_curve"));
    r.assessments = j.at("assessments").get<int>();
    r.birth_hash = j.at("birth_hash").get<std::uint64_t>();
    r.genotype_hash = j.at("genotype_hash").get<std::uint64_t>();
    r.tree = j.at("tree");
    return r;
}

inline ReevaluationRecord reevaluation_from_json(const nlohmann::json& j) {
    ReevaluationRecord r;
    r.generation = j.at("generation").get<int>();
    r.from = j.at("from").get<std::string>();
    r.to = j.at("to").get<std::string>();
    for (const auto& p : j.at("pairs")) {
        r.pairs.push_back({p.at(0).get<std::int64_t>(), detail::real_of(p.at(1)), detail::real_of(p.at(2))});
    }
    return r;
}

inline GenerationRecord generation_from_json(const nlohmann::json& j) {
    GenerationRecord r;
    r.generation = j.at("generation").get<int>();
    r.terrain = j.at("terrain").get<std::string>();
    r.survivors = j.at("survivors").get<std::vector<std::int64_t>>();
    r.fitness = detail::reals_of(j.at("fitness"));
    r.tracker = j.at("tracker");
    r.next_id = j.at("next_id").get<std::int64_t>();
    if (r.survivors.size() != r.fitness.size()) throw LogError("generation record: survivors/fitness size mismatch");
    return r;
}

// --- reading ---------------------------------------------------------------------

struct RunLog {
    std::filesystem::path path;
    std::map<std::string, std::string> config;  // key -> value as echoed
    std::string version;
    std::vector<IndividualRecord> individuals;
    std::vector<ReevaluationRecord> reevaluations;
    std::vector<GenerationRecord> generations;
    bool truncated_tail = false;     // a partial last line was ignored
    std::uintmax_t complete_bytes = 0;  // file offset just after the last generation record

    const IndividualRecord* find(std::int64_t id) const {
        for (const auto& r : individuals) {
            if (r.id == id) return &r;
        }
        return nullptr;
    }

    ExperimentConfig experiment_config() const {
        ExperimentConfig cfg;
        for (const auto& [k, v] : config) set_option(cfg, k, v);
        return cfg;
    }
};

/// Parses a log file. Throws LogError on a missing file, malformed record, bad
/// schema or unknown major version. A final line without a newline (an
/// interrupted write) is ignored and flagged.
inline RunLog read_run_log(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LogError("cannot open run log " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string data = ss.str();

    RunLog log;
    log.path = path;
    std::size_t pos = 0;
    int lineno = 0;
    bool have_header = false;
    while (pos < data.size()) {
        const std::size_t nl = data.find('\n', pos);
        if (nl == std::string::npos) {
            log.truncated_tail = true;
            break;
        }
        const std::string line = data.substr(pos, nl - pos);
        ++lineno;
        const std::size_t line_end = nl + 1;
        pos = line_end;
        if (line.empty()) continue;

        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw LogError(path.string() + ":" + std::to_string(lineno) + ": malformed record: " + e.what());
        }
        try {
            const std::string type = j.at("type").get<std::string>();
            if (!have_header) {
                if (type != "header") throw LogError("first record is not a header");
                if (j.at("schema").get<std::string>() != kLogSchema) throw LogError("unknown log schema");
                log.version = j.at("version").get<std::string>();
                const int major = std::stoi(log.version.substr(0, log.version.find('.')));
                if (major != kLogMajorVersion) {
                    throw LogError("unsupported log version " + log.version + " (reader supports " +
                                   std::to_string(kLogMajorVersion) + ".x)");
                }
                for (const auto& [k, v] : j.at("config").items()) log.config[k] = v.get<std::string>();
                have_header = true;
                log.complete_bytes = line_end;
            } else if (type == "individual") {
                log.individuals.push_back(individual_from_json(j));
            } else if (type == "reevaluation") {
                log.reevaluations.push_back(reevaluation_from_json(j));
            } else if (type == "generation") {
                log.generations.push_back(generation_from_json(j));
                log.complete_bytes = line_end;
            } else {
                throw LogError("unknown record type '" + type + "'");
            }
        } catch (const LogError& e) {
            throw LogError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw LogError(path.string() + ":" + std::to_string(lineno) + ": invalid record: " + e.what());
        }
    }
    if (!have_header) throw LogError(path.string() + ": empty run log");
    return log;
}

/// Rebuilds the state after the last complete generation of `log`.
inline RunState state_from_log(const RunLog& log) {
    if (log.generations.empty()) throw LogError("run log has no complete generation to resume from");
    const GenerationRecord& last = log.generations.back();
    RunState st;
    st.generation = last.generation;
    st.next_id = last.next_id;
    st.terrain = last.terrain;
    st.tracker = tracker_from_json(last.tracker);
    for (std::size_t i = 0; i < last.survivors.size(); ++i) {
        const IndividualRecord* r = log.find(last.survivors[i]);
        if (!r) throw LogError("survivor " + std::to_string(last.survivors[i]) + " missing from the log");
        Individual ind;
        ind.id = r->id;
        ind.genotype = r->genotype;
        ind.body = develop_body(ind.genotype.body);
        ind.learned = r->learned;
        ind.fitness_before = r->fitness_before;
        ind.fitness_after = last.fitness[i];
        ind.terrain = last.terrain;
        ind.learning_curve = r->learning_curve;
        ind.assessments = r->assessments;
        ind.birth_hash = r->birth_hash;
        st.population.push_back(std::move(ind));
    }
    return st;
}

// --- writing ---------------------------------------------------------------------

/// Observer that appends records to a run directory. Optionally stops the run
/// after a given generation (used to simulate interruption).
class LogWriter : public RunObserver {
public:
    /// Opens `dir`/log.jsonl. With `append` the existing log is kept (resume).
    LogWriter(const std::filesystem::path& dir, bool append, std::optional<int> stop_after = std::nullopt)
        : stop_after_(stop_after), started_(std::chrono::steady_clock::now()) {
        const auto mode = std::ios::binary | (append ? std::ios::app : std::ios::trunc);
        log_.open(dir / kLogFile, std::ios::out | mode);
        timing_.open(dir / kTimingFile, std::ios::out | mode);
        if (!log_ || !timing_) throw LogError("cannot write to run directory " + dir.string());
    }

    void write_header(const ExperimentConfig& cfg) { write(log_, header_json(cfg)); }

    void on_individual(const Individual& ind) override { write(log_, individual_json(ind)); }

    void on_reevaluation(int generation, const std::string& from, const std::string& to,
                         const std::vector<Reevaluation>& pairs) override {
        write(log_, reevaluation_json(generation, from, to, pairs));
    }

    void on_generation(const GenerationSummary& s) override {
        write(log_, generation_json(s));
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
        write(timing_, {{"generation", s.generation}, {"wall_seconds", seconds}});
    }

    bool should_stop(int generation) override { return stop_after_ && generation >= *stop_after_; }

private:
    static void write(std::ofstream& out, const nlohmann::json& j) {
        out << j.dump() << '\n';
        out.flush();
        if (!out) throw LogError("write to run log failed");
    }

    std::ofstream log_;
    std::ofstream timing_;
    std::optional<int> stop_after_;
    std::chrono::steady_clock::time_point started_;
};

struct EvolveOutcome {
    RunResult result;
    bool resumed = false;
};

/// Runs (or resumes) one experiment into `dir`: writes config.txt, log.jsonl
/// and timing.jsonl. On resume the log is cut back to its last complete
/// generation and the stored config must match `cfg`.
inline EvolveOutcome evolve_to_directory(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                                         const LocomotionBackend& backend, bool resume,
                                         std::optional<int> stop_after = std::nullopt) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path log_path = dir / kLogFile;
    EvolveOutcome out;

    std::optional<RunState> state;
    if (resume && fs::exists(log_path)) {
        const RunLog log = read_run_log(log_path);
        const auto expected = detail::config_object(cfg);
        for (const auto& [k, v] : expected.items()) {
            const auto it = log.config.find(k);
            if (it == log.config.end() || it->second != v.get<std::string>()) {
                throw LogError("cannot resume: config key '" + k + "' differs from the existing log");
            }
        }
        if (!log.generations.empty()) {
            state = state_from_log(log);
            fs::resize_file(log_path, log.complete_bytes);
            out.resumed = true;
        }
    }

    {
        std::ofstream echo(dir / kConfigFile, std::ios::binary | std::ios::trunc);
        echo << config_echo(cfg);
        if (!echo) throw LogError("cannot write " + (dir / kConfigFile).string());
    }

    LogWriter writer(dir, out.resumed, stop_after);
    if (!out.resumed) writer.write_header(cfg);
    out.result = run(cfg.evolution, backend, writer, std::move(state));
    return out;
}

}  // namespace lamarck
