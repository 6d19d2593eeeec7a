#pragma once

// Metrics over run logs: per-run tidy tables, cross-run aggregates with
// t-based confidence intervals, the fitness/similarity correlation and the
// morphological-trait PCA.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "lamarck/analysis/descriptors.hpp"
#include "lamarck/analysis/stats.hpp"
#include "lamarck/analysis/tree_edit.hpp"
#include "lamarck/runlog.hpp"

namespace lamarck {

struct TidyRow {
    std::string run;
    std::string setup;
    std::string mode;
    int generation = 0;
    std::string metric;
    std::optional<double> value;  // empty = undefined
};

struct AggregateRow {
    std::string setup;
    std::string mode;
    int generation = 0;
    std::string metric;
    std::size_t n = 0;
    double mean = 0.0;
    double max = 0.0;
    double ci_half_width = 0.0;
};

struct CorrelationRow {
    std::string setup;
    std::string mode;
    std::string x;
    std::string y;
    Correlation result;
};

struct ScatterPoint {
    std::string setup;
    std::string mode;
    double similarity = 0.0;
    double fitness = 0.0;
};

struct DescriptorRow {
    std::string run;
    std::string setup;
    std::string mode;
    std::int64_t id = 0;
    DescriptorVector traits;
    double pc1 = 0.0;
    double pc2 = 0.0;
};

struct Analysis {
    std::vector<TidyRow> tidy;
    std::vector<AggregateRow> aggregate;
    std::vector<CorrelationRow> correlation;
    std::vector<ScatterPoint> scatter;
    std::vector<DescriptorRow> descriptors;  // final-generation survivors
    std::optional<PcaResult> pca;
};

namespace detail {

struct ParentPair {
    std::size_t run;
    int generation;
    double tree_distance;
    double descriptor_distance;
};

inline std::string config_value(const RunLog& log, const std::string& key) {
    const auto it = log.config.find(key);
    return it == log.config.end() ? std::string("unknown") : it->second;
}

/// setup/mode/seed<k>, which is unique within an experiment.
inline std::string run_label(const RunLog& log) {
    return config_value(log, "setup") + "/" + config_value(log, "mode") + "/seed" + config_value(log, "seed");
}

}  // namespace detail

/// Computes every metric for a set of runs.
inline Analysis analyze_runs(const std::vector<RunLog>& logs) {
    Analysis out;
    std::vector<detail::ParentPair> pairs;

    for (std::size_t r = 0; r < logs.size(); ++r) {
        const RunLog& log = logs[r];
        const std::string run = detail::run_label(log);
        const std::string setup = detail::config_value(log, "setup");
        const std::string mode = detail::config_value(log, "mode");
        auto emit = [&](int g, const std::string& metric, std::optional<double> v) {
            out.tidy.push_back({run, setup, mode, g, metric, v});
        };

        for (const auto& gen : log.generations) {
            if (gen.fitness.empty()) continue;
            const Summary s = summarize(gen.fitness);
            emit(gen.generation, "fitness_mean", s.mean);
            emit(gen.generation, "fitness_max", s.max);
        }

        std::map<std::int64_t, ModuleTree> bodies;
        std::map<std::int64_t, DescriptorVector> traits;
        auto body_of = [&](const IndividualRecord& rec) -> const ModuleTree& {
            auto it = bodies.find(rec.id);
            if (it == bodies.end()) it = bodies.emplace(rec.id, develop_body(rec.genotype.body)).first;
            return it->second;
        };
        auto traits_of = [&](const IndividualRecord& rec) -> const DescriptorVector& {
            auto it = traits.find(rec.id);
            if (it == traits.end()) it = traits.emplace(rec.id, descriptors(body_of(rec))).first;
            return it->second;
        };

        std::map<int, std::vector<double>> deltas;
        std::map<int, std::vector<double>> controller;
        for (const auto& rec : log.individuals) {
            deltas[rec.generation].push_back(learning_delta(rec.fitness_before, rec.fitness_after));
            if (rec.parents.empty()) {
                controller[rec.generation].push_back(0.0);
                continue;
            }
            double sim = 0.0;
            double tree_d = 0.0;
            double desc_d = 0.0;
            for (std::int64_t pid : rec.parents) {
                const IndividualRecord* parent = log.find(pid);
                if (!parent) throw LogError(run + ": parent " + std::to_string(pid) + " of " + std::to_string(rec.id) +
                                            " is not in the log");
                sim += cosine_similarity(rec.genotype.brain.flat(), parent->genotype.brain.flat());
                tree_d += tree_edit_distance(body_of(rec), body_of(*parent));
                desc_d += descriptor_distance(traits_of(rec), traits_of(*parent));
            }
            const double k = static_cast<double>(rec.parents.size());
            controller[rec.generation].push_back(sim / k);
            pairs.push_back({r, rec.generation, tree_d / k, desc_d / k});
            out.scatter.push_back({setup, mode, sim / k, rec.fitness_after});
        }
        for (const auto& [g, v] : deltas) emit(g, "learning_delta", mean(v));
        for (const auto& [g, v] : controller) emit(g, "controller_similarity", mean(v));

        for (const auto& re : log.reevaluations) {
            std::vector<double> olds, news;
            for (const auto& p : re.pairs) {
                olds.push_back(p.old_fitness);
                news.push_back(p.new_fitness);
            }
            if (!olds.empty()) emit(re.generation, "transferability", transferability(olds, news));
        }

        if (!log.generations.empty()) {
            for (std::int64_t id : log.generations.back().survivors) {
                const IndividualRecord* rec = log.find(id);
                if (!rec) throw LogError(run + ": survivor " + std::to_string(id) + " is not in the log");
                out.descriptors.push_back({run, setup, mode, id, traits_of(*rec), 0.0, 0.0});
            }
        }
    }

    // Morphological similarity is normalized by the largest distance in the whole dataset.
    {
        std::vector<double> td, dd;
        for (const auto& p : pairs) {
            td.push_back(p.tree_distance);
            dd.push_back(p.descriptor_distance);
        }
        const auto tsim = normalized_similarity(td);
        const auto dsim = normalized_similarity(dd);
        std::map<std::pair<std::size_t, int>, std::pair<std::vector<double>, std::vector<double>>> by_gen;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            auto& slot = by_gen[{pairs[i].run, pairs[i].generation}];
            slot.first.push_back(tsim[i]);
            slot.second.push_back(dsim[i]);
        }
        for (const auto& [key, v] : by_gen) {
            const RunLog& log = logs[key.first];
            const std::string run = detail::run_label(log);
            const std::string setup = detail::config_value(log, "setup");
            const std::string mode = detail::config_value(log, "mode");
            out.tidy.push_back({run, setup, mode, key.second, "tree_similarity", mean(v.first)});
            out.tidy.push_back({run, setup, mode, key.second, "descriptor_similarity", mean(v.second)});
        }
    }

    // Cross-run aggregates per (setup, mode, generation, metric).
    {
        std::map<std::tuple<std::string, std::string, std::string, int>, std::vector<double>> groups;
        for (const auto& row : out.tidy) {
            if (row.value) groups[{row.setup, row.mode, row.metric, row.generation}].push_back(*row.value);
        }
        for (const auto& [key, v] : groups) {
            const Summary s = summarize(v);
            out.aggregate.push_back(
                {std::get<0>(key), std::get<1>(key), std::get<3>(key), std::get<2>(key), s.n, s.mean, s.max, s.ci_half_width});
        }
    }

    // Fitness vs controller similarity, pooled over runs per (setup, mode).
    {
        std::map<std::pair<std::string, std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
        for (const auto& p : out.scatter) {
            auto& g = groups[{p.setup, p.mode}];
            g.first.push_back(p.similarity);
            g.second.push_back(p.fitness);
        }
        for (const auto& [key, v] : groups) {
            if (v.first.size() < 3) continue;
            out.correlation.push_back({key.first, key.second, "controller_similarity", "fitness", pearson(v.first, v.second)});
        }
    }

    if (out.descriptors.size() >= 2) {
        Eigen::MatrixXd data(static_cast<Eigen::Index>(out.descriptors.size()), DescriptorVector::kSize);
        for (std::size_t i = 0; i < out.descriptors.size(); ++i) {
            const auto v = out.descriptors[i].traits.values();
            for (std::size_t j = 0; j < v.size(); ++j) data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
        }
        out.pca = pca(data);
        for (std::size_t i = 0; i < out.descriptors.size(); ++i) {
            out.descriptors[i].pc1 = out.pca->scores(static_cast<Eigen::Index>(i), 0);
            out.descriptors[i].pc2 = out.pca->scores(static_cast<Eigen::Index>(i), 1);
        }
    }
    return out;
}

// --- CSV output --------------------------------------------------------------------

namespace detail {

inline std::string csv_number(std::optional<double> v) {
    if (!v || !std::isfinite(*v)) return "NA";
    return format_real(*v);
}

inline std::ofstream open_csv(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
}

}  // namespace detail

/// Writes metrics.csv, aggregate.csv, correlation.csv, scatter.csv,
/// descriptors.csv and pca.csv into `dir`.
inline void write_analysis(const Analysis& a, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    using detail::csv_number;
    {
        auto f = detail::open_csv(dir / "metrics.csv");
        f << "run,setup,mode,generation,metric,value\n";
        for (const auto& r : a.tidy) {
            f << r.run << ',' << r.setup << ',' << r.mode << ',' << r.generation << ',' << r.metric << ','
              << csv_number(r.value) << '\n';
        }
    }
    {
        auto f = detail::open_csv(dir / "aggregate.csv");
        f << "setup,mode,generation,metric,n,mean,max,ci_low,ci_high\n";
        for (const auto& r : a.aggregate) {
            f << r.setup << ',' << r.mode << ',' << r.generation << ',' << r.metric << ',' << r.n << ','
              << csv_number(r.mean) << ',' << csv_number(r.max) << ',' << csv_number(r.mean - r.ci_half_width) << ','
              << csv_number(r.mean + r.ci_half_width) << '\n';
        }
    }
    {
        auto f = detail::open_csv(dir / "correlation.csv");
        f << "setup,mode,x,y,n,r,p_value\n";
        for (const auto& r : a.correlation) {
            f << r.setup << ',' << r.mode << ',' << r.x << ',' << r.y << ',' << r.result.n << ','
              << csv_number(r.result.r) << ',' << csv_number(r.result.p_value) << '\n';
        }
    }
    {
        auto f = detail::open_csv(dir / "scatter.csv");
        f << "setup,mode,controller_similarity,fitness\n";
        for (const auto& p : a.scatter) {
            f << p.setup << ',' << p.mode << ',' << csv_number(p.similarity) << ',' << csv_number(p.fitness) << '\n';
        }
    }
    {
        auto f = detail::open_csv(dir / "descriptors.csv");
        f << "run,setup,mode,id";
        for (auto name : DescriptorVector::kNames) f << ',' << name;
        f << ",pc1,pc2\n";
        for (const auto& d : a.descriptors) {
            f << d.run << ',' << d.setup << ',' << d.mode << ',' << d.id;
            for (double v : d.traits.values()) f << ',' << csv_number(v);
            f << ',' << csv_number(d.pc1) << ',' << csv_number(d.pc2) << '\n';
        }
    }
    {
        auto f = detail::open_csv(dir / "pca.csv");
        f << "trait,pc1_loading,pc2_loading,pc1_explained,pc2_explained\n";
        if (a.pca) {
            for (std::size_t j = 0; j < DescriptorVector::kSize; ++j) {
                const auto jj = static_cast<Eigen::Index>(j);
                f << DescriptorVector::kNames[j] << ',' << csv_number(a.pca->loadings(jj, 0)) << ','
                  << csv_number(a.pca->loadings(jj, 1)) << ',' << csv_number(a.pca->explained_variance(0)) << ','
                  << csv_number(a.pca->explained_variance(1)) << '\n';
            }
        }
    }
}

/// Reads every log.jsonl under `root` (a run directory or a directory of runs), in path order.
inline std::vector<RunLog> load_runs(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::vector<fs::path> paths;
    if (fs::is_regular_file(root)) {
        paths.push_back(root);
    } else if (fs::is_directory(root)) {
        for (const auto& e : fs::recursive_directory_iterator(root)) {
            if (e.is_regular_file() && e.path().filename() == kLogFile) paths.push_back(e.path());
        }
    } else {
        throw LogError("no such run log or directory: " + root.string());
    }
    std::sort(paths.begin(), paths.end());
    std::vector<RunLog> logs;
    for (const auto& p : paths) logs.push_back(read_run_log(p));
    return logs;
}

}  // namespace lamarck
