// Command-line front end: evolve, experiment, analyze, replay, plot.
// Exit codes: 0 success, 1 usage or configuration error, 2 data error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lamarck/lamarck.hpp"

namespace fs = std::filesystem;
using namespace lamarck;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct EvolveArgs {
    std::string config;
    std::string profile;
    std::optional<std::string> setup;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<int> generations;
    std::optional<int> population;
    std::optional<int> offspring;
    std::optional<int> repetitions;
    std::vector<std::string> set;
    std::string out = "runs/run";
    unsigned threads = 1;
    bool resume = false;
    std::optional<int> stop_after;
};

void add_config_options(CLI::App* cmd, EvolveArgs& a) {
    cmd->add_option("--config", a.config, "key = value config file")->check(CLI::ExistingFile);
    cmd->add_option("--profile", a.profile, "parameter profile applied before the config file (paper, desk)");
    cmd->add_option("--setup", a.setup, "environment setup, e.g. Flat_0, Rugged_2");
    cmd->add_option("--mode", a.mode, "lamarckian or darwinian");
    cmd->add_option("--seed", a.seed, "master seed");
    cmd->add_option("--generations", a.generations, "offspring generations after the initial population");
    cmd->add_option("--pop", a.population, "population size (mu)");
    cmd->add_option("--offspring", a.offspring, "offspring per generation (lambda)");
    cmd->add_option("--set", a.set, "extra key=value overrides")->take_all();
    cmd->add_option("--threads", a.threads, "worker threads for evaluation")->check(CLI::PositiveNumber);
}

ExperimentConfig build_config(const EvolveArgs& a) {
    ExperimentConfig cfg;
    if (!a.profile.empty()) apply_profile(cfg, a.profile);
    if (!a.config.empty()) apply_config_file(cfg, a.config);
    if (a.setup) set_option(cfg, "setup", *a.setup);
    if (a.mode) set_option(cfg, "mode", *a.mode);
    if (a.seed) cfg.evolution.seed = *a.seed;
    if (a.generations) cfg.evolution.generations = *a.generations;
    if (a.population) cfg.evolution.population = *a.population;
    if (a.offspring) cfg.evolution.offspring = *a.offspring;
    if (a.repetitions) cfg.repetitions = *a.repetitions;
    for (const auto& kv : a.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_option(cfg, detail::trim(kv.substr(0, eq)), detail::trim(kv.substr(eq + 1)));
    }
    cfg.evolution.threads = a.threads;
    validate(cfg.evolution);
    return cfg;
}

void report_run(const fs::path& dir, const EvolveOutcome& o) {
    const auto& st = o.result.state;
    double best = -INFINITY;
    for (const auto& ind : st.population) best = std::max(best, ind.fitness_after);
    std::cout << dir.string() << ": generation " << st.generation << (o.resumed ? " (resumed)" : "")
              << (o.result.stopped_early ? " (stopped early)" : "") << ", best fitness " << best << ", "
              << o.result.assessments << " learning assessments\n";
}

int cmd_evolve(const EvolveArgs& a) {
    const ExperimentConfig cfg = build_config(a);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    const fs::path dir = a.out;
    const auto outcome = evolve_to_directory(cfg, dir, backend, a.resume, a.stop_after);
    report_run(dir, outcome);
    return kExitOk;
}

int cmd_experiment(const EvolveArgs& a, const std::vector<std::string>& setups, const std::vector<std::string>& modes) {
    ExperimentConfig base = build_config(a);
    const SurrogateBackend backend(base.evolution.surrogate);
    for (const auto& setup : setups) {
        for (const auto& mode : modes) {
            for (int r = 0; r < base.repetitions; ++r) {
                ExperimentConfig cfg = base;
                set_option(cfg, "setup", setup);
                set_option(cfg, "mode", mode);
                cfg.evolution.seed = base.evolution.seed + static_cast<std::uint64_t>(r);
                validate(cfg.evolution);
                const fs::path dir = fs::path(a.out) / setup / mode / ("seed" + std::to_string(cfg.evolution.seed));
                report_run(dir, evolve_to_directory(cfg, dir, backend, a.resume));
            }
        }
    }
    return kExitOk;
}

int cmd_analyze(const std::string& runs, const std::string& out, bool plots) {
    const auto logs = load_runs(runs);
    if (logs.empty()) throw LogError("no run logs found under " + runs);
    const Analysis a = analyze_runs(logs);
    write_analysis(a, out);
    std::cout << "analyzed " << logs.size() << " run(s) into " << out << "\n";
    if (plots) {
        const auto files = plot_analysis(out, out);
        std::cout << "wrote " << files.size() << " figure(s)\n";
    }
    return kExitOk;
}

int cmd_plot(const std::string& analysis, const std::string& out) {
    const auto files = plot_analysis(analysis, out);
    if (files.empty()) {
        std::cerr << "warning: no metrics found in " << analysis << "; nothing to plot\n";
        return kExitOk;
    }
    for (const auto& f : files) std::cout << f.string() << "\n";
    return kExitOk;
}

int cmd_replay(const std::string& log_arg, std::optional<std::int64_t> id, const std::string& trajectory_csv,
               double tolerance) {
    fs::path path = log_arg;
    if (fs::is_directory(path)) path /= kLogFile;
    const RunLog log = read_run_log(path);
    const ExperimentConfig cfg = log.experiment_config();
    const SurrogateBackend backend(cfg.evolution.surrogate);

    std::vector<const IndividualRecord*> targets;
    if (id) {
        const IndividualRecord* r = log.find(*id);
        if (!r) throw LogError("individual " + std::to_string(*id) + " is not in " + path.string());
        targets.push_back(r);
    } else {
        for (const auto& r : log.individuals) targets.push_back(&r);
    }

    int mismatches = 0;
    for (const IndividualRecord* r : targets) {
        const Terrain terrain = make_terrain(terrain_kind_from_string(r->terrain), cfg.evolution.terrain);
        const ModuleTree body = develop_body(r->genotype.body);
        CpgNetwork brain = build_network(body, r->genotype.brain);
        brain.set_weights(r->learned);
        const Trajectory traj = backend.evaluate(body, brain, terrain, cfg.evolution.task);
        const double f = fitness(traj.positions, cfg.evolution.task);
        const double diff = std::abs(f - r->fitness_after);
        const bool ok = diff <= tolerance || (std::isnan(f) && std::isnan(r->fitness_after));
        if (!ok) ++mismatches;
        if (id || !ok) {
            std::printf("individual %lld: logged %.17g replayed %.17g diff %.3g %s\n", static_cast<long long>(r->id),
                        r->fitness_after, f, diff, ok ? "ok" : "MISMATCH");
        }
        if (id && !trajectory_csv.empty()) {
            std::ofstream csv(trajectory_csv, std::ios::trunc);
            if (!csv) throw LogError("cannot write " + trajectory_csv);
            csv << "t,x,y,heading\n";
            for (std::size_t k = 0; k < traj.positions.size(); ++k) {
                csv << static_cast<double>(k) / cfg.evolution.task.sample_rate << ',' << traj.positions[k].x << ','
                    << traj.positions[k].y << ',' << traj.heading[k] << '\n';
            }
        }
    }
    std::printf("replayed %zu individual(s), %d mismatch(es)\n", targets.size(), mismatches);
    return mismatches == 0 ? kExitOk : kExitData;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Co-evolution of modular robot bodies and CPG controllers with lifetime learning"};
    app.require_subcommand(1);

    EvolveArgs evolve_args;
    auto* evolve = app.add_subcommand("evolve", "run one evolutionary experiment into a run directory");
    add_config_options(evolve, evolve_args);
    evolve->add_option("--out", evolve_args.out, "run directory");
    evolve->add_flag("--resume", evolve_args.resume, "continue from the last complete generation in --out");
    evolve->add_option("--stop-after", evolve_args.stop_after, "stop after this generation (interrupt simulation)")
        ->group("");

    EvolveArgs exp_args;
    exp_args.out = "runs";
    std::vector<std::string> exp_setups(kSetupNames.begin(), kSetupNames.end());
    std::vector<std::string> exp_modes = {"lamarckian", "darwinian"};
    auto* experiment = app.add_subcommand("experiment", "run setups x modes x repetitions into <out>/<setup>/<mode>/seed<k>");
    add_config_options(experiment, exp_args);
    experiment->add_option("--out", exp_args.out, "output root");
    experiment->add_option("--repetitions", exp_args.repetitions, "independent runs per setup and mode");
    experiment->add_option("--setups", exp_setups, "setups to run")->take_all();
    experiment->add_option("--modes", exp_modes, "modes to run")->take_all();
    experiment->add_flag("--resume", exp_args.resume, "resume runs that already have logs");

    std::string analyze_runs_dir, analyze_out = "analysis";
    bool analyze_plots = false;
    auto* analyze = app.add_subcommand("analyze", "compute metric tables from run logs");
    analyze->add_option("runs", analyze_runs_dir, "run directory, log file or directory of runs")->required();
    analyze->add_option("--out", analyze_out, "output directory for CSV tables");
    analyze->add_flag("--plots", analyze_plots, "also draw figures into the output directory");

    std::string replay_log, replay_csv;
    std::optional<std::int64_t> replay_id;
    double replay_tol = 1e-9;
    auto* replay = app.add_subcommand("replay", "re-simulate logged individuals and compare fitness");
    replay->add_option("log", replay_log, "run directory or log file")->required();
    replay->add_option("--id", replay_id, "individual id (default: all)");
    replay->add_option("--trajectory", replay_csv, "write the replayed trajectory of --id as CSV");
    replay->add_option("--tolerance", replay_tol, "allowed absolute fitness difference");

    std::string plot_in, plot_out;
    auto* plot = app.add_subcommand("plot", "draw SVG figures from analysis tables");
    plot->add_option("analysis", plot_in, "directory written by analyze")->required();
    plot->add_option("--out", plot_out, "figure directory (default: the analysis directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*evolve) return cmd_evolve(evolve_args);
        if (*experiment) return cmd_experiment(exp_args, exp_setups, exp_modes);
        if (*analyze) return cmd_analyze(analyze_runs_dir, analyze_out, analyze_plots);
        if (*replay) return cmd_replay(replay_log, replay_id, replay_csv, replay_tol);
        if (*plot) return cmd_plot(plot_in, plot_out.empty() ? plot_in : plot_out);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
