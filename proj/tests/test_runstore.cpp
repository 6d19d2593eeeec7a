#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "support.hpp"

using namespace lamarck;
using namespace lamarck::testing;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("lamarck_runstore_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write_file(const fs::path& p, const std::string& s) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << s;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(LAMARCK_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Config, ParsesCommentsAndEchoesCanonically) {
    ExperimentConfig cfg;
    apply_config_text(cfg, "# comment\n\npopulation = 12\n  mode=darwinian  \ntask.targets = 1,-1; 0,-2; 2,2\n");
    EXPECT_EQ(cfg.evolution.population, 12);
    EXPECT_EQ(cfg.evolution.mode, InheritanceMode::darwinian);
    ASSERT_EQ(cfg.evolution.task.targets.size(), 3u);
    EXPECT_EQ(cfg.evolution.task.targets[2], (Vec2{2, 2}));

    const std::string echo = config_echo(cfg);
    EXPECT_NE(echo.find("population = 12\n"), std::string::npos);
    ExperimentConfig again;
    apply_config_text(again, echo);
    EXPECT_EQ(config_echo(again), echo);
}

TEST(Config, RealsRoundTripExactly) {
    ExperimentConfig cfg;
    cfg.evolution.surrogate.initial_heading = 1.0 / 3.0;
    ExperimentConfig again;
    apply_config_text(again, config_echo(cfg));
    EXPECT_EQ(again.evolution.surrogate.initial_heading, 1.0 / 3.0);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    ExperimentConfig cfg;
    EXPECT_THROW(set_option(cfg, "populaton", "3"), ConfigError);
    EXPECT_THROW(set_option(cfg, "population", "many"), ConfigError);
    EXPECT_THROW(set_option(cfg, "setup", "Mars_3"), ConfigError);
    EXPECT_THROW(set_option(cfg, "learner.learn_initial", "maybe"), ConfigError);
    EXPECT_THROW(apply_config_text(cfg, "population 3\n"), ConfigError);
    EXPECT_THROW(apply_profile(cfg, "huge"), ConfigError);
    EXPECT_THROW(apply_config_file(cfg, "/nonexistent/config.txt"), ConfigError);
}

TEST(Config, DeskProfile) {
    ExperimentConfig cfg;
    apply_profile(cfg, "desk");
    EXPECT_EQ(cfg.evolution.population, 8);
    EXPECT_EQ(cfg.evolution.offspring, 4);
    EXPECT_EQ(cfg.evolution.generations, 6);
    EXPECT_EQ(cfg.evolution.learner.total_assessments(), 20);
    apply_profile(cfg, "paper");
    EXPECT_EQ(cfg.evolution.population, 50);
    EXPECT_EQ(cfg.evolution.offspring, 25);
    EXPECT_EQ(cfg.evolution.generations, 30);
    EXPECT_EQ(cfg.evolution.learner.total_assessments(), 280);
}

TEST(RunLog, RoundTripsEveryRecord) {
    const ExperimentConfig cfg = desk_config("Flat_2", InheritanceMode::lamarckian, 6);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    run(cfg.evolution, backend, rec);

    const fs::path dir = fresh_dir("roundtrip");
    evolve_to_directory(cfg, dir, backend, false);
    const RunLog log = read_run_log(dir / kLogFile);
    EXPECT_FALSE(log.truncated_tail);
    EXPECT_EQ(log.version, "1.0");
    EXPECT_EQ(log.experiment_config().evolution.seed, 6u);
    EXPECT_EQ(config_echo(log.experiment_config()), config_echo(cfg));
    EXPECT_EQ(read_file(dir / kConfigFile), config_echo(cfg));

    ASSERT_EQ(log.individuals.size(), rec.born.size());
    for (std::size_t i = 0; i < rec.born.size(); ++i) {
        const auto& r = log.individuals[i];
        const auto& b = rec.born[i];
        EXPECT_EQ(r.id, b.id);
        EXPECT_EQ(r.genotype, b.genotype);
        EXPECT_EQ(r.learned, b.learned);
        EXPECT_EQ(r.fitness_before, b.fitness_before);
        EXPECT_EQ(r.fitness_after, b.fitness_after);
        EXPECT_EQ(r.birth_hash, b.birth_hash);
        EXPECT_EQ(r.genotype_hash, genotype_hash(b.genotype));
        EXPECT_EQ(r.tree, to_json(b.body));
    }
    ASSERT_EQ(log.generations.size(), rec.generations.size());
    for (std::size_t g = 0; g < rec.generations.size(); ++g) {
        EXPECT_EQ(log.generations[g].survivors, rec.generations[g].survivors);
        EXPECT_EQ(log.generations[g].fitness, rec.generations[g].fitness);
        EXPECT_EQ(tracker_from_json(log.generations[g].tracker), rec.trackers[g]);
    }
    ASSERT_EQ(log.reevaluations.size(), 2u);
    EXPECT_EQ(log.reevaluations[0].generation, 2);
    EXPECT_EQ(log.reevaluations[1].generation, 4);
    EXPECT_TRUE(fs::exists(dir / kTimingFile));
}

TEST(RunLog, RejectsUnknownMajorVersionAndBadRecords) {
    const fs::path dir = fresh_dir("version");
    write_file(dir / "v2.jsonl", R"({"type":"header","schema":"lamarck-runlog","version":"2.0","config":{}})" "\n");
    EXPECT_THROW(read_run_log(dir / "v2.jsonl"), LogError);
    write_file(dir / "v1_1.jsonl", R"({"type":"header","schema":"lamarck-runlog","version":"1.1","config":{}})" "\n");
    EXPECT_NO_THROW(read_run_log(dir / "v1_1.jsonl"));
    write_file(dir / "schema.jsonl", R"({"type":"header","schema":"other","version":"1.0","config":{}})" "\n");
    EXPECT_THROW(read_run_log(dir / "schema.jsonl"), LogError);
    write_file(dir / "garbage.jsonl", R"({"type":"header","schema":"lamarck-runlog","version":"1.0","config":{}})" "\n{oops\n");
    EXPECT_THROW(read_run_log(dir / "garbage.jsonl"), LogError);
    write_file(dir / "empty.jsonl", "");
    EXPECT_THROW(read_run_log(dir / "empty.jsonl"), LogError);
    EXPECT_THROW(read_run_log(dir / "missing.jsonl"), LogError);
}

TEST(RunLog, PartialLastLineIsIgnored) {
    ExperimentConfig cfg = desk_config("Flat_0", InheritanceMode::darwinian, 2);
    cfg.evolution.generations = 1;
    const SurrogateBackend backend(cfg.evolution.surrogate);
    const fs::path dir = fresh_dir("partial");
    evolve_to_directory(cfg, dir, backend, false);
    const RunLog whole = read_run_log(dir / kLogFile);
    {
        std::ofstream f(dir / kLogFile, std::ios::binary | std::ios::app);
        f << R"({"type":"individual","generation":2,"id":)";
    }
    const RunLog cut = read_run_log(dir / kLogFile);
    EXPECT_TRUE(cut.truncated_tail);
    EXPECT_EQ(cut.individuals.size(), whole.individuals.size());
    EXPECT_EQ(cut.complete_bytes, whole.complete_bytes);
}

TEST(RunLog, ResumeAfterInterruptionIsByteIdentical) {
    const ExperimentConfig cfg = desk_config("Flat_2", InheritanceMode::lamarckian, 13);
    const SurrogateBackend backend(cfg.evolution.surrogate);

    const fs::path straight = fresh_dir("straight");
    evolve_to_directory(cfg, straight, backend, false);

    // Interrupted after generation 2, right at an environment change.
    const fs::path resumed = fresh_dir("resumed");
    const auto first = evolve_to_directory(cfg, resumed, backend, false, 2);
    EXPECT_TRUE(first.result.stopped_early);
    EXPECT_EQ(first.result.state.generation, 2);
    const auto second = evolve_to_directory(cfg, resumed, backend, true);
    EXPECT_TRUE(second.resumed);
    EXPECT_EQ(read_file(resumed / kLogFile), read_file(straight / kLogFile));

    // Crash in the middle of generation 4: complete records of an unfinished
    // generation plus a torn line are dropped on resume.
    const fs::path crashed = fresh_dir("crashed");
    evolve_to_directory(cfg, crashed, backend, false, 3);
    {
        const std::string log = read_file(straight / kLogFile);
        std::size_t pos = 0;
        int lines = 0;
        // header, generations 0 to 3 (one with a reevaluation), then gen 4's reevaluation and 2 newborns
        const int keep = 1 + (8 + 1) + (4 + 1) + (1 + 4 + 1) + (4 + 1) + 1 + 2;
        while (lines < keep) {
            pos = log.find('\n', pos) + 1;
            ++lines;
        }
        write_file(crashed / kLogFile, log.substr(0, pos) + log.substr(pos, 40));
    }
    evolve_to_directory(cfg, crashed, backend, true);
    EXPECT_EQ(read_file(crashed / kLogFile), read_file(straight / kLogFile));
}

TEST(RunLog, ResumeRefusesDifferentConfig) {
    ExperimentConfig cfg = desk_config("Flat_0", InheritanceMode::lamarckian, 3);
    cfg.evolution.generations = 1;
    const SurrogateBackend backend(cfg.evolution.surrogate);
    const fs::path dir = fresh_dir("mismatch");
    evolve_to_directory(cfg, dir, backend, false);
    cfg.evolution.seed = 4;
    EXPECT_THROW(evolve_to_directory(cfg, dir, backend, true), LogError);
}

TEST(RunLog, StateFromLogMatchesInMemoryState) {
    ExperimentConfig cfg = desk_config("Rugged_2", InheritanceMode::darwinian, 8);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    const fs::path dir = fresh_dir("state");
    const auto outcome = evolve_to_directory(cfg, dir, backend, false);
    const RunState st = state_from_log(read_run_log(dir / kLogFile));
    const RunState& mem = outcome.result.state;
    EXPECT_EQ(st.generation, mem.generation);
    EXPECT_EQ(st.next_id, mem.next_id);
    EXPECT_EQ(st.terrain, mem.terrain);
    EXPECT_EQ(st.tracker, mem.tracker);
    ASSERT_EQ(st.population.size(), mem.population.size());
    for (std::size_t i = 0; i < st.population.size(); ++i) {
        EXPECT_EQ(st.population[i].id, mem.population[i].id);
        EXPECT_EQ(st.population[i].genotype, mem.population[i].genotype);
        EXPECT_EQ(st.population[i].fitness_after, mem.population[i].fitness_after);
        EXPECT_EQ(st.population[i].body, mem.population[i].body);
    }
}

TEST(Cli, EvolveReplayAndExitCodes) {
    const fs::path dir = fresh_dir("cli");
    const std::string run = (dir / "run").string();
    ASSERT_EQ(cli("evolve --profile desk --setup Flat_2 --mode darwinian --seed 3 --generations 3 --out " + run), 0);
    const RunLog log = read_run_log(fs::path(run) / kLogFile);
    EXPECT_EQ(log.generations.size(), 4u);
    EXPECT_EQ(log.config.at("mode"), "darwinian");

    EXPECT_EQ(cli("replay " + run), 0);
    EXPECT_EQ(cli("replay " + run + " --id 3 --trajectory " + (dir / "traj.csv").string()), 0);
    const std::string csv = read_file(dir / "traj.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 61);  // header + 12 s at 5 Hz
    EXPECT_EQ(cli("replay " + run + " --id 99999"), 2);

    // A tampered fitness no longer replays.
    std::string text = read_file(fs::path(run) / kLogFile);
    std::istringstream in(text);
    std::string line, out;
    bool tampered = false;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        if (!tampered && j["type"] == "individual") {
            j["fitness_after"] = j["fitness_after"].get<double>() + 0.5;
            tampered = true;
        }
        out += j.dump() + "\n";
    }
    write_file(dir / "tampered.jsonl", out);
    EXPECT_EQ(cli("replay " + (dir / "tampered.jsonl").string()), 2);

    EXPECT_EQ(cli("evolve --pop notanumber"), 1);
    EXPECT_EQ(cli("evolve --setup Mars_3 --out " + (dir / "bad").string()), 1);
    EXPECT_EQ(cli("evolve --set learner.candidates=7 --out " + (dir / "bad").string()), 1);
    EXPECT_EQ(cli("replay " + (dir / "nothing").string()), 2);
    EXPECT_EQ(cli("frobnicate"), 1);
}

TEST(Cli, ExperimentAnalyzeAndPlot) {
    const fs::path dir = fresh_dir("cli_experiment");
    const std::string runs = (dir / "runs").string();
    ASSERT_EQ(cli("experiment --profile desk --generations 3 --setups Flat_2 --repetitions 2 --out " + runs), 0);
    for (const char* mode : {"lamarckian", "darwinian"}) {
        for (const char* seed : {"seed1", "seed2"}) {
            EXPECT_TRUE(fs::exists(fs::path(runs) / "Flat_2" / mode / seed / kLogFile)) << mode << "/" << seed;
        }
    }
    const std::string analysis = (dir / "analysis").string();
    ASSERT_EQ(cli("analyze " + runs + " --out " + analysis + " --plots"), 0);
    for (const char* f : {"metrics.csv", "aggregate.csv", "correlation.csv", "scatter.csv", "descriptors.csv",
                          "pca.csv", "fitness_Flat_2.svg"}) {
        EXPECT_TRUE(fs::exists(fs::path(analysis) / f)) << f;
    }
    EXPECT_EQ(cli("analyze " + (dir / "none").string()), 2);
}
