#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support.hpp"

using namespace lamarck;
using namespace lamarck::testing;

namespace {

std::vector<Individual> ranked_population(const std::vector<double>& fitness) {
    std::vector<Individual> pop(fitness.size());
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        pop[i].id = static_cast<std::int64_t>(i);
        pop[i].fitness_after = fitness[i];
    }
    return pop;
}

// A learned newborn whose random body has at least one hinge.
Individual newborn(std::uint64_t seed, InheritanceMode mode, const Evaluator& eval, const LearnerConfig& learner) {
    Genotype g;
    for (std::uint64_t s = seed;; s += 100) {
        g.body = grown_body(s, 3);
        if (!develop_body(g.body).joints().empty()) break;
    }
    Rng rng(seed);
    g.brain = random_brain(rng);
    return develop_and_learn(static_cast<std::int64_t>(seed), g, Terrain::flat(), eval, learner, true, mode, rng);
}

}  // namespace

TEST(Tournament, FitterEntrantWinsTiesGoToFirst) {
    const auto pop = ranked_population({1.0, 3.0, 3.0});
    EXPECT_EQ(tournament_winner(pop, 0, 1), 1u);
    EXPECT_EQ(tournament_winner(pop, 1, 0), 1u);
    EXPECT_EQ(tournament_winner(pop, 1, 2), 1u);
    EXPECT_EQ(tournament_winner(pop, 2, 1), 2u);
    EXPECT_EQ(tournament_winner(pop, 0, 0), 0u);
}

TEST(Tournament, WinnerDistributionMatchesRankProbabilities) {
    // With replacement, the k-th best of n (k = 0 best) wins with probability
    // ((n - k)^2 - (n - k - 1)^2) / n^2.
    const std::vector<double> fitness = {0.5, 2.0, -1.0, 1.0, 3.0};
    const auto pop = ranked_population(fitness);
    const std::size_t n = fitness.size();
    std::vector<int> wins(n, 0);
    Rng rng(2024);
    const int draws = 10000;
    for (int d = 0; d < draws; ++d) ++wins[select_parents(pop, rng).first];
    double chi2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t better = 0;
        for (double f : fitness) better += f > fitness[i];
        const double m = static_cast<double>(n - better);
        const double p = (m * m - (m - 1) * (m - 1)) / static_cast<double>(n * n);
        const double expected = p * draws;
        chi2 += (wins[i] - expected) * (wins[i] - expected) / expected;
    }
    EXPECT_LT(chi2, 18.467);  // chi-square, 4 dof, 0.999 quantile
}

TEST(Tournament, SeededSelectionRepeats) {
    const auto pop = ranked_population({0.1, 0.2, 0.3, 0.4});
    Rng a(5), b(5);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(select_parents(pop, a), select_parents(pop, b));
    EXPECT_THROW(select_parents(std::span<const Individual>(pop.data(), 1), a), std::invalid_argument);
}

TEST(SurvivorSelection, MatchesRepeatedArgmaxOracle) {
    Rng rng(8);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Individual> pool(12);
        for (std::size_t i = 0; i < pool.size(); ++i) {
            pool[i].id = static_cast<std::int64_t>(uniform_index(rng, 1000));
            pool[i].fitness_after = static_cast<double>(uniform_index(rng, 4));  // many ties
            pool[i].genotype.lineage.generation = static_cast<int>(uniform_index(rng, 3));
        }
        // Oracle: take the best remaining by (fitness, younger, lower id), one at a time.
        std::vector<Individual> rest = pool, expected;
        while (expected.size() < 5) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < rest.size(); ++i) {
                const auto& a = rest[i];
                const auto& b = rest[best];
                const bool better = a.fitness_after > b.fitness_after ||
                                    (a.fitness_after == b.fitness_after &&
                                     (a.generation() > b.generation() ||
                                      (a.generation() == b.generation() && a.id < b.id)));
                if (better) best = i;
            }
            expected.push_back(rest[best]);
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(best));
        }
        const auto got = survivor_selection(pool, 5);
        ASSERT_EQ(got.size(), 5u);
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_EQ(got[i].id, expected[i].id);
            EXPECT_EQ(got[i].fitness_after, expected[i].fitness_after);
        }
    }
}

TEST(EndOfLearning, LamarckianWritesBackDarwinianKeepsGenome) {
    const SurrogateBackend backend;
    TaskSpec task;
    task.duration = 6.0;
    const Evaluator eval(backend, task);
    CellQuery q;
    q.cells[{0, 1, 0}] = {ModuleKind::hinge, 0};
    q.cells[{0, 2, 0}] = {ModuleKind::hinge, 0};
    q.cells[{1, 0, 0}] = {ModuleKind::hinge, 0};
    Rng rng(3);
    Individual ind;
    ind.body = develop_body(q);
    ind.genotype.brain = random_brain(rng);
    const BrainGenotype born = ind.genotype.brain;
    const CpgNetwork net = build_network(ind.body, born);
    std::vector<double> learned = net.weights();
    for (double& w : learned) w += 0.25;

    Individual dar = ind;
    end_of_learning(dar, learned, InheritanceMode::darwinian);
    EXPECT_EQ(dar.genotype.brain, born);
    EXPECT_EQ(dar.learned, learned);

    Individual lam = ind;
    end_of_learning(lam, learned, InheritanceMode::lamarckian);
    EXPECT_EQ(build_network(lam.body, lam.genotype.brain).weights(), learned);
    std::size_t changed = 0;
    for (std::size_t i = 0; i < born.flat().size(); ++i) changed += born.flat()[i] != lam.genotype.brain.flat()[i];
    EXPECT_EQ(changed, learned.size());
}

TEST(Reproduce, ChildBrainComesFromFitterParentGenome) {
    const SurrogateBackend backend;
    TaskSpec task;
    task.duration = 6.0;
    const Evaluator eval(backend, task);
    LearnerConfig learner;
    learner.population = 5;
    learner.candidates = 15;
    learner.top = 5;
    learner.iterations = 3;

    ReproductionParams frozen;
    frozen.body_crossover_probability = 0.0;
    frozen.body_mutation.probability = 0.0;
    frozen.brain_mutation.probability = 0.0;

    for (InheritanceMode mode : {InheritanceMode::lamarckian, InheritanceMode::darwinian}) {
        Individual a = newborn(1, mode, eval, learner);
        Individual b = newborn(2, mode, eval, learner);
        a.fitness_after = 2.0;
        b.fitness_after = 1.0;
        InnovationTracker tracker;
        Rng rng(11);
        const Genotype child = reproduce(b, a, rng, tracker, frozen, 1);
        EXPECT_EQ(child.brain, a.genotype.brain);
        EXPECT_EQ(child.body, a.genotype.body);
        EXPECT_EQ(child.lineage.parents, (std::vector<std::int64_t>{a.id, b.id}));
        EXPECT_EQ(child.lineage.generation, 1);
        // The child starts from the learned weights only in Lamarckian mode.
        const ModuleTree body = develop_body(child.body);
        const auto inherited = build_network(body, child.brain).weights();
        if (mode == InheritanceMode::darwinian) {
            EXPECT_EQ(genotype_hash(a.genotype), a.birth_hash);
            EXPECT_EQ(inherited, build_network(a.body, a.genotype.brain).weights());
        } else {
            EXPECT_EQ(inherited, a.learned);
        }
    }
}

TEST(Reevaluation, SameTerrainGivesSameFitness) {
    ExperimentConfig cfg = desk_config("Flat_0", InheritanceMode::lamarckian, 4);
    cfg.evolution.generations = 0;
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    RunResult r = run(cfg.evolution, backend, rec);
    auto pop = r.state.population;
    const Evaluator eval(backend, cfg.evolution.task);
    const auto pairs = on_environment_change(pop, Terrain::flat(), eval);
    ASSERT_EQ(pairs.size(), pop.size());
    for (const auto& p : pairs) EXPECT_EQ(p.old_fitness, p.new_fitness);
}

TEST(Run, DeskBudgetAndGenerationCount) {
    const ExperimentConfig cfg = desk_config("Flat_2", InheritanceMode::lamarckian, 1);
    EXPECT_EQ(cfg.evolution.learner.total_assessments(), 20);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    const RunResult r = run(cfg.evolution, backend, rec);
    EXPECT_EQ(r.assessments, (8 + 4 * 6) * 20);
    EXPECT_EQ(rec.born.size(), 8u + 4u * 6u);
    ASSERT_EQ(rec.generations.size(), 7u);
    for (int g = 0; g <= 6; ++g) {
        EXPECT_EQ(rec.generations[static_cast<std::size_t>(g)].generation, g);
        EXPECT_EQ(rec.generations[static_cast<std::size_t>(g)].survivors.size(), 8u);
    }
    ASSERT_EQ(rec.changes.size(), 2u);
    EXPECT_EQ(std::get<0>(rec.changes[0]), 2);
    EXPECT_EQ(std::get<0>(rec.changes[1]), 4);
    EXPECT_EQ(std::get<1>(rec.changes[0]), "flat");
    EXPECT_EQ(std::get<2>(rec.changes[0]), "rugged");
    EXPECT_FALSE(r.stopped_early);
    // ids are unique and consecutive
    for (std::size_t i = 0; i < rec.born.size(); ++i) EXPECT_EQ(rec.born[i].id, static_cast<std::int64_t>(i));
}

TEST(Run, SurvivorsAreSortedAndFitnessNeverDropsWithinAPhase) {
    const ExperimentConfig cfg = desk_config("Flat_0", InheritanceMode::darwinian, 2);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    run(cfg.evolution, backend, rec);
    for (std::size_t g = 0; g < rec.generations.size(); ++g) {
        const auto& f = rec.generations[g].fitness;
        EXPECT_TRUE(std::is_sorted(f.begin(), f.end(), std::greater<>()));
        if (g > 0) {
            EXPECT_GE(f.front(), rec.generations[g - 1].fitness.front());
        }
    }
}

TEST(Run, DarwinianGenomesAreNeverRewritten) {
    const ExperimentConfig cfg = desk_config("Rugged_2", InheritanceMode::darwinian, 3);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    run(cfg.evolution, backend, rec);
    for (const auto& ind : rec.born) EXPECT_EQ(genotype_hash(ind.genotype), ind.birth_hash) << "id " << ind.id;
}

TEST(Run, LamarckianGenomesCarryLearnedWeights) {
    const ExperimentConfig cfg = desk_config("Rugged_2", InheritanceMode::lamarckian, 3);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    run(cfg.evolution, backend, rec);
    int rewritten = 0;
    for (const auto& ind : rec.born) {
        EXPECT_EQ(build_network(ind.body, ind.genotype.brain).weights(), ind.learned);
        rewritten += genotype_hash(ind.genotype) != ind.birth_hash;
    }
    EXPECT_GT(rewritten, 0);
}

TEST(Run, DeterministicAndThreadCountInvariant) {
    ExperimentConfig cfg = desk_config("Flat_2", InheritanceMode::lamarckian, 9);
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder one, two, threaded;
    run(cfg.evolution, backend, one);
    run(cfg.evolution, backend, two);
    cfg.evolution.threads = 3;
    run(cfg.evolution, backend, threaded);
    for (const Recorder* other : {&two, &threaded}) {
        ASSERT_EQ(one.born.size(), other->born.size());
        for (std::size_t i = 0; i < one.born.size(); ++i) {
            EXPECT_EQ(one.born[i].genotype, other->born[i].genotype);
            EXPECT_EQ(one.born[i].fitness_after, other->born[i].fitness_after);
            EXPECT_EQ(one.born[i].learned, other->born[i].learned);
        }
        EXPECT_EQ(one.trackers, other->trackers);
    }
}

TEST(Run, ZeroGenerationsLogsInitialPopulationOnly) {
    ExperimentConfig cfg = desk_config("Rugged_5", InheritanceMode::lamarckian, 5);
    cfg.evolution.generations = 0;
    const SurrogateBackend backend(cfg.evolution.surrogate);
    Recorder rec;
    const RunResult r = run(cfg.evolution, backend, rec);
    EXPECT_EQ(rec.born.size(), 8u);
    EXPECT_EQ(rec.generations.size(), 1u);
    EXPECT_TRUE(rec.changes.empty());
    EXPECT_EQ(r.state.generation, 0);
}

TEST(Run, RejectsInvalidConfigs) {
    ExperimentConfig cfg = desk_config("Rugged_5", InheritanceMode::lamarckian, 5);
    cfg.evolution.generations = 3;
    EXPECT_THROW(validate(cfg.evolution), std::invalid_argument);
    cfg = desk_config("Flat_0", InheritanceMode::lamarckian, 5);
    cfg.evolution.offspring = 9;
    EXPECT_THROW(validate(cfg.evolution), std::invalid_argument);
    cfg.evolution.offspring = 4;
    cfg.evolution.setup = "Mars_1";
    EXPECT_THROW(validate(cfg.evolution), std::invalid_argument);
}
