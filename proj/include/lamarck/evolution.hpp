#pragma once

// Outer evolutionary loop: (mu + lambda) evolution of bodies and brains with
// RevDE lifetime learning, in Lamarckian or Darwinian mode, under a schedule of
// terrain changes.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lamarck/brain_genotype.hpp"
#include "lamarck/cpg.hpp"
#include "lamarck/cppn.hpp"
#include "lamarck/environment.hpp"
#include "lamarck/genotype.hpp"
#include "lamarck/morphology.hpp"
#include "lamarck/parallel.hpp"
#include "lamarck/revde.hpp"
#include "lamarck/rng.hpp"
#include "lamarck/simulator.hpp"

namespace lamarck {

enum class InheritanceMode { lamarckian, darwinian };

inline std::string_view to_string(InheritanceMode m) {
    return m == InheritanceMode::lamarckian ? "lamarckian" : "darwinian";
}

inline InheritanceMode inheritance_mode_from_string(std::string_view s) {
    if (s == "lamarckian") return InheritanceMode::lamarckian;
    if (s == "darwinian") return InheritanceMode::darwinian;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected lamarckian or darwinian)");
}

struct EvolutionConfig {
    int population = 50;  // mu
    int offspring = 25;   // lambda
    int generations = 30;
    int tournament = 2;
    InheritanceMode mode = InheritanceMode::lamarckian;
    std::string setup = "Flat_0";
    std::uint64_t seed = 1;

    double body_crossover_probability = 0.8;
    BodyMutationParams body_mutation;
    BrainMutationParams brain_mutation;
    LearnerConfig learner;
    bool learn_initial = true;
    bool reevaluate_learned = true;  // survivors keep their learned weights when the terrain changes

    TaskSpec task;
    TerrainParams terrain;
    SurrogateParams surrogate;
    unsigned threads = 1;
};

inline void validate(const EvolutionConfig& c) {
    if (c.population < 2) throw std::invalid_argument("population must be at least 2");
    if (c.offspring < 1 || c.offspring > c.population) {
        throw std::invalid_argument("offspring must be in [1, population]");
    }
    if (c.generations < 0) throw std::invalid_argument("generations must be >= 0");
    if (c.tournament != 2) throw std::invalid_argument("only binary tournaments (size 2) are supported");
    const SetupName setup = parse_setup(c.setup);
    if (c.generations > 0 && c.generations < setup.changes + 1) {
        throw std::invalid_argument("setup " + c.setup + " needs at least " + std::to_string(setup.changes + 1) +
                                    " generations");
    }
    if (!(c.body_crossover_probability >= 0.0 && c.body_crossover_probability <= 1.0)) {
        throw std::invalid_argument("body crossover probability must be in [0, 1]");
    }
    if (c.task.targets.empty() || !(c.task.target_radius > 0.0) || !(c.task.path_penalty >= 0.0) ||
        !(c.task.duration > 0.0) || !(c.task.sample_rate > 0.0)) {
        throw std::invalid_argument("task needs targets, radius > 0, omega >= 0, duration and rate > 0");
    }
    validate(c.learner);
    validate(c.surrogate);
}

inline EnvironmentSchedule schedule_for(const EvolutionConfig& c) {
    const SetupName setup = parse_setup(c.setup);
    return make_schedule(c.setup, std::max(c.generations, setup.changes + 1), c.terrain);
}

struct Individual {
    std::int64_t id = 0;
    Genotype genotype;
    ModuleTree body;
    WeightVector learned;  // CPG weights used in this lifetime
    double fitness_before = 0.0;
    double fitness_after = 0.0;
    std::string terrain;
    std::vector<double> learning_curve;
    int assessments = 0;
    std::uint64_t birth_hash = 0;

    int generation() const { return genotype.lineage.generation; }

    /// The brain this individual behaves with: genome layout, learned weights.
    CpgNetwork phenotype_brain() const {
        CpgNetwork n = build_network(body, genotype.brain);
        n.set_weights(learned);
        return n;
    }
};

/// Evaluates one body/brain pair: rollout on the backend, then task fitness.
class Evaluator {
public:
    Evaluator(const LocomotionBackend& backend, TaskSpec task) : backend_(&backend), task_(std::move(task)) {}

    double operator()(const ModuleTree& body, const CpgNetwork& brain, const Terrain& terrain) const {
        const Trajectory t = backend_->evaluate(body, brain, terrain, task_);
        return fitness(t.positions, task_);
    }

    const TaskSpec& task() const { return task_; }
    const LocomotionBackend& backend() const { return *backend_; }

private:
    const LocomotionBackend* backend_;
    TaskSpec task_;
};

// --- operators ------------------------------------------------------------------

/// Winner of a binary tournament between entrants a and b; ties go to a.
inline std::size_t tournament_winner(std::span<const Individual> pop, std::size_t a, std::size_t b) {
    return pop[b].fitness_after > pop[a].fitness_after ? b : a;
}

/// Two independent binary tournaments with replacement. Returns population
/// indices of the two winners.
inline std::pair<std::size_t, std::size_t> select_parents(std::span<const Individual> pop, Rng& rng) {
    if (pop.size() < 2) throw std::invalid_argument("parent selection needs at least two individuals");
    auto tournament = [&] {
        const std::size_t a = uniform_index(rng, pop.size());
        const std::size_t b = uniform_index(rng, pop.size());
        return tournament_winner(pop, a, b);
    };
    const std::size_t first = tournament();
    const std::size_t second = tournament();
    return {first, second};
}

struct ReproductionParams {
    double body_crossover_probability = 0.8;
    BodyMutationParams body_mutation;
    BrainMutationParams brain_mutation;
};

/// Child genotype: the body is recombined from both parents (the fitter one
/// first) and mutated; the brain is the fitter parent's brain genome, mutated.
inline Genotype reproduce(const Individual& a, const Individual& b, Rng& rng, InnovationTracker& tracker,
                          const ReproductionParams& params, int generation) {
    const bool a_fitter = a.fitness_after >= b.fitness_after;
    const Individual& fitter = a_fitter ? a : b;
    const Individual& other = a_fitter ? b : a;
    Genotype child;
    child.body = uniform01(rng) < params.body_crossover_probability
                     ? body_crossover(fitter.genotype.body, other.genotype.body, rng)
                     : fitter.genotype.body;
    child.body = body_mutate(child.body, rng, params.body_mutation, tracker);
    child.brain = brain_mutate(fitter.genotype.brain, rng, params.brain_mutation);
    child.lineage.parents = {fitter.id, other.id};
    child.lineage.generation = generation;
    return child;
}

/// Lamarckian: the learned weights are written into the brain genome.
/// Darwinian: the genome is left as it was born.
inline void end_of_learning(Individual& ind, std::span<const double> learned, InheritanceMode mode) {
    ind.learned.assign(learned.begin(), learned.end());
    if (mode == InheritanceMode::lamarckian) {
        CpgNetwork net = build_network(ind.body, ind.genotype.brain);
        net.set_weights(learned);
        ind.genotype.brain = writeback(net, ind.genotype.brain);
    }
}

/// Keeps the best mu of the pool by fitness after learning; ties go to the
/// younger individual, then to the lower id.
inline std::vector<Individual> survivor_selection(std::vector<Individual> pool, std::size_t mu) {
    std::sort(pool.begin(), pool.end(), [](const Individual& a, const Individual& b) {
        if (a.fitness_after != b.fitness_after) return a.fitness_after > b.fitness_after;
        if (a.generation() != b.generation()) return a.generation() > b.generation();
        return a.id < b.id;
    });
    if (pool.size() > mu) pool.resize(mu);
    return pool;
}

struct Reevaluation {
    std::int64_t id = 0;
    double old_fitness = 0.0;
    double new_fitness = 0.0;
};

/// Re-evaluates every survivor on the new terrain without re-learning.
inline std::vector<Reevaluation> on_environment_change(std::vector<Individual>& pop, const Terrain& terrain,
                                                       const Evaluator& evaluate, bool use_learned = true,
                                                       unsigned threads = 1) {
    std::vector<Reevaluation> pairs(pop.size());
    parallel_for(pop.size(), threads, [&](std::size_t i) {
        Individual& ind = pop[i];
        const CpgNetwork brain = use_learned ? ind.phenotype_brain() : build_network(ind.body, ind.genotype.brain);
        pairs[i] = {ind.id, ind.fitness_after, evaluate(ind.body, brain, terrain)};
    });
    for (std::size_t i = 0; i < pop.size(); ++i) {
        pop[i].fitness_after = pairs[i].new_fitness;
        pop[i].terrain = terrain.id();
    }
    return pairs;
}

/// Develops, learns and evaluates a newborn; applies the mode-dependent
/// genome update at the end of learning.
inline Individual develop_and_learn(std::int64_t id, Genotype genotype, const Terrain& terrain,
                                    const Evaluator& evaluate, const LearnerConfig& learner, bool learn_enabled,
                                    InheritanceMode mode, Rng& rng) {
    Individual ind;
    ind.id = id;
    ind.birth_hash = genotype_hash(genotype);
    ind.genotype = std::move(genotype);
    ind.body = develop_body(ind.genotype.body);
    ind.terrain = terrain.id();
    CpgNetwork net = build_network(ind.body, ind.genotype.brain);
    const WeightVector inherited = net.weights();

    WeightVector learned = inherited;
    if (learn_enabled) {
        CpgNetwork trial = net;
        auto assess = [&](std::span<const double> w) {
            trial.set_weights(w);
            return evaluate(ind.body, trial, terrain);
        };
        LearnResult res = learn(inherited, assess, learner, rng);
        ind.fitness_before = res.inherited_reward;
        ind.learning_curve = std::move(res.curve);
        ind.assessments = res.assessments;
        learned = std::move(res.best);
    } else {
        ind.fitness_before = evaluate(ind.body, net, terrain);
    }
    net.set_weights(learned);
    ind.fitness_after = evaluate(ind.body, net, terrain);
    end_of_learning(ind, learned, mode);
    return ind;
}

// --- the run --------------------------------------------------------------------

struct GenerationSummary {
    int generation = 0;
    std::string terrain;
    std::vector<std::int64_t> survivors;
    std::vector<double> fitness;
    const InnovationTracker* tracker = nullptr;
    std::int64_t next_id = 0;
};

class RunObserver {
public:
    virtual ~RunObserver() = default;
    virtual void on_individual(const Individual&) {}
    virtual void on_reevaluation(int /*generation*/, const std::string& /*from*/, const std::string& /*to*/,
                                 const std::vector<Reevaluation>&) {}
    virtual void on_generation(const GenerationSummary&) {}
    /// Polled after each completed generation; returning true ends the run early.
    virtual bool should_stop(int /*generation*/) { return false; }
};

/// Everything needed to continue a run after a completed generation.
struct RunState {
    int generation = -1;  // last completed generation
    std::vector<Individual> population;
    InnovationTracker tracker;
    std::int64_t next_id = 0;
    std::string terrain;
};

struct RunResult {
    RunState state;
    long long assessments = 0;  // learning assessments performed in this session
    bool stopped_early = false;
};

inline RunResult run(const EvolutionConfig& cfg, const LocomotionBackend& backend, RunObserver& observer,
                     std::optional<RunState> resume = std::nullopt) {
    validate(cfg);
    const EnvironmentSchedule schedule = schedule_for(cfg);
    const Evaluator evaluate(backend, cfg.task);
    const ReproductionParams repro{cfg.body_crossover_probability, cfg.body_mutation, cfg.brain_mutation};
    RunResult result;
    RunState& st = result.state;

    auto finish_generation = [&](int g) {
        st.generation = g;
        GenerationSummary s;
        s.generation = g;
        s.terrain = st.terrain;
        for (const auto& ind : st.population) {
            s.survivors.push_back(ind.id);
            s.fitness.push_back(ind.fitness_after);
        }
        s.tracker = &st.tracker;
        s.next_id = st.next_id;
        observer.on_generation(s);
    };

    if (resume) {
        st = std::move(*resume);
    } else {
        const Terrain& terrain = schedule.terrain_at(0);
        st.terrain = terrain.id();
        const auto mu = static_cast<std::size_t>(cfg.population);
        std::vector<Genotype> genotypes(mu);
        for (std::size_t i = 0; i < mu; ++i) {
            Rng rng = make_rng(cfg.seed, 0, static_cast<std::int64_t>(i), "init");
            genotypes[i].body = random_body(rng, st.tracker);
            genotypes[i].brain = random_brain(rng);
        }
        std::vector<Individual> born(mu);
        parallel_for(mu, cfg.threads, [&](std::size_t i) {
            Rng rng = make_rng(cfg.seed, 0, static_cast<std::int64_t>(i), "learn");
            born[i] = develop_and_learn(static_cast<std::int64_t>(i), std::move(genotypes[i]), terrain, evaluate,
                                        cfg.learner, cfg.learn_initial, cfg.mode, rng);
        });
        for (const auto& ind : born) {
            observer.on_individual(ind);
            result.assessments += ind.assessments;
        }
        st.next_id = static_cast<std::int64_t>(mu);
        st.population = survivor_selection(std::move(born), mu);
        finish_generation(0);
        if (observer.should_stop(0)) {
            result.stopped_early = cfg.generations > 0;
            return result;
        }
    }

    for (int g = st.generation + 1; g <= cfg.generations; ++g) {
        const Terrain& terrain = schedule.terrain_at(g);
        if (terrain.id() != st.terrain) {
            const std::string old = st.terrain;
            auto pairs = on_environment_change(st.population, terrain, evaluate, cfg.reevaluate_learned, cfg.threads);
            st.terrain = terrain.id();
            observer.on_reevaluation(g, old, st.terrain, pairs);
        }

        const auto lambda = static_cast<std::size_t>(cfg.offspring);
        std::vector<Genotype> children(lambda);
        for (std::size_t k = 0; k < lambda; ++k) {
            Rng rng = make_rng(cfg.seed, g, static_cast<std::int64_t>(k), "reproduce");
            auto [a, b] = select_parents(st.population, rng);
            children[k] = reproduce(st.population[a], st.population[b], rng, st.tracker, repro, g);
        }
        std::vector<Individual> born(lambda);
        parallel_for(lambda, cfg.threads, [&](std::size_t k) {
            Rng rng = make_rng(cfg.seed, g, static_cast<std::int64_t>(k), "learn");
            born[k] = develop_and_learn(st.next_id + static_cast<std::int64_t>(k), std::move(children[k]), terrain,
                                        evaluate, cfg.learner, true, cfg.mode, rng);
        });
        st.next_id += static_cast<std::int64_t>(lambda);
        for (const auto& ind : born) {
            observer.on_individual(ind);
            result.assessments += ind.assessments;
        }
        std::vector<Individual> pool = std::move(st.population);
        pool.insert(pool.end(), std::make_move_iterator(born.begin()), std::make_move_iterator(born.end()));
        st.population = survivor_selection(std::move(pool), static_cast<std::size_t>(cfg.population));
        finish_generation(g);
        if (g < cfg.generations && observer.should_stop(g)) {
            result.stopped_early = true;
            return result;
        }
    }
    return result;
}

}  // namespace lamarck
