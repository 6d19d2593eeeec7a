// Grows random robots until one has joints, lets it learn its gait on flat
// ground and prints the trajectory as CSV.
//
//   navigate_sample [seed]

#include <cstdio>
#include <cstdlib>

#include "lamarck/lamarck.hpp"

using namespace lamarck;

int main(int argc, char** argv) {
    const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;
    Rng rng(seed);
    InnovationTracker tracker;

    Genotype g;
    ModuleTree body;
    for (int attempt = 0;; ++attempt) {
        g.body = random_body(rng, tracker);
        BodyMutationParams grow;
        grow.probability = 1.0;
        grow.add_node_rate = 0.5;
        grow.add_connection_rate = 0.5;
        for (int i = 0; i < 6; ++i) g.body = body_mutate(g.body, rng, grow, tracker);
        body = develop_body(g.body);
        if (build_network(body, BrainGenotype()).size() > 0 || attempt > 1000) break;
    }
    g.brain = random_brain(rng);

    const SurrogateBackend backend;
    TaskSpec task;
    task.duration = 20.0;
    const Evaluator evaluate(backend, task);
    LearnerConfig learner;
    learner.iterations = 5;

    const Individual ind =
        develop_and_learn(0, g, Terrain::flat(), evaluate, learner, true, InheritanceMode::lamarckian, rng);
    std::fprintf(stderr, "%zu modules, fitness %.4f before learning, %.4f after %d trials\n", ind.body.size(),
                 ind.fitness_before, ind.fitness_after, ind.assessments);

    const Trajectory t = backend.evaluate(ind.body, ind.phenotype_brain(), Terrain::flat(), task);
    std::printf("t,x,y,heading\n");
    for (std::size_t i = 0; i < t.positions.size(); ++i) {
        std::printf("%.2f,%.5f,%.5f,%.5f\n", static_cast<double>(i) / task.sample_rate, t.positions[i].x,
                    t.positions[i].y, t.heading[i]);
    }
    return 0;
}
