#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"

using namespace lamarck;

namespace {

// Separate coding of the three chained perturbations, element by element.
std::array<std::vector<double>, 3> revde_oracle(const std::vector<double>& a, const std::vector<double>& b,
                                                const std::vector<double>& c, double F) {
    std::array<std::vector<double>, 3> out;
    for (std::size_t d = 0; d < a.size(); ++d) {
        const double v1 = a[d] + F * (b[d] - c[d]);
        const double v2 = b[d] + F * (c[d] - v1);
        const double v3 = c[d] + F * (v1 - v2);
        out[0].push_back(v1);
        out[1].push_back(v2);
        out[2].push_back(v3);
    }
    return out;
}

double sphere(std::span<const double> w) {
    double s = 0.0;
    for (double v : w) s += (v - 0.3) * (v - 0.3);
    return -s;
}

}  // namespace

TEST(RevdeMutate, WorkedExample) {
    // v2 = (0,1) + 0.5 * ((0,0) - (1,0.5)); v3 = 0.5 * ((1,0.5) - (-0.5,0.75))
    const auto v = revde_mutate(std::vector<double>{1, 0}, std::vector<double>{0, 1}, std::vector<double>{0, 0}, 0.5);
    EXPECT_EQ(v[0], (std::vector<double>{1, 0.5}));
    EXPECT_EQ(v[1], (std::vector<double>{-0.5, 0.75}));
    EXPECT_EQ(v[2], (std::vector<double>{0.75, -0.125}));
}

TEST(RevdeMutate, DegenerateCases) {
    const std::vector<double> w{0.2, -0.4, 1.5};
    const auto same = revde_mutate(w, w, w, 0.5);
    for (const auto& v : same) EXPECT_EQ(v, w);
    const std::vector<double> a{1, 2}, b{3, 4}, c{5, 6};
    const auto zero = revde_mutate(a, b, c, 0.0);
    EXPECT_EQ(zero[0], a);
    EXPECT_EQ(zero[1], b);
    EXPECT_EQ(zero[2], c);
    EXPECT_THROW(revde_mutate(a, b, std::vector<double>{1}, 0.5), std::invalid_argument);
}

TEST(RevdeMutate, MatchesOracleOnRandomTriplets) {
    Rng rng(100);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + uniform_index(rng, 40);
        std::vector<double> a(n), b(n), c(n);
        for (std::size_t d = 0; d < n; ++d) {
            a[d] = gaussian(rng, 0, 2);
            b[d] = gaussian(rng, 0, 2);
            c[d] = gaussian(rng, 0, 2);
        }
        const double F = uniform(rng, 0.0, 1.0);
        const auto got = revde_mutate(a, b, c, F);
        const auto want = revde_oracle(a, b, c, F);
        for (int k = 0; k < 3; ++k) {
            for (std::size_t d = 0; d < n; ++d) {
                EXPECT_NEAR(got[static_cast<std::size_t>(k)][d], want[static_cast<std::size_t>(k)][d], 1e-12);
            }
        }
    }
}

TEST(UniformCrossover, MaskExtremesAndRate) {
    Rng rng(6);
    const std::vector<double> cand(1000, 1.0), base(1000, 0.0);
    EXPECT_EQ(uniform_crossover(cand, base, 0.0, rng), base);
    EXPECT_EQ(uniform_crossover(cand, base, 1.0, rng), cand);
    double taken = 0, total = 0;
    for (int rep = 0; rep < 20; ++rep) {
        for (double v : uniform_crossover(cand, base, 0.9, rng)) {
            taken += v;
            ++total;
        }
    }
    const double sigma = std::sqrt(0.9 * 0.1 / total);
    EXPECT_NEAR(taken / total, 0.9, 3 * sigma);
    EXPECT_THROW(uniform_crossover(cand, std::vector<double>(3), 0.5, rng), std::invalid_argument);
}

TEST(InitPopulation, InheritedFirstThenMutants) {
    Rng rng(2);
    LearnerConfig cfg;
    const std::vector<double> inherited{0.1, -0.2, 0.3, 0.0};
    const auto pop = init_population(inherited, rng, cfg);
    ASSERT_EQ(pop.size(), 10u);
    EXPECT_EQ(pop[0], inherited);
    for (std::size_t i = 1; i < pop.size(); ++i) {
        ASSERT_EQ(pop[i].size(), inherited.size());
        EXPECT_NE(pop[i], inherited);
    }
    cfg.init_sd = 0.0;
    for (const auto& w : init_population(inherited, rng, cfg)) EXPECT_EQ(w, inherited);
}

TEST(Learn, DefaultBudgetIs280) {
    LearnerConfig cfg;
    EXPECT_EQ(cfg.total_assessments(), 280);
    Rng rng(1);
    int calls = 0;
    const auto r = learn(std::vector<double>(5, 0.0), [&](std::span<const double>) { return static_cast<double>(++calls); },
                         cfg, rng);
    EXPECT_EQ(calls, 280);
    EXPECT_EQ(r.assessments, 280);
    EXPECT_EQ(r.samples.size(), 280u);
    EXPECT_EQ(r.curve.size(), 10u);
}

TEST(Learn, NonFiniteRewardsAreDiscardedButCounted) {
    LearnerConfig cfg;
    Rng rng(3);
    int calls = 0;
    const auto r = learn(std::vector<double>(3, 0.0),
                         [&](std::span<const double> w) { return ++calls % 4 == 0 ? NAN : sphere(w); }, cfg, rng);
    EXPECT_EQ(r.assessments, 280);
    EXPECT_EQ(r.discarded, 70);
    EXPECT_TRUE(std::isfinite(r.best_reward));
}

TEST(Learn, ElitismGivesMonotoneCurve) {
    LearnerConfig cfg;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        std::vector<double> start(5);
        for (double& v : start) v = gaussian(rng, 0, 1);
        const auto r = learn(start, sphere, cfg, rng);
        for (std::size_t i = 1; i < r.curve.size(); ++i) ASSERT_GE(r.curve[i], r.curve[i - 1]) << "seed " << seed;
        EXPECT_EQ(r.best_reward, r.curve.back());
        EXPECT_EQ(sphere(r.best), r.best_reward);
    }
}

TEST(Learn, SphereImprovesInAlmostEverySeed) {
    LearnerConfig cfg;
    int improved = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed + 1000);
        std::vector<double> start(5);
        for (double& v : start) v = gaussian(rng, 0, 1);
        const auto r = learn(start, sphere, cfg, rng);
        double initial_best = -INFINITY;
        for (int i = 0; i < cfg.population; ++i) initial_best = std::max(initial_best, r.samples[static_cast<std::size_t>(i)].reward);
        EXPECT_GE(r.best_reward, initial_best);
        improved += r.best_reward > initial_best;
    }
    EXPECT_GE(improved, 95);
}

TEST(Learn, SeededRunsRepeat) {
    LearnerConfig cfg;
    Rng a(9), b(9);
    const auto ra = learn(std::vector<double>(4, 0.1), sphere, cfg, a);
    const auto rb = learn(std::vector<double>(4, 0.1), sphere, cfg, b);
    EXPECT_EQ(ra.best, rb.best);
    EXPECT_EQ(ra.curve, rb.curve);
}

TEST(LearnerConfig, Validation) {
    LearnerConfig cfg;
    cfg.candidates = 10;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
    cfg = LearnerConfig{};
    cfg.crossover = 1.5;
    EXPECT_THROW(validate(cfg), std::invalid_argument);
}
