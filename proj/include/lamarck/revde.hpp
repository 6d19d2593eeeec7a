#pragma once

// Reversible differential evolution (RevDE) for lifetime learning of CPG weights.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lamarck/rng.hpp"

namespace lamarck {

struct LearnerConfig {
    int population = 10;   // mu_L
    int candidates = 30;   // N, new candidates per iteration (three per triplet)
    int top = 10;          // lambda_L, survivors kept by plus-selection
    double scale = 0.5;    // F
    double crossover = 0.9;  // CR
    int iterations = 10;
    double init_sd = 0.5;  // noise added to the inherited vector for the initial mutants

    int total_assessments() const { return population + candidates * (iterations - 1); }
};

inline void validate(const LearnerConfig& c) {
    if (c.population < 1 || c.top < 1 || c.iterations < 1 || c.candidates < 0 || c.candidates % 3 != 0) {
        throw std::invalid_argument("learner needs population >= 1, top >= 1, iterations >= 1 and "
                                    "candidates a non-negative multiple of 3");
    }
    if (!(c.scale >= 0.0) || !(c.crossover >= 0.0 && c.crossover <= 1.0) || !(c.init_sd >= 0.0)) {
        throw std::invalid_argument("learner needs F >= 0, CR in [0,1] and init_sd >= 0");
    }
}

using WeightVector = std::vector<double>;

struct LearnSample {
    WeightVector weights;
    double reward = 0.0;
};

/// Sample 0 is the inherited vector, the others are Gaussian mutants of it.
inline std::vector<WeightVector> init_population(std::span<const double> inherited, Rng& rng,
                                                 const LearnerConfig& cfg) {
    std::vector<WeightVector> pop;
    pop.reserve(static_cast<std::size_t>(cfg.population));
    pop.emplace_back(inherited.begin(), inherited.end());
    for (int i = 1; i < cfg.population; ++i) {
        WeightVector w(inherited.begin(), inherited.end());
        for (double& v : w) v += gaussian(rng, 0.0, cfg.init_sd);
        pop.push_back(std::move(w));
    }
    return pop;
}

/// Reversible differential mutation of a triplet:
///   v1 = wi + F (wj - wk)
///   v2 = wj + F (wk - v1)
///   v3 = wk + F (v1 - v2)
inline std::array<WeightVector, 3> revde_mutate(std::span<const double> wi, std::span<const double> wj,
                                                std::span<const double> wk, double F) {
    if (wi.size() != wj.size() || wi.size() != wk.size()) {
        throw std::invalid_argument("revde triplet vectors differ in length");
    }
    const std::size_t n = wi.size();
    std::array<WeightVector, 3> v{WeightVector(n), WeightVector(n), WeightVector(n)};
    for (std::size_t d = 0; d < n; ++d) v[0][d] = wi[d] + F * (wj[d] - wk[d]);
    for (std::size_t d = 0; d < n; ++d) v[1][d] = wj[d] + F * (wk[d] - v[0][d]);
    for (std::size_t d = 0; d < n; ++d) v[2][d] = wk[d] + F * (v[0][d] - v[1][d]);
    return v;
}

/// u = m * candidate + (1 - m) * base with m_d ~ Bernoulli(CR).
inline WeightVector uniform_crossover(std::span<const double> candidate, std::span<const double> base, double cr,
                                      Rng& rng) {
    if (candidate.size() != base.size()) throw std::invalid_argument("crossover vectors differ in length");
    WeightVector u(candidate.size());
    for (std::size_t d = 0; d < u.size(); ++d) u[d] = uniform01(rng) < cr ? candidate[d] : base[d];
    return u;
}

struct LearnResult {
    WeightVector best;
    double best_reward = -std::numeric_limits<double>::infinity();
    double inherited_reward = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> curve;          // best-so-far reward after each iteration
    std::vector<LearnSample> samples;   // every assessed vector, in assessment order
    int assessments = 0;
    int discarded = 0;                  // samples dropped for a non-finite reward
};

/// Plus-selection RevDE. `assess(std::span<const double>) -> double` is the
/// reward (higher is better). Performs exactly cfg.total_assessments() calls.
template <typename Assess>
LearnResult learn(std::span<const double> inherited, Assess&& assess, const LearnerConfig& cfg, Rng& rng) {
    validate(cfg);
    LearnResult result;
    result.samples.reserve(static_cast<std::size_t>(cfg.total_assessments()));

    auto evaluate = [&](WeightVector w) {
        const double r = assess(std::span<const double>(w));
        ++result.assessments;
        result.samples.push_back({std::move(w), r});
        if (!std::isfinite(r)) ++result.discarded;
        return result.samples.size() - 1;
    };

    std::vector<std::size_t> population;  // indices into result.samples
    for (auto& w : init_population(inherited, rng, cfg)) {
        const std::size_t idx = evaluate(std::move(w));
        if (std::isfinite(result.samples[idx].reward)) population.push_back(idx);
    }
    result.inherited_reward = result.samples.front().reward;

    auto select = [&](std::vector<std::size_t> pool) {
        // Stable order: higher reward first, earlier sample first on ties.
        std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) {
            return result.samples[a].reward > result.samples[b].reward;
        });
        if (pool.size() > static_cast<std::size_t>(cfg.top)) pool.resize(static_cast<std::size_t>(cfg.top));
        return pool;
    };
    auto record_best = [&] {
        for (std::size_t idx : population) {
            if (result.samples[idx].reward > result.best_reward) {
                result.best_reward = result.samples[idx].reward;
                result.best = result.samples[idx].weights;
            }
        }
        result.curve.push_back(result.best_reward);
    };

    population = select(population);
    record_best();

    for (int it = 1; it < cfg.iterations; ++it) {
        std::vector<WeightVector> offspring;
        offspring.reserve(static_cast<std::size_t>(cfg.candidates));
        for (int t = 0; t < cfg.candidates / 3; ++t) {
            std::array<std::size_t, 3> pick{};
            if (population.size() >= 3) {
                std::vector<std::size_t> slots(population.size());
                std::iota(slots.begin(), slots.end(), std::size_t{0});
                for (std::size_t p = 0; p < 3; ++p) {
                    const std::size_t r = p + uniform_index(rng, slots.size() - p);
                    std::swap(slots[p], slots[r]);
                    pick[p] = population[slots[p]];
                }
            } else if (!population.empty()) {
                for (auto& p : pick) p = population[uniform_index(rng, population.size())];
            } else {
                pick.fill(0);  // nothing finite yet; perturb around the inherited vector
            }
            const auto& wi = result.samples[pick[0]].weights;
            const auto& wj = result.samples[pick[1]].weights;
            const auto& wk = result.samples[pick[2]].weights;
            auto v = revde_mutate(wi, wj, wk, cfg.scale);
            offspring.push_back(uniform_crossover(v[0], wi, cfg.crossover, rng));
            offspring.push_back(uniform_crossover(v[1], wj, cfg.crossover, rng));
            offspring.push_back(uniform_crossover(v[2], wk, cfg.crossover, rng));
        }
        std::vector<std::size_t> pool = population;
        for (auto& w : offspring) {
            const std::size_t idx = evaluate(std::move(w));
            if (std::isfinite(result.samples[idx].reward)) pool.push_back(idx);
        }
        population = select(std::move(pool));
        record_best();
    }

    if (result.best.empty() && !inherited.empty() && !std::isfinite(result.best_reward)) {
        result.best.assign(inherited.begin(), inherited.end());
    }
    return result;
}

}  // namespace lamarck
