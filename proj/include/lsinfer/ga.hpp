#pragma once

// Genetic-algorithm engine: roulette selection over unrepeated pairs, uniform
// crossover, per-gene mutation with a forced mutation on untouched children,
// solution-identity duplicate culling, elite survival; plus the fitness
// function, termination conditions, and the hyperparameter random search.

#include "lsinfer/encodings.hpp"

#include <chrono>
#include <functional>
#include <limits>

namespace lsinfer {

struct GAConfig {
    int population = 100;
    double crossover = 0.85;
    double mutation = 0.10;
    int min_generations = 1000;
    std::int64_t time_limit_ms = 60'000;
    std::uint64_t seed = 1;
};

/// Tuned defaults per scheme.
GAConfig default_ga_config(Scheme scheme);

using FitnessValue = double;
inline constexpr FitnessValue kMaxFitness = std::numeric_limits<double>::infinity();

/// 0 iff the candidate reproduces every word. Otherwise: derive from words[0];
/// a derived word more than twice as long as the observed one is the max
/// sentinel; the first diverging word contributes its error count (symbols past
/// the longest common prefix, counted over the longer word) divided by the
/// observed length, plus one for every unchecked later derivation.
FitnessValue fitness_table(const std::vector<std::optional<Word>>& successors,
                           const std::vector<Word>& words);
FitnessValue fitness(const LSystem& candidate, const DevSequence& rho);

struct Deadline {
    std::chrono::steady_clock::time_point at{};
    bool enabled = false;

    static Deadline none() { return {}; }
    static Deadline in_ms(std::int64_t ms) {
        return {std::chrono::steady_clock::now() + std::chrono::milliseconds(ms), true};
    }
    bool expired() const { return enabled && std::chrono::steady_clock::now() >= at; }
    Deadline tightened(std::int64_t ms) const {
        Deadline d = in_ms(ms);
        if (enabled && at < d.at) d.at = at;
        return d;
    }
};

enum class Termination { Solved, Converged, Timeout };
std::string_view termination_name(Termination t);

struct FoundSolution {
    std::vector<std::optional<Word>> successors;
    Genome genome;
};

struct SearchReport {
    FitnessValue best = kMaxFitness;
    std::vector<FoundSolution> solutions;   // fitness-0, deduplicated, discovery order
    std::int64_t generations = 0;
    std::int64_t wall_ms = 0;
    Termination termination = Termination::Converged;
};

/// Runs the GA (or an exhaustive sweep when the space is small enough to
/// enumerate) on one encoding instance. Deterministic for a fixed
/// (space, cfg, seed); single-threaded.
SearchReport run_ga(const EncodingInstance& space, const GAConfig& cfg,
                    Deadline global = Deadline::none());

// ---- hyperparameter random search -------------------------------------------

struct TrialOutcome {
    double fitness_sum = 0;      // summed best fitness across the suite
    std::int64_t wall_ms = 0;    // tie-break: faster wins
};

/// Random search over (P, C, M): sixteen trials per round, each parameter
/// perturbed by at most two ladder increments, adopting a strictly better
/// outcome; stops after one round with no improvement. `trial` evaluates a
/// configuration on the benchmark suite.
GAConfig hyperparameter_search(const std::function<TrialOutcome(const GAConfig&)>& trial,
                               Scheme scheme, std::uint64_t seed);

}  // namespace lsinfer
