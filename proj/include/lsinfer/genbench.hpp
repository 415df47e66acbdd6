#pragma once

// Procedural D0L-system generation and the SR/MTTS benchmark harness.

#include "lsinfer/projection.hpp"

namespace lsinfer {

struct GeneratorConfig {
    int nonconstants = 2;
    std::string constant_glyphs = "[]+-F";
    int max_successor_len = 10;
    int max_axiom_len = 4;
    double base_nonconstant_prob = 0.80;
    double consecutive_decay = 0.20;
    std::uint64_t seed = 1;
    int max_attempts = 1000;
    // Coverage validation derives words until every nonconstant has occurred;
    // this caps the total symbols materialized while validating.
    std::int64_t validation_budget = 400'000;
};

/// Builds a random valid system: axiom of 1-4 nonconstants; successors built
/// position-wise with a nonconstant probability that decays per consecutive
/// nonconstant; branches properly nested with a direction symbol after every
/// [; regenerated until every nonconstant occurs within the first |V-bar|
/// words of the developmental sequence. Throws InputError after max_attempts.
LSystem generate_lsystem(const GeneratorConfig& cfg);

/// Axiom plus up to `steps` derivation steps, stopping early once every
/// nonconstant already occurs before the last word and the next word would
/// push the total symbol count past `budget`.
DevSequence derive_budgeted(const LSystem& sys, std::size_t steps, std::int64_t budget);

struct BenchmarkRecord {
    int id = 0;
    int size = 0;
    Scheme scheme = Scheme::ML;
    bool solved = false;
    std::int64_t ms = 0;
    std::int64_t generations = 0;
    std::uint64_t seed = 0;
};

struct BenchmarkSummary {
    int size = 0;
    int count = 0;
    double success_rate = 0;   // percent
    double mtts_ms = 0;        // mean time to solve
};

struct BenchmarkReport {
    std::vector<BenchmarkRecord> records;
    std::vector<BenchmarkSummary> summaries;
    std::vector<double> trend;  // polynomial fit coefficients, low degree first
};

struct BenchmarkOptions {
    Scheme scheme = Scheme::ML;
    GeneratorConfig generator;             // nonconstants/seed overridden per instance
    std::int64_t per_instance_time_ms = 60'000;
    std::int64_t sequence_budget = 400'000;
    int jobs = 1;
};

/// Generates `count` systems per size, derives up to |V-bar|+1 words, runs
/// infer, and re-verifies every claimed solve by compatibility.
BenchmarkReport run_benchmark(const std::vector<int>& sizes, int count,
                              const BenchmarkOptions& options);

std::string format_benchmark_text(const BenchmarkReport& report);
std::string format_benchmark_json(const BenchmarkReport& report);

}  // namespace lsinfer
