#pragma once

// The outer inference loop: strip constants, infer partial solutions on the
// reduced alphabet with the GA, then re-add constants one group at a time,
// propagating position certainty until full successors are fixed.

#include "lsinfer/ga.hpp"

#include <iosfwd>

namespace lsinfer {

/// Erases constants C[k], C[k+1], ... from every word (brackets are stripped
/// together; cutting between [ and ] throws). Returns nullopt when a word
/// becomes empty (no solution on this branch).
std::optional<DevSequence> strip_constants(const DevSequence& rho, std::size_t constant_index);

/// Constant re-add levels in the fixed order; [ and ] form one level.
std::vector<std::vector<SymbolId>> constant_levels(const Alphabet& alphabet);

/// Successors over the level alphabet (V-bar plus the first `level` groups).
struct PartialSolution {
    std::size_t level = 0;
    std::vector<std::optional<Word>> successors;
};

struct PositionCertainty {
    SymbolId symbol = 0;
    bool projected_certain = false;  // produced span known over the previous level
    bool certain = false;            // produced span known at this level
    std::size_t begin = 0, end = 0;  // span in the next word when certain
};
using CertaintyMap = std::vector<std::vector<PositionCertainty>>;

enum class LiftStatus { Resolved, Ambiguous, CapExceeded, Dead };

struct LiftResult {
    LiftStatus status = LiftStatus::Dead;
    std::vector<PartialSolution> candidates;  // compatibility-validated at level+1
    CertaintyMap certainty;
};

/// Re-adds constant group `partial.level` by lining the new symbols up between
/// the known produced segments; unique placements become certain and
/// propagate, residual ambiguity is enumerated (up to `cap` combinations) and
/// validated by compatibility at the lifted level.
LiftResult lift_constant(const PartialSolution& partial,
                         const std::vector<std::vector<Word>>& level_words,
                         const AlphabetRef& alphabet,
                         const std::vector<std::vector<SymbolId>>& levels, std::size_t cap);

struct InferOptions {
    Scheme scheme = Scheme::ML;
    std::optional<GAConfig> ga;       // defaults to the scheme's tuned config
    bool lifo = false;                // depth-first dequeue instead of FIFO
    std::size_t lift_cap = 10'000;
    std::int64_t total_time_ms = 0;   // 0 = unlimited
    bool dump_bounds = false;
    std::ostream* diagnostics = nullptr;
};

enum class InferStatus { Found, Exhausted, Timeout };
std::string_view infer_status_name(InferStatus s);

struct InferResult {
    InferStatus status = InferStatus::Exhausted;
    std::optional<LSystem> system;
    std::int64_t generations = 0;   // summed over GA invocations
    std::int64_t ga_runs = 0;
    std::int64_t lifts = 0;
    std::int64_t wall_ms = 0;
};

/// Algorithm: reduce bounds on the full words; search the constant-free
/// projection with the chosen encoding; enqueue every fitness-0 solution; then
/// dequeue, lift the next constant group, and continue until a partial reaches
/// the full alphabet (returned after an unconditional compatibility check).
InferResult infer(const DevSequence& rho, const InferOptions& options = {});

}  // namespace lsinfer
