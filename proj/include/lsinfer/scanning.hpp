#pragma once

// Reconstruction of a full production set from a hypothesized successor-length
// assignment by a single left-to-right pass over the developmental sequence.

#include "lsinfer/core.hpp"

namespace lsinfer {

/// Successor length per symbol id. Constants are fixed at 1. At the full
/// alphabet every length is >= 1; on projected alphabets lengths may be 0.
using LengthAssignment = std::vector<std::int64_t>;

enum class ScanStatus {
    OK,
    CONFLICT,   // a re-encountered symbol's window disagrees with its record
    OVERRUN,    // cursor exceeds the produced word
    UNDERRUN,   // produced word not fully consumed
    NESTING,    // an extracted successor fails check_nesting
    UNSEEN,     // a nonconstant never occurs before the last word
};

struct ScanResult {
    ScanStatus status = ScanStatus::OK;
    // Valid only when status == OK: one successor per symbol id; entries stay
    // empty optionals for symbols absent from the words (constants get their
    // identity).
    std::vector<std::optional<Word>> successors;
};

/// Walks each derivation omega_i => omega_{i+1} with a cursor: the first
/// encounter of A records the next lens[A] symbols as succ(A); later
/// encounters verify. Success requires full consumption everywhere plus a
/// final re-derivation check. Works on any word list over `alphabet`
/// (projected levels included; `active_symbols` limits which ids may occur).
ScanResult scan_successors(const Alphabet& alphabet, const std::vector<Word>& words,
                           const LengthAssignment& lens);

/// Convenience wrapper for full-alphabet sequences: on success assembles a
/// validated LSystem with rho's first word as axiom.
struct ScanSystemResult {
    ScanStatus status = ScanStatus::OK;
    std::optional<LSystem> system;
};
ScanSystemResult scan_lsystem(const DevSequence& rho, const LengthAssignment& lens);

/// Row sums of a candidate growth matrix, as a length assignment.
/// Lengths below min_len (1 at the full level, 0 on projected levels) reject
/// the candidate (returns nullopt).
std::optional<LengthAssignment> lens_from_growth(const GrowthMatrix& m,
                                                 std::int64_t min_len = 1);

}  // namespace lsinfer
