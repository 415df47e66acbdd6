#pragma once

// Deduction state for the search-space reduction rules: per-symbol successor
// length bounds, per-pair growth bounds, successor fragments, and marker
// associations, refined to a fixpoint. All rules are necessary conditions:
// every system compatible with the words stays inside the bounds.

#include "lsinfer/core.hpp"

namespace lsinfer {

/// An exact sub-derivation: src derives dst in one step. Slicing by markers
/// splits segments into smaller exact sub-derivations.
struct DerivationSegment {
    Word src, dst;
    std::size_t derivation = 0;      // index i of omega_i => omega_{i+1}
    std::size_t src_off = 0, dst_off = 0;  // offsets in the original words
};

/// A recorded unique marker association (positions in the original words).
struct MarkerAssociation {
    std::size_t derivation = 0;
    std::size_t src_pos = 0;
    std::size_t dst_pos = 0;
    std::size_t length = 0;
};

struct BoundsState {
    AlphabetRef alphabet;
    std::vector<char> active;            // per id: symbol participates at this level
    std::int64_t min_len_floor = 1;      // 0 on projected levels

    std::vector<std::int64_t> len_min, len_max;
    GrowthMatrix g_min, g_max;

    // Fragments, per symbol id. pre/suf: longest known prefix/suffix of the
    // successor. sup: shortest known word having the successor as a prefix
    // (successor-start aligned superstring). sub: longest known subword.
    std::vector<Word> pre, suf, sub;
    std::vector<std::optional<Word>> sup;

    // Fully determined successors (constants start known as themselves).
    std::vector<std::optional<Word>> known;

    std::vector<DerivationSegment> segments;
    std::vector<MarkerAssociation> marker_log;

    bool no_solution = false;

    bool is_active(SymbolId s) const { return active[s] != 0; }
    bool is_known(SymbolId s) const { return known[s].has_value(); }
    bool all_known() const;
    std::int64_t slack() const;           // sum of bound widths, for tests

    // Sound tightenings; each flips no_solution on contradiction.
    bool tighten_len_min(SymbolId a, std::int64_t v);
    bool tighten_len_max(SymbolId a, std::int64_t v);
    bool tighten_g_min(SymbolId a, SymbolId b, std::int64_t v);
    bool tighten_g_max(SymbolId a, SymbolId b, std::int64_t v);
    bool update_pre(SymbolId a, const Word& fragment);
    bool update_suf(SymbolId a, const Word& fragment);
    bool update_sup(SymbolId a, const Word& fragment);
    bool learn(SymbolId a, const Word& successor);
};

/// Fresh state over `words` restricted to `active` symbols. Bounds start at
/// the weakest necessary conditions; constants are pinned to identity.
BoundsState init_bounds(const std::vector<Word>& words, AlphabetRef alphabet,
                        std::vector<char> active, std::int64_t min_len_floor);
/// Full-alphabet convenience overload (min length 1, all symbols active).
BoundsState init_bounds(const DevSequence& rho);

/// One pass of each rule family; returns true when anything changed.
bool refine_fragments(BoundsState& st);
bool build_marker_map(BoundsState& st);
bool refine_growth_bounds(BoundsState& st);
bool refine_length_bounds(BoundsState& st);

/// Runs the rules alternately until none reports a change. Returns false when
/// the state is contradictory (no compatible system exists for this branch).
bool fixpoint(BoundsState& st);

/// Carries sound knowledge from a wider-alphabet state into a level state:
/// fragments/knowns are projected (inactive symbols erased), growth bounds for
/// active pairs copied, lengths recomputed from projected growth.
void absorb_projected(BoundsState& st, const BoundsState& wider);

/// Debug dump: one line per active symbol and per nontrivial pair.
std::string dump_bounds(const BoundsState& st);

}  // namespace lsinfer
