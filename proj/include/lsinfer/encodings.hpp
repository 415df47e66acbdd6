#pragma once

// Genome <-> candidate-system mappings for the six search-space encodings:
// ordered-sequence-of-symbols with 1- or 2-symbol context (osos1, osos2),
// growth-matrix literal (g), successor-length literal (l), and the
// row-reduced matrix variants (mg, ml) that search only the free variables of
// the exact linear systems Y*M = Z / Y*x = z.

#include "lsinfer/core.hpp"
#include "lsinfer/reduction.hpp"
#include "lsinfer/scanning.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace lsinfer {

using Rational = boost::multiprecision::cpp_rational;

enum class Scheme { OSOS1, OSOS2, G, L, MG, ML };

std::optional<Scheme> scheme_from_name(std::string_view name);  // osos1..ml
std::string_view scheme_name(Scheme scheme);

/// Fixed-length gene vector; OSoS schemes use reals in [0,1], the literal and
/// matrix schemes use bounded integers.
struct Genome {
    std::vector<double> reals;
    std::vector<std::int64_t> ints;

    bool operator==(const Genome&) const = default;
    bool operator<(const Genome& o) const {
        if (reals != o.reals) return reals < o.reals;
        return ints < o.ints;
    }
};

struct GeneRange {
    std::int64_t lo = 0, hi = 0;
    std::uint64_t width() const { return static_cast<std::uint64_t>(hi - lo + 1); }
};

// ---- exact linear systems ----------------------------------------------------

enum class MatrixMode { Lengths, Growth };

/// One row-reduced linear system in RREF over exact rationals. Unknown k is a
/// column; pivots are expressed as rhs - sum(coef * free).
struct LinearSystem {
    std::size_t unknowns = 0;
    std::vector<std::size_t> pivot_cols, free_cols;
    std::vector<Rational> pivot_rhs;                 // one per pivot
    std::vector<std::vector<Rational>> pivot_coef;   // [pivot][free index]
    bool inconsistent = false;
};

/// Row-reduces rows*x = rhs (dense) and returns the RREF description.
LinearSystem row_reduce(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs);

/// Evaluates a reduced system at the given free-variable values; nullopt when
/// any pivot comes out non-integral.
std::optional<std::vector<std::int64_t>> evaluate_system(
    const LinearSystem& sys, const std::vector<std::int64_t>& free_values);

struct MatrixFreeVar {
    SymbolId symbol = 0;   // the unknown's row symbol
    SymbolId target = 0;   // growth mode: the target column symbol
    GeneRange range;
};

/// Result of building Y*x = z (lengths) or the per-target-column systems of
/// Y*M = Z (growth), with constant rows substituted into the right-hand side.
struct MatrixSystemResult {
    enum class Kind { Unique, Reduced, NoSolution } kind = Kind::NoSolution;
    // Unique:
    LengthAssignment lens;       // Lengths mode
    GrowthMatrix growth;         // Growth mode
    // Reduced (and Unique, for inspection):
    std::vector<LinearSystem> systems;          // Lengths: 1; Growth: one per target
    std::vector<SymbolId> system_targets;       // Growth: target column per system
    std::vector<SymbolId> unknown_symbols;      // column -> symbol, same for all systems
    std::vector<MatrixFreeVar> free_vars;       // genome layout
};

MatrixSystemResult build_matrix_system(const std::vector<Word>& words,
                                       const BoundsState& st, MatrixMode mode);

// ---- encoding instances -------------------------------------------------------

/// A candidate decoded from a genome: successor per active symbol (constants
/// included as identity).
struct DecodedCandidate {
    std::vector<std::optional<Word>> successors;
};

/// The per-(scheme, bounds, words) search space: genome layout, sampling
/// ranges, and the decode function. Construction precomputes the corpus
/// n-gram tables (OSoS) or the reduced matrix systems (mg/ml).
class EncodingInstance {
public:
    EncodingInstance(Scheme scheme, const BoundsState& state, std::vector<Word> words);

    Scheme scheme() const { return scheme_; }
    const BoundsState& state() const { return state_; }
    const std::vector<Word>& words() const { return words_; }

    /// False when the space is provably empty (contradictory bounds or an
    /// infeasible matrix system).
    bool feasible() const { return feasible_; }
    bool uses_reals() const { return scheme_ == Scheme::OSOS1 || scheme_ == Scheme::OSOS2; }
    std::size_t gene_count() const { return uses_reals() ? real_gene_count_ : int_ranges_.size(); }
    const std::vector<GeneRange>& int_ranges() const { return int_ranges_; }

    /// Number of points for integer spaces (saturating; nullopt for real
    /// spaces with at least one gene).
    std::optional<std::uint64_t> space_size() const;

    std::optional<DecodedCandidate> decode(const Genome& genome) const;

    /// Canonical identity of what a genome maps to (successor tuple when the
    /// decode succeeds, the genome bytes otherwise).
    std::string solution_key(const std::optional<DecodedCandidate>& decoded,
                             const Genome& genome) const;

    const MatrixSystemResult* matrix_result() const {
        return matrix_ ? &*matrix_ : nullptr;
    }

    /// Test hook: candidate symbols and weights for the next middle slot of
    /// A's successor given the middle symbols placed so far. The no-symbol
    /// sentinel is reported with symbol = kNoSymbol.
    static constexpr int kNoSymbol = -1;
    std::vector<std::pair<int, double>> osos_slot_candidates(SymbolId a,
                                                             const Word& placed) const;

private:
    struct OsosLayout {
        SymbolId symbol;
        Word prefix, suffix;       // pinned genes
        std::size_t slots;         // free middle genes
    };

    std::optional<DecodedCandidate> decode_lengths(const LengthAssignment& lens) const;
    std::optional<DecodedCandidate> decode_growth(const GrowthMatrix& m) const;
    std::optional<Word> decode_osos_symbol(const OsosLayout& layout, const double* genes) const;
    std::vector<std::pair<int, double>> slot_candidates(const OsosLayout& layout,
                                                        const Word& placed) const;

    Scheme scheme_;
    BoundsState state_;
    std::vector<Word> words_;
    bool feasible_ = true;

    std::vector<SymbolId> unknown_symbols_;   // active nonconstants, id order
    std::vector<GeneRange> int_ranges_;
    std::size_t real_gene_count_ = 0;

    // L / G gene maps
    std::vector<SymbolId> gene_symbol_;               // L: per gene
    std::vector<std::pair<SymbolId, SymbolId>> gene_pair_;  // G: per gene

    // OSoS
    std::vector<OsosLayout> osos_;
    std::vector<std::size_t> dense_;                  // symbol id -> dense index
    std::vector<SymbolId> dense_rev_;
    std::vector<std::int64_t> uni_, bi_, tri_;        // n-gram counts over dense ids

    std::optional<MatrixSystemResult> matrix_;
};

}  // namespace lsinfer
