#pragma once

// Alphabets, words, D0L-systems, derivation, Parikh/growth analytics and
// compatibility checking. Everything here is immutable after construction
// and safe to share across threads.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lsinfer {

using SymbolId = std::uint8_t;
using Word = std::vector<SymbolId>;

/// Thrown for malformed user input (files, glyphs, flags).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Turtle-interpretation glyphs in their fixed ordering:
/// [ ] + - then yaw/pitch/roll/turn (& ^ \ / |), then F f.
int turtle_rank(char glyph);            // -1 when not a turtle glyph
bool is_turtle_glyph(char glyph);
bool is_valid_glyph(char glyph);        // letters, digits, turtle glyphs

/// Symbol table. Nonconstants get ids [0, nonconstant_count()), ordered by
/// glyph; constants follow, ordered by the fixed turtle ordering (non-turtle
/// constants after, by glyph).
class Alphabet {
public:
    Alphabet();

    /// glyphs: every symbol of V (duplicates ignored); constant_glyphs: C.
    /// Throws InputError on invalid glyphs or constants outside V.
    static std::shared_ptr<const Alphabet> make(std::string_view glyphs,
                                                std::string_view constant_glyphs);

    std::size_t size() const { return glyphs_.size(); }
    std::size_t nonconstant_count() const { return nonconstant_count_; }
    std::size_t constant_count() const { return glyphs_.size() - nonconstant_count_; }

    bool is_constant(SymbolId id) const { return id >= nonconstant_count_; }
    char glyph(SymbolId id) const { return glyphs_[id]; }
    int id_of(char glyph) const { return lookup_[static_cast<unsigned char>(glyph)]; }

    /// Constants in the fixed order (ids nonconstant_count()..size()-1).
    std::vector<SymbolId> constants() const;
    std::vector<SymbolId> nonconstants() const;

    bool has_brackets() const { return open_bracket_ >= 0 && close_bracket_ >= 0; }
    int open_bracket() const { return open_bracket_; }
    int close_bracket() const { return close_bracket_; }

    Word intern(std::string_view text) const;  // throws InputError on unknown glyph
    std::string render(const Word& w) const;

    bool operator==(const Alphabet& other) const {
        return glyphs_ == other.glyphs_ && nonconstant_count_ == other.nonconstant_count_;
    }

private:
    std::string glyphs_;                // indexed by id
    std::size_t nonconstant_count_ = 0;
    int lookup_[256];                   // glyph -> id, -1 when absent
    int open_bracket_ = -1, close_bracket_ = -1;
};

using AlphabetRef = std::shared_ptr<const Alphabet>;

/// A deterministic context-free L-system: one successor per symbol,
/// constants map to themselves, no successor empty.
struct LSystem {
    AlphabetRef alphabet;
    Word axiom;
    std::vector<Word> productions;      // indexed by SymbolId, size = |V|

    const Word& successor(SymbolId id) const { return productions[id]; }
};

/// Builds an LSystem and validates the invariants (nonempty successors,
/// identity constants, proper nesting, nonempty axiom). Throws InputError.
LSystem make_lsystem(AlphabetRef alphabet, Word axiom, std::vector<Word> productions);

/// The observed evidence: words (omega_1..omega_n), n >= 2, same alphabet.
struct DevSequence {
    AlphabetRef alphabet;
    std::vector<Word> words;

    std::size_t length() const { return words.size(); }
};

using ParikhVector = std::vector<std::int64_t>;

/// Row-major |V| x |V| matrix of nonnegative counts; entry (a,b) counts b in succ(a).
struct GrowthMatrix {
    std::size_t n = 0;
    std::vector<std::int64_t> values;

    GrowthMatrix() = default;
    explicit GrowthMatrix(std::size_t size) : n(size), values(size * size, 0) {}
    std::int64_t& at(std::size_t a, std::size_t b) { return values[a * n + b]; }
    std::int64_t at(std::size_t a, std::size_t b) const { return values[a * n + b]; }
    std::int64_t row_sum(std::size_t a) const;
    bool operator==(const GrowthMatrix&) const = default;
};

// ---- operations ------------------------------------------------------------

/// One parallel rewriting step: succ(A_1)...succ(A_m).
Word derive_step(const LSystem& sys, const Word& w);

/// Axiom plus `steps` derivation steps: (omega_1 .. omega_{steps+1}).
DevSequence derive_sequence(const LSystem& sys, std::size_t steps);

/// Per-symbol occurrence counts of w.
ParikhVector parikh(const Word& w, std::size_t alphabet_size);

GrowthMatrix growth_matrix(const LSystem& sys);

/// True iff rho is exactly the developmental sequence of sys starting at rho's
/// first word.
bool is_compatible(const LSystem& sys, const DevSequence& rho);

/// True iff [ and ] are balanced and properly nested in w (vacuously true when
/// the alphabet has no brackets).
bool check_nesting(const Alphabet& alphabet, const Word& w);

// ---- low-level helpers shared by the search modules ------------------------

/// derive_step against a sparse successor table (entries may be absent for
/// symbols that cannot occur). Returns nullopt when a needed successor is
/// missing, or when `max_len` > 0 and the output would exceed it. Successors
/// here may be empty (projected alphabets).
std::optional<Word> derive_step_table(const std::vector<std::optional<Word>>& table,
                                      const Word& w, std::int64_t max_len = 0);

/// is_compatible against a successor table; words[0] is the start word.
bool table_compatible(const std::vector<std::optional<Word>>& table,
                      const std::vector<Word>& words);

/// Copy of w with only the symbols whose keep[] entry is nonzero.
Word filter_word(const Word& w, const std::vector<char>& keep);

// ---- text formats -----------------------------------------------------------

/// Text L-system format:
///   axiom: <word>
///   constants: <glyphs>        (omitted when C is empty)
///   <glyph> -> <word>          one line per nonconstant production
/// Whitespace-insensitive around tokens on input; the writer is bit-exact.
LSystem parse_lsystem(std::string_view text);
std::string format_lsystem(const LSystem& sys);

/// Sequence file: optional leading `constants: <glyphs>` header, then one word
/// per line, first word line = omega_1. `constants_override`, when set,
/// replaces both the header and the default (turtle glyphs present in the
/// words). Throws InputError when fewer than two words, or when requested
/// constants do not occur in the words.
DevSequence parse_sequence(std::string_view text,
                           std::optional<std::string> constants_override = std::nullopt);
std::string format_sequence(const DevSequence& rho);

}  // namespace lsinfer
