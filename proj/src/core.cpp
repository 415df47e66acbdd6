#include "lsinfer/core.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <sstream>

namespace lsinfer {

namespace {
constexpr std::string_view kTurtleOrder = "[]+-&^\\/|Ff";
}

int turtle_rank(char glyph) {
    auto pos = kTurtleOrder.find(glyph);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

bool is_turtle_glyph(char glyph) { return turtle_rank(glyph) >= 0; }

bool is_valid_glyph(char glyph) {
    unsigned char c = static_cast<unsigned char>(glyph);
    return std::isalnum(c) || is_turtle_glyph(glyph);
}

Alphabet::Alphabet() { std::fill(std::begin(lookup_), std::end(lookup_), -1); }

std::shared_ptr<const Alphabet> Alphabet::make(std::string_view glyphs,
                                               std::string_view constant_glyphs) {
    auto alpha = std::make_shared<Alphabet>();
    std::string constants(constant_glyphs);
    std::sort(constants.begin(), constants.end(), [](char a, char b) {
        int ra = turtle_rank(a), rb = turtle_rank(b);
        if ((ra >= 0) != (rb >= 0)) return ra >= 0;
        if (ra >= 0) return ra < rb;
        return a < b;
    });
    constants.erase(std::unique(constants.begin(), constants.end()), constants.end());

    std::string nonconstants;
    for (char g : glyphs) {
        if (!is_valid_glyph(g))
            throw InputError(std::string("invalid glyph '") + g + "'");
        if (constants.find(g) == std::string::npos &&
            nonconstants.find(g) == std::string::npos)
            nonconstants.push_back(g);
    }
    std::sort(nonconstants.begin(), nonconstants.end());
    for (char g : constants) {
        if (!is_valid_glyph(g))
            throw InputError(std::string("invalid constant glyph '") + g + "'");
        if (glyphs.find(g) == std::string_view::npos)
            throw InputError(std::string("constant '") + g + "' does not occur in the alphabet");
    }

    alpha->glyphs_ = nonconstants + constants;
    alpha->nonconstant_count_ = nonconstants.size();
    if (alpha->glyphs_.size() > 200)
        throw InputError("alphabet too large");
    for (std::size_t i = 0; i < alpha->glyphs_.size(); ++i)
        alpha->lookup_[static_cast<unsigned char>(alpha->glyphs_[i])] = static_cast<int>(i);
    alpha->open_bracket_ = alpha->id_of('[');
    alpha->close_bracket_ = alpha->id_of(']');
    if ((alpha->open_bracket_ >= 0) != (alpha->close_bracket_ >= 0))
        throw InputError("alphabet has one bracket glyph without its partner");
    return alpha;
}

std::vector<SymbolId> Alphabet::constants() const {
    std::vector<SymbolId> out;
    for (std::size_t i = nonconstant_count_; i < glyphs_.size(); ++i)
        out.push_back(static_cast<SymbolId>(i));
    return out;
}

std::vector<SymbolId> Alphabet::nonconstants() const {
    std::vector<SymbolId> out;
    for (std::size_t i = 0; i < nonconstant_count_; ++i)
        out.push_back(static_cast<SymbolId>(i));
    return out;
}

Word Alphabet::intern(std::string_view text) const {
    Word w;
    w.reserve(text.size());
    for (char g : text) {
        int id = id_of(g);
        if (id < 0) throw InputError(std::string("unknown glyph '") + g + "'");
        w.push_back(static_cast<SymbolId>(id));
    }
    return w;
}

std::string Alphabet::render(const Word& w) const {
    std::string out;
    out.reserve(w.size());
    for (SymbolId s : w) out.push_back(glyph(s));
    return out;
}

std::int64_t GrowthMatrix::row_sum(std::size_t a) const {
    return std::accumulate(values.begin() + a * n, values.begin() + (a + 1) * n,
                           std::int64_t{0});
}

LSystem make_lsystem(AlphabetRef alphabet, Word axiom, std::vector<Word> productions) {
    if (!alphabet) throw InputError("missing alphabet");
    if (axiom.empty()) throw InputError("axiom is empty");
    if (productions.size() != alphabet->size())
        throw InputError("production table size does not match alphabet");
    for (std::size_t id = 0; id < productions.size(); ++id) {
        const Word& s = productions[id];
        if (s.empty()) throw InputError("empty successor");
        if (alphabet->is_constant(static_cast<SymbolId>(id))) {
            // identity by definition; the bracket constants are their own
            // (unbalanced) successors
            if (!(s.size() == 1 && s[0] == id))
                throw InputError("constant successor is not the identity");
        } else if (!check_nesting(*alphabet, s)) {
            throw InputError("successor is not properly nested");
        }
    }
    if (!check_nesting(*alphabet, axiom))
        throw InputError("axiom is not properly nested");
    LSystem sys;
    sys.alphabet = std::move(alphabet);
    sys.axiom = std::move(axiom);
    sys.productions = std::move(productions);
    return sys;
}

Word derive_step(const LSystem& sys, const Word& w) {
    std::size_t total = 0;
    for (SymbolId s : w) {
        if (s >= sys.productions.size()) throw InputError("symbol outside alphabet");
        total += sys.productions[s].size();
    }
    Word out;
    out.reserve(total);
    for (SymbolId s : w) {
        const Word& succ = sys.productions[s];
        out.insert(out.end(), succ.begin(), succ.end());
    }
    return out;
}

DevSequence derive_sequence(const LSystem& sys, std::size_t steps) {
    if (steps < 1) throw InputError("steps must be >= 1");
    DevSequence rho;
    rho.alphabet = sys.alphabet;
    rho.words.reserve(steps + 1);
    rho.words.push_back(sys.axiom);
    for (std::size_t i = 0; i < steps; ++i)
        rho.words.push_back(derive_step(sys, rho.words.back()));
    return rho;
}

ParikhVector parikh(const Word& w, std::size_t alphabet_size) {
    ParikhVector counts(alphabet_size, 0);
    for (SymbolId s : w) ++counts[s];
    return counts;
}

GrowthMatrix growth_matrix(const LSystem& sys) {
    std::size_t n = sys.alphabet->size();
    GrowthMatrix m(n);
    for (std::size_t a = 0; a < n; ++a)
        for (SymbolId b : sys.productions[a]) ++m.at(a, b);
    return m;
}

bool is_compatible(const LSystem& sys, const DevSequence& rho) {
    if (!rho.alphabet || !(*rho.alphabet == *sys.alphabet)) return false;
    if (rho.words.size() < 2) return false;
    Word current = rho.words.front();
    for (std::size_t i = 1; i < rho.words.size(); ++i) {
        std::size_t total = 0;
        for (SymbolId s : current) total += sys.productions[s].size();
        if (total != rho.words[i].size()) return false;
        current = derive_step(sys, current);
        if (current != rho.words[i]) return false;
    }
    return true;
}

bool check_nesting(const Alphabet& alphabet, const Word& w) {
    if (!alphabet.has_brackets()) return true;
    SymbolId open = static_cast<SymbolId>(alphabet.open_bracket());
    SymbolId close = static_cast<SymbolId>(alphabet.close_bracket());
    std::int64_t depth = 0;
    for (SymbolId s : w) {
        if (s == open) ++depth;
        else if (s == close && --depth < 0) return false;
    }
    return depth == 0;
}

std::optional<Word> derive_step_table(const std::vector<std::optional<Word>>& table,
                                      const Word& w, std::int64_t max_len) {
    std::int64_t total = 0;
    for (SymbolId s : w) {
        if (s >= table.size() || !table[s]) return std::nullopt;
        total += static_cast<std::int64_t>(table[s]->size());
        if (max_len > 0 && total > max_len) return std::nullopt;
    }
    Word out;
    out.reserve(static_cast<std::size_t>(total));
    for (SymbolId s : w) {
        const Word& succ = *table[s];
        out.insert(out.end(), succ.begin(), succ.end());
    }
    return out;
}

bool table_compatible(const std::vector<std::optional<Word>>& table,
                      const std::vector<Word>& words) {
    if (words.size() < 2) return false;
    Word current = words.front();
    for (std::size_t i = 1; i < words.size(); ++i) {
        auto next = derive_step_table(table, current,
                                      static_cast<std::int64_t>(words[i].size()));
        if (!next || *next != words[i]) return false;
        current = std::move(*next);
    }
    return true;
}

Word filter_word(const Word& w, const std::vector<char>& keep) {
    Word out;
    out.reserve(w.size());
    for (SymbolId s : w)
        if (keep[s]) out.push_back(s);
    return out;
}

// ---- text formats -----------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        out.push_back(text.substr(start, end - start));
        start = end + 1;
        if (end == text.size()) break;
    }
    return out;
}

bool strip_key(std::string_view& line, std::string_view key) {
    auto t = trim(line);
    if (t.substr(0, key.size()) != key) return false;
    line = trim(t.substr(key.size()));
    return true;
}

}  // namespace

LSystem parse_lsystem(std::string_view text) {
    std::optional<std::string> axiom_text;
    std::string constants;
    std::vector<std::pair<char, std::string>> rules;
    for (std::string_view raw : lines_of(text)) {
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::string_view value = line;
        if (strip_key(value, "axiom:")) {
            if (axiom_text) throw InputError("duplicate axiom line");
            axiom_text = std::string(value);
            continue;
        }
        value = line;
        if (strip_key(value, "constants:")) {
            constants = std::string(value);
            continue;
        }
        std::size_t arrow = line.find("->");
        if (arrow == std::string_view::npos)
            throw InputError("malformed L-system line: " + std::string(line));
        std::string_view lhs = trim(line.substr(0, arrow));
        std::string_view rhs = trim(line.substr(arrow + 2));
        if (lhs.size() != 1) throw InputError("production predecessor must be one glyph");
        if (rhs.empty()) throw InputError("empty successor for " + std::string(lhs));
        rules.emplace_back(lhs[0], std::string(rhs));
    }
    if (!axiom_text || axiom_text->empty()) throw InputError("missing axiom");

    std::string glyphs = *axiom_text + constants;
    for (auto& [lhs, rhs] : rules) {
        glyphs.push_back(lhs);
        glyphs += rhs;
    }
    auto alpha = Alphabet::make(glyphs, constants);

    std::vector<Word> productions(alpha->size());
    std::vector<bool> seen(alpha->size(), false);
    for (auto& [lhs, rhs] : rules) {
        SymbolId id = static_cast<SymbolId>(alpha->id_of(lhs));
        if (seen[id]) throw InputError(std::string("duplicate production for '") + lhs + "'");
        seen[id] = true;
        productions[id] = alpha->intern(rhs);
        if (alpha->is_constant(id) && !(productions[id].size() == 1 && productions[id][0] == id))
            throw InputError(std::string("constant '") + lhs + "' must have an identity production");
    }
    for (SymbolId id = 0; id < alpha->size(); ++id) {
        if (alpha->is_constant(id)) {
            productions[id] = Word{id};
        } else if (!seen[id]) {
            throw InputError(std::string("no production for nonconstant '") +
                             alpha->glyph(id) + "'");
        }
    }
    return make_lsystem(alpha, alpha->intern(*axiom_text), std::move(productions));
}

std::string format_lsystem(const LSystem& sys) {
    const Alphabet& a = *sys.alphabet;
    std::string out = "axiom: " + a.render(sys.axiom) + "\n";
    if (a.constant_count() > 0) {
        out += "constants: ";
        for (SymbolId c : a.constants()) out.push_back(a.glyph(c));
        out += "\n";
    }
    for (SymbolId id : a.nonconstants()) {
        out.push_back(a.glyph(id));
        out += " -> " + a.render(sys.productions[id]) + "\n";
    }
    return out;
}

DevSequence parse_sequence(std::string_view text,
                           std::optional<std::string> constants_override) {
    std::optional<std::string> header_constants;
    std::vector<std::string> word_lines;
    for (std::string_view raw : lines_of(text)) {
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::string_view value = line;
        if (strip_key(value, "constants:")) {
            if (!word_lines.empty())
                throw InputError("constants header must precede the words");
            header_constants = std::string(value);
            continue;
        }
        word_lines.emplace_back(line);
    }
    if (word_lines.size() < 2)
        throw InputError("a developmental sequence needs at least two words");

    std::string glyphs;
    for (const auto& w : word_lines) glyphs += w;
    std::string constants;
    if (constants_override) {
        constants = *constants_override;
    } else if (header_constants) {
        constants = *header_constants;
    } else {
        for (char g : kTurtleOrder)
            if (glyphs.find(g) != std::string::npos) constants.push_back(g);
    }
    for (char c : constants)
        if (glyphs.find(c) == std::string::npos)
            throw InputError(std::string("constant '") + c +
                             "' does not occur in the sequence");
    auto alpha = Alphabet::make(glyphs, constants);

    DevSequence rho;
    rho.alphabet = alpha;
    for (const auto& w : word_lines) {
        rho.words.push_back(alpha->intern(w));
        if (rho.words.back().empty()) throw InputError("empty word in sequence");
    }
    return rho;
}

std::string format_sequence(const DevSequence& rho) {
    std::string out;
    for (const Word& w : rho.words) out += rho.alphabet->render(w) + "\n";
    return out;
}

}  // namespace lsinfer
