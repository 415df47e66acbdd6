#include "lsinfer/scanning.hpp"

namespace lsinfer {

ScanResult scan_successors(const Alphabet& alphabet, const std::vector<Word>& words,
                           const LengthAssignment& lens) {
    ScanResult result;
    result.successors.assign(alphabet.size(), std::nullopt);
    for (SymbolId c = 0; c < alphabet.size(); ++c)
        if (alphabet.is_constant(c)) result.successors[c] = Word{c};

    for (std::size_t i = 0; i + 1 < words.size(); ++i) {
        const Word& src = words[i];
        const Word& dst = words[i + 1];
        std::size_t cursor = 0;
        for (SymbolId s : src) {
            std::size_t len = static_cast<std::size_t>(lens[s]);
            if (cursor + len > dst.size()) {
                result.status = ScanStatus::OVERRUN;
                return result;
            }
            auto window_begin = dst.begin() + static_cast<std::ptrdiff_t>(cursor);
            auto window_end = window_begin + static_cast<std::ptrdiff_t>(len);
            if (result.successors[s]) {
                const Word& known = *result.successors[s];
                if (known.size() != len || !std::equal(known.begin(), known.end(), window_begin)) {
                    result.status = ScanStatus::CONFLICT;
                    return result;
                }
            } else {
                Word succ(window_begin, window_end);
                if (!check_nesting(alphabet, succ)) {
                    result.status = ScanStatus::NESTING;
                    return result;
                }
                result.successors[s] = std::move(succ);
            }
            cursor += len;
        }
        if (cursor != dst.size()) {
            result.status = ScanStatus::UNDERRUN;
            return result;
        }
    }

    // A nonconstant that never occurs before the last word has an
    // undeterminable successor; such candidates are rejected.
    for (SymbolId s = 0; s < alphabet.size(); ++s) {
        bool occurs = false;
        for (const Word& w : words)
            if (std::find(w.begin(), w.end(), s) != w.end()) { occurs = true; break; }
        if (occurs && !result.successors[s]) {
            result.status = ScanStatus::UNSEEN;
            return result;
        }
    }

    // Window consistency already held; re-derivation eliminates cursor bugs.
    if (!table_compatible(result.successors, words)) {
        result.status = ScanStatus::CONFLICT;
        return result;
    }
    result.status = ScanStatus::OK;
    return result;
}

ScanSystemResult scan_lsystem(const DevSequence& rho, const LengthAssignment& lens) {
    ScanSystemResult out;
    ScanResult scan = scan_successors(*rho.alphabet, rho.words, lens);
    out.status = scan.status;
    if (scan.status != ScanStatus::OK) return out;
    std::vector<Word> productions(rho.alphabet->size());
    for (SymbolId s = 0; s < rho.alphabet->size(); ++s) {
        if (scan.successors[s]) {
            productions[s] = std::move(*scan.successors[s]);
        } else {
            // a symbol entirely absent from rho cannot be a nonconstant here
            out.status = ScanStatus::UNSEEN;
            return out;
        }
    }
    LSystem sys;
    sys.alphabet = rho.alphabet;
    sys.axiom = rho.words.front();
    sys.productions = std::move(productions);
    out.system = std::move(sys);
    return out;
}

std::optional<LengthAssignment> lens_from_growth(const GrowthMatrix& m, std::int64_t min_len) {
    LengthAssignment lens(m.n, 0);
    for (std::size_t a = 0; a < m.n; ++a) {
        lens[a] = m.row_sum(a);
        if (lens[a] < min_len) return std::nullopt;
    }
    return lens;
}

}  // namespace lsinfer
