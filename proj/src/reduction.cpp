#include "lsinfer/reduction.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace lsinfer {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

bool starts_with(const Word& w, const Word& prefix) {
    return prefix.size() <= w.size() && std::equal(prefix.begin(), prefix.end(), w.begin());
}

bool ends_with(const Word& w, const Word& suffix) {
    return suffix.size() <= w.size() &&
           std::equal(suffix.rbegin(), suffix.rend(), w.rbegin());
}

bool is_subword(const Word& w, const Word& sub) {
    return sub.empty() || std::search(w.begin(), w.end(), sub.begin(), sub.end()) != w.end();
}

std::size_t common_prefix_len(const Word& a, const Word& b) {
    std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

std::int64_t count_symbol(const Word& w, SymbolId s) {
    return static_cast<std::int64_t>(std::count(w.begin(), w.end(), s));
}

}  // namespace

bool BoundsState::all_known() const {
    for (SymbolId s = 0; s < known.size(); ++s)
        if (is_active(s) && !known[s]) return false;
    return true;
}

std::int64_t BoundsState::slack() const {
    std::int64_t total = 0;
    std::size_t n = alphabet->size();
    for (SymbolId a = 0; a < n; ++a) {
        if (!is_active(a)) continue;
        total += len_max[a] - len_min[a];
        for (SymbolId b = 0; b < n; ++b)
            if (is_active(b)) total += g_max.at(a, b) - g_min.at(a, b);
    }
    return total;
}

bool BoundsState::tighten_len_min(SymbolId a, std::int64_t v) {
    if (no_solution || v <= len_min[a]) return false;
    len_min[a] = v;
    if (len_min[a] > len_max[a]) no_solution = true;
    return true;
}

bool BoundsState::tighten_len_max(SymbolId a, std::int64_t v) {
    if (no_solution || v >= len_max[a]) return false;
    len_max[a] = v;
    if (len_min[a] > len_max[a] ||
        len_max[a] < static_cast<std::int64_t>(pre[a].size()) ||
        len_max[a] < static_cast<std::int64_t>(suf[a].size()))
        no_solution = true;
    return true;
}

bool BoundsState::tighten_g_min(SymbolId a, SymbolId b, std::int64_t v) {
    if (no_solution || v <= g_min.at(a, b)) return false;
    g_min.at(a, b) = v;
    if (g_min.at(a, b) > g_max.at(a, b)) no_solution = true;
    return true;
}

bool BoundsState::tighten_g_max(SymbolId a, SymbolId b, std::int64_t v) {
    if (no_solution || v >= g_max.at(a, b)) return false;
    g_max.at(a, b) = v;
    if (g_min.at(a, b) > g_max.at(a, b)) no_solution = true;
    return true;
}

bool BoundsState::update_pre(SymbolId a, const Word& fragment) {
    if (no_solution) return false;
    if (fragment.size() <= pre[a].size()) {
        if (!starts_with(pre[a], fragment)) no_solution = true;
        return no_solution;
    }
    if (!starts_with(fragment, pre[a])) {
        no_solution = true;
        return true;
    }
    pre[a] = fragment;
    bool changed = true;
    tighten_len_min(a, static_cast<std::int64_t>(fragment.size()));
    if (sup[a] && !starts_with(*sup[a], pre[a])) no_solution = true;
    return changed;
}

bool BoundsState::update_suf(SymbolId a, const Word& fragment) {
    if (no_solution) return false;
    if (fragment.size() <= suf[a].size()) {
        if (!ends_with(suf[a], fragment)) no_solution = true;
        return no_solution;
    }
    if (!ends_with(fragment, suf[a])) {
        no_solution = true;
        return true;
    }
    suf[a] = fragment;
    tighten_len_min(a, static_cast<std::int64_t>(fragment.size()));
    return true;
}

bool BoundsState::update_sup(SymbolId a, const Word& fragment) {
    if (no_solution) return false;
    bool changed = false;
    if (!sup[a]) {
        sup[a] = fragment;
        changed = true;
    } else {
        // the successor is a prefix of both, hence of their common prefix
        std::size_t cp = common_prefix_len(*sup[a], fragment);
        if (cp < sup[a]->size()) {
            sup[a]->resize(cp);
            changed = true;
        }
    }
    if (changed) {
        tighten_len_max(a, static_cast<std::int64_t>(sup[a]->size()));
        if (!starts_with(*sup[a], pre[a]) &&
            !starts_with(pre[a], *sup[a]))  // pre may be longer than sup only if equal-prefix
            no_solution = true;
        if (static_cast<std::int64_t>(pre[a].size()) > len_max[a]) no_solution = true;
        for (SymbolId b = 0; b < alphabet->size(); ++b)
            if (is_active(b)) tighten_g_max(a, b, count_symbol(*sup[a], b));
    }
    return changed;
}

bool BoundsState::learn(SymbolId a, const Word& successor) {
    if (no_solution) return false;
    if (known[a]) {
        if (*known[a] != successor) no_solution = true;
        return no_solution;
    }
    std::int64_t len = static_cast<std::int64_t>(successor.size());
    bool nested = alphabet->is_constant(a) ? successor == Word{a}
                                           : check_nesting(*alphabet, successor);
    if (len < len_min[a] || len > len_max[a] || !starts_with(successor, pre[a]) ||
        !ends_with(successor, suf[a]) || !is_subword(successor, sub[a]) || !nested) {
        no_solution = true;
        return true;
    }
    if (sup[a] && !(len <= static_cast<std::int64_t>(sup[a]->size()) &&
                    std::equal(successor.begin(), successor.end(), sup[a]->begin()))) {
        no_solution = true;
        return true;
    }
    for (SymbolId b = 0; b < alphabet->size(); ++b) {
        std::int64_t c = count_symbol(successor, b);
        if (c < g_min.at(a, b) || c > g_max.at(a, b)) {
            no_solution = true;
            return true;
        }
    }
    known[a] = successor;
    len_min[a] = len_max[a] = len;
    for (SymbolId b = 0; b < alphabet->size(); ++b)
        g_min.at(a, b) = g_max.at(a, b) = count_symbol(successor, b);
    pre[a] = successor;
    suf[a] = successor;
    sub[a] = successor;
    sup[a] = successor;
    return true;
}

BoundsState init_bounds(const std::vector<Word>& words, AlphabetRef alphabet,
                        std::vector<char> active, std::int64_t min_len_floor) {
    BoundsState st;
    std::size_t n = alphabet->size();
    st.alphabet = std::move(alphabet);
    st.active = std::move(active);
    st.min_len_floor = min_len_floor;
    st.len_min.assign(n, 0);
    st.len_max.assign(n, 0);
    st.g_min = GrowthMatrix(n);
    st.g_max = GrowthMatrix(n);
    st.pre.assign(n, {});
    st.suf.assign(n, {});
    st.sub.assign(n, {});
    st.sup.assign(n, std::nullopt);
    st.known.assign(n, std::nullopt);

    std::vector<ParikhVector> counts;
    counts.reserve(words.size());
    for (const Word& w : words) counts.push_back(parikh(w, n));

    std::int64_t longest = 0;
    for (std::size_t i = 1; i < words.size(); ++i)
        longest = std::max(longest, static_cast<std::int64_t>(words[i].size()));

    for (SymbolId a = 0; a < n; ++a) {
        if (!st.is_active(a)) continue;
        bool constant = st.alphabet->is_constant(a);
        st.len_min[a] = constant ? 1 : min_len_floor;
        st.len_max[a] = constant ? 1 : longest;
        for (SymbolId b = 0; b < n; ++b) {
            if (!st.is_active(b)) continue;
            if (constant) {
                st.g_min.at(a, b) = st.g_max.at(a, b) = (a == b) ? 1 : 0;
            } else {
                std::int64_t cap = 0;
                for (std::size_t i = 1; i < words.size(); ++i)
                    cap = std::max(cap, counts[i][b]);
                st.g_max.at(a, b) = cap;
            }
        }
        if (!constant) {
            // a symbol cannot produce more than the whole next word minus what
            // the other symbols must produce, nor more B's than the next word has
            for (std::size_t i = 0; i + 1 < words.size(); ++i) {
                if (counts[i][a] == 0) continue;
                std::int64_t src_len = static_cast<std::int64_t>(words[i].size());
                std::int64_t dst_len = static_cast<std::int64_t>(words[i + 1].size());
                st.len_max[a] =
                    std::min(st.len_max[a], dst_len - min_len_floor * (src_len - 1));
                for (SymbolId b = 0; b < n; ++b)
                    if (st.is_active(b))
                        st.g_max.at(a, b) = std::min(st.g_max.at(a, b), counts[i + 1][b]);
            }
            if (st.len_max[a] < st.len_min[a]) st.no_solution = true;
        }
    }

    for (SymbolId a = 0; a < n; ++a)
        if (st.is_active(a) && st.alphabet->is_constant(a)) st.learn(a, Word{a});

    st.segments.reserve(words.size() - 1);
    for (std::size_t i = 0; i + 1 < words.size(); ++i)
        st.segments.push_back(DerivationSegment{words[i], words[i + 1], i, 0, 0});
    return st;
}

BoundsState init_bounds(const DevSequence& rho) {
    return init_bounds(rho.words, rho.alphabet,
                       std::vector<char>(rho.alphabet->size(), 1), 1);
}

namespace {

// Learns successors forced by pinned lengths/fragments.
bool settle_knowns(BoundsState& st) {
    bool changed = false;
    for (SymbolId a = 0; a < st.alphabet->size(); ++a) {
        if (!st.is_active(a) || st.is_known(a) || st.no_solution) continue;
        std::int64_t lo = st.len_min[a], hi = st.len_max[a];
        if (static_cast<std::int64_t>(st.pre[a].size()) == hi) {
            changed |= st.learn(a, st.pre[a]);
        } else if (static_cast<std::int64_t>(st.suf[a].size()) == hi) {
            changed |= st.learn(a, st.suf[a]);
        } else if (st.sup[a] && static_cast<std::int64_t>(st.sup[a]->size()) == lo) {
            changed |= st.learn(a, *st.sup[a]);
        } else if (lo == hi &&
                   static_cast<std::int64_t>(st.pre[a].size() + st.suf[a].size()) == lo) {
            Word w = st.pre[a];
            w.insert(w.end(), st.suf[a].begin(), st.suf[a].end());
            changed |= st.learn(a, w);
        }
    }
    return changed;
}

// Strips known ends off each segment, learning successors that become forced
// (single remaining unknown, or a pinned length at either end).
bool normalize_segments(BoundsState& st) {
    bool changed = false;
    std::vector<DerivationSegment> out;
    out.reserve(st.segments.size());
    for (auto& seg : st.segments) {
        if (st.no_solution) break;
        Word& src = seg.src;
        Word& dst = seg.dst;
        bool progress = true;
        while (progress && !st.no_solution) {
            progress = false;
            // front
            while (!src.empty() && !st.no_solution) {
                SymbolId s = src.front();
                Word forced;
                if (st.known[s]) {
                    forced = *st.known[s];
                } else if (st.len_min[s] == st.len_max[s]) {
                    std::int64_t len = st.len_min[s];
                    if (len > static_cast<std::int64_t>(dst.size())) {
                        st.no_solution = true;
                        break;
                    }
                    forced.assign(dst.begin(), dst.begin() + len);
                    st.learn(s, forced);
                    if (st.no_solution) break;
                } else {
                    break;
                }
                if (!starts_with(dst, forced)) {
                    st.no_solution = true;
                    break;
                }
                src.erase(src.begin());
                dst.erase(dst.begin(), dst.begin() + static_cast<std::ptrdiff_t>(forced.size()));
                seg.src_off += 1;
                seg.dst_off += forced.size();
                progress = changed = true;
            }
            // back
            while (!src.empty() && !st.no_solution) {
                SymbolId s = src.back();
                Word forced;
                if (st.known[s]) {
                    forced = *st.known[s];
                } else if (st.len_min[s] == st.len_max[s]) {
                    std::int64_t len = st.len_min[s];
                    if (len > static_cast<std::int64_t>(dst.size())) {
                        st.no_solution = true;
                        break;
                    }
                    forced.assign(dst.end() - len, dst.end());
                    st.learn(s, forced);
                    if (st.no_solution) break;
                } else {
                    break;
                }
                if (!ends_with(dst, forced)) {
                    st.no_solution = true;
                    break;
                }
                src.pop_back();
                dst.erase(dst.end() - static_cast<std::ptrdiff_t>(forced.size()), dst.end());
                progress = changed = true;
            }
        }
        if (st.no_solution) break;
        if (src.empty()) {
            if (!dst.empty()) st.no_solution = true;
            changed = true;
            continue;  // segment fully resolved
        }
        if (src.size() == 1) {
            st.learn(src[0], dst);
            changed = true;
            continue;
        }
        out.push_back(std::move(seg));
    }
    if (!st.no_solution) st.segments = std::move(out);
    return changed;
}

bool ensure_normalized(BoundsState& st) {
    bool changed = false;
    bool progress = true;
    while (progress && !st.no_solution) {
        progress = false;
        progress |= normalize_segments(st);
        progress |= settle_knowns(st);
        changed |= progress;
    }
    return changed;
}

// dst[0..len) extended through any opened branch to its matching ].
// Returns nullopt on contradiction (an opened branch never closes in dst).
std::optional<Word> prefix_window(const BoundsState& st, const Word& dst, std::int64_t len) {
    int open = st.alphabet->open_bracket(), close = st.alphabet->close_bracket();
    std::size_t take = std::min<std::size_t>(dst.size(), static_cast<std::size_t>(len));
    std::int64_t depth = 0;
    std::size_t j = 0;
    for (; j < take; ++j) {
        if (static_cast<int>(dst[j]) == open) ++depth;
        else if (static_cast<int>(dst[j]) == close) --depth;
    }
    while (depth > 0 && j < dst.size()) {
        if (static_cast<int>(dst[j]) == open) ++depth;
        else if (static_cast<int>(dst[j]) == close) --depth;
        ++j;
    }
    if (depth > 0) return std::nullopt;
    return Word(dst.begin(), dst.begin() + static_cast<std::ptrdiff_t>(j));
}

// mirror: last len symbols extended left so every ] has its [.
std::optional<Word> suffix_window(const BoundsState& st, const Word& dst, std::int64_t len) {
    int open = st.alphabet->open_bracket(), close = st.alphabet->close_bracket();
    std::size_t take = std::min<std::size_t>(dst.size(), static_cast<std::size_t>(len));
    std::int64_t depth = 0;
    std::size_t j = 0;  // symbols taken from the right
    for (; j < take; ++j) {
        SymbolId s = dst[dst.size() - 1 - j];
        if (static_cast<int>(s) == close) ++depth;
        else if (static_cast<int>(s) == open) --depth;
    }
    while (depth > 0 && j < dst.size()) {
        SymbolId s = dst[dst.size() - 1 - j];
        if (static_cast<int>(s) == close) ++depth;
        else if (static_cast<int>(s) == open) --depth;
        ++j;
    }
    if (depth > 0) return std::nullopt;
    return Word(dst.end() - static_cast<std::ptrdiff_t>(j), dst.end());
}

// dst[0..len) truncated before the first [ whose ] lies outside the window.
Word superstring_window(const BoundsState& st, const Word& dst, std::int64_t len) {
    int open = st.alphabet->open_bracket(), close = st.alphabet->close_bracket();
    std::size_t take = std::min<std::size_t>(dst.size(), static_cast<std::size_t>(len));
    std::vector<std::size_t> opens;
    for (std::size_t j = 0; j < take; ++j) {
        if (static_cast<int>(dst[j]) == open) opens.push_back(j);
        else if (static_cast<int>(dst[j]) == close && !opens.empty()) opens.pop_back();
    }
    std::size_t end = opens.empty() ? take : opens.front();
    return Word(dst.begin(), dst.begin() + static_cast<std::ptrdiff_t>(end));
}

// mirror: last len symbols truncated after the last unmatched ].
Word superstring_window_right(const BoundsState& st, const Word& dst, std::int64_t len) {
    int open = st.alphabet->open_bracket(), close = st.alphabet->close_bracket();
    std::size_t take = std::min<std::size_t>(dst.size(), static_cast<std::size_t>(len));
    std::vector<std::size_t> closes;  // offsets from the right
    for (std::size_t j = 0; j < take; ++j) {
        SymbolId s = dst[dst.size() - 1 - j];
        if (static_cast<int>(s) == close) closes.push_back(j);
        else if (static_cast<int>(s) == open && !closes.empty()) closes.pop_back();
    }
    std::size_t count = closes.empty() ? take : closes.front();
    return Word(dst.end() - static_cast<std::ptrdiff_t>(count), dst.end());
}

bool fragments_pass(BoundsState& st) {
    bool changed = false;
    for (auto& seg : st.segments) {
        if (st.no_solution) return changed;
        const Word& dst = seg.dst;
        SymbolId front = seg.src.front();
        if (!st.is_known(front)) {
            changed |= st.tighten_len_max(front, static_cast<std::int64_t>(dst.size()));
            if (st.no_solution) return true;
            auto pw = prefix_window(st, dst, st.len_min[front]);
            if (!pw) {
                st.no_solution = true;
                return true;
            }
            changed |= st.update_pre(front, *pw);
            if (st.no_solution) return true;
            changed |= st.update_sup(front, superstring_window(st, dst, st.len_max[front]));
            if (st.no_solution) return true;
        }
        SymbolId back = seg.src.back();
        if (!st.is_known(back)) {
            changed |= st.tighten_len_max(back, static_cast<std::int64_t>(dst.size()));
            if (st.no_solution) return true;
            auto sw = suffix_window(st, dst, st.len_min[back]);
            if (!sw) {
                st.no_solution = true;
                return true;
            }
            changed |= st.update_suf(back, *sw);
            if (st.no_solution) return true;
            Word rw = superstring_window_right(st, dst, st.len_max[back]);
            changed |= st.tighten_len_max(back, static_cast<std::int64_t>(rw.size()));
            for (SymbolId b = 0; b < st.alphabet->size(); ++b)
                if (st.is_active(b)) changed |= st.tighten_g_max(back, b, count_symbol(rw, b));
            if (st.no_solution) return true;
        }
        // growth minima from fragments
        for (SymbolId a : {front, back}) {
            if (st.is_known(a)) continue;
            for (SymbolId b = 0; b < st.alphabet->size(); ++b) {
                if (!st.is_active(b)) continue;
                std::int64_t lo = std::max({count_symbol(st.pre[a], b),
                                            count_symbol(st.suf[a], b),
                                            count_symbol(st.sub[a], b)});
                if (static_cast<std::int64_t>(st.pre[a].size() + st.suf[a].size()) <=
                    st.len_min[a])
                    lo = std::max(lo, count_symbol(st.pre[a], b) + count_symbol(st.suf[a], b));
                changed |= st.tighten_g_min(a, b, lo);
            }
            if (st.no_solution) return true;
        }
    }
    return changed;
}

bool markers_pass(BoundsState& st) {
    bool changed = false;
    // Search-work budget per pass; skipped markers get another chance on the
    // next sweep and skipping never loses soundness.
    std::int64_t budget = 64'000'000;
    for (std::size_t si = 0; si < st.segments.size() && !st.no_solution; ++si) {
        DerivationSegment& seg = st.segments[si];
        const Word& src = seg.src;
        const Word& dst = seg.dst;
        std::size_t m = src.size();
        if (m < 3) continue;  // markers are interior; ends are unknown
        std::vector<std::int64_t> min_before(m + 1, 0), max_before(m + 1, 0);
        for (std::size_t j = 0; j < m; ++j) {
            min_before[j + 1] = min_before[j] + st.len_min[src[j]];
            max_before[j + 1] = max_before[j] + st.len_max[src[j]];
        }
        std::int64_t dst_len = static_cast<std::int64_t>(dst.size());

        auto try_marker = [&](std::size_t p, std::size_t r) -> int {
            // image string is the concatenation of the known successors
            Word image;
            for (std::size_t j = p; j < p + r; ++j) {
                const Word& s = *st.known[src[j]];
                image.insert(image.end(), s.begin(), s.end());
            }
            if (image.empty()) return 0;
            std::int64_t il = static_cast<std::int64_t>(image.size());
            std::int64_t fmin = min_before[p], fmax = max_before[p];
            std::int64_t bmin = min_before[m] - min_before[p + r];
            std::int64_t bmax = max_before[m] - max_before[p + r];
            std::int64_t lo = std::max(fmin, dst_len - il - bmax);
            std::int64_t hi = std::min(fmax, dst_len - il - bmin);
            if (lo > hi) {
                st.no_solution = true;
                return -1;
            }
            if (budget <= 0 && hi > lo) return 0;
            budget -= (hi - lo) + il;
            std::int64_t found = -1;
            auto begin = dst.begin() + lo;
            auto limit = dst.begin() + std::min(hi + il, dst_len);
            auto it = begin;
            while (true) {
                it = std::search(it, limit, image.begin(), image.end());
                if (it == limit) break;
                std::int64_t q = it - dst.begin();
                if (q > hi) break;
                if (found >= 0) return 0;  // not unique
                found = q;
                ++it;
            }
            if (found < 0) {
                st.no_solution = true;
                return -1;
            }
            // unique association: slice the derivation here
            st.marker_log.push_back(MarkerAssociation{
                seg.derivation, seg.src_off + p, seg.dst_off + static_cast<std::size_t>(found),
                static_cast<std::size_t>(il)});
            DerivationSegment left{Word(src.begin(), src.begin() + p),
                                   Word(dst.begin(), dst.begin() + found), seg.derivation,
                                   seg.src_off, seg.dst_off};
            DerivationSegment right{Word(src.begin() + p + r, src.end()),
                                    Word(dst.begin() + found + il, dst.end()), seg.derivation,
                                    seg.src_off + p + r,
                                    seg.dst_off + static_cast<std::size_t>(found + il)};
            st.segments[si] = std::move(left);
            st.segments.insert(st.segments.begin() + si + 1, std::move(right));
            return 1;
        };

        bool sliced = false;
        for (std::size_t p = 1; p + 1 < m && !sliced; ++p) {
            if (!st.is_known(src[p])) continue;
            std::size_t r = 0;
            while (p + r + 1 < m && st.is_known(src[p + r])) ++r;
            int rc = try_marker(p, r);
            if (rc < 0) return true;
            if (rc > 0) {
                sliced = changed = true;
                break;
            }
            if (r > 1) {
                for (std::size_t q = p; q < p + r && !sliced; ++q) {
                    rc = try_marker(q, 1);
                    if (rc < 0) return true;
                    if (rc > 0) sliced = changed = true;
                }
            }
            p += r;  // past this run
        }
        if (sliced) --si;  // reprocess the left piece
    }
    return changed;
}

bool growth_pass(BoundsState& st) {
    std::size_t n = st.alphabet->size();
    bool changed = false;
    bool progress = true;
    int rounds = 0;
    while (progress && !st.no_solution && rounds++ < 64) {
        progress = false;
        for (const auto& seg : st.segments) {
            ParikhVector ps = parikh(seg.src, n);
            ParikhVector pt = parikh(seg.dst, n);
            for (SymbolId a = 0; a < n; ++a) {
                if (!st.is_active(a)) continue;
                std::int64_t acc = 0;
                for (SymbolId b = 0; b < n; ++b)
                    if (ps[b] > 0) acc += ps[b] * st.g_min.at(b, a);
                std::int64_t ua = pt[a] - acc;
                if (ua < 0) {
                    st.no_solution = true;
                    return true;
                }
                for (SymbolId b = 0; b < n; ++b) {
                    if (!st.is_active(b) || ps[b] == 0) continue;
                    progress |= st.tighten_g_max(b, a, st.g_min.at(b, a) + ua / ps[b]);
                    if (st.no_solution) return true;
                }
                std::int64_t total_max = 0;
                for (SymbolId c = 0; c < n; ++c)
                    if (ps[c] > 0) total_max += ps[c] * st.g_max.at(c, a);
                for (SymbolId b = 0; b < n; ++b) {
                    if (!st.is_active(b)) continue;
                    std::int64_t x = total_max - ps[b] * st.g_max.at(b, a);
                    if (x >= pt[a]) continue;
                    if (ps[b] == 0) {
                        st.no_solution = true;
                        return true;
                    }
                    progress |= st.tighten_g_min(b, a, ceil_div(pt[a] - x, ps[b]));
                    if (st.no_solution) return true;
                }
            }
        }
        changed |= progress;
    }
    return changed;
}

bool length_pass(BoundsState& st) {
    std::size_t n = st.alphabet->size();
    bool changed = false;
    bool progress = true;
    int rounds = 0;
    while (progress && !st.no_solution && rounds++ < 64) {
        progress = false;
        for (SymbolId a = 0; a < n; ++a) {
            if (!st.is_active(a)) continue;
            std::int64_t lo = 0, hi = 0;
            for (SymbolId b = 0; b < n; ++b) {
                if (!st.is_active(b)) continue;
                lo += st.g_min.at(a, b);
                hi += st.g_max.at(a, b);
            }
            progress |= st.tighten_len_min(a, lo);
            progress |= st.tighten_len_max(a, hi);
            if (st.no_solution) return true;
        }
        for (const auto& seg : st.segments) {
            ParikhVector ps = parikh(seg.src, n);
            std::int64_t dst_len = static_cast<std::int64_t>(seg.dst.size());
            std::int64_t acc = 0, total_max = 0;
            for (SymbolId b = 0; b < n; ++b) {
                if (ps[b] == 0) continue;
                acc += ps[b] * st.len_min[b];
                total_max += ps[b] * st.len_max[b];
            }
            std::int64_t ua = dst_len - acc;
            if (ua < 0 || total_max < dst_len) {
                st.no_solution = true;
                return true;
            }
            for (SymbolId a = 0; a < n; ++a) {
                if (!st.is_active(a) || ps[a] == 0) continue;
                progress |= st.tighten_len_max(a, st.len_min[a] + ua / ps[a]);
                if (st.no_solution) return true;
                std::int64_t x = total_max - ps[a] * st.len_max[a];
                if (x < dst_len) {
                    progress |= st.tighten_len_min(a, ceil_div(dst_len - x, ps[a]));
                    if (st.no_solution) return true;
                }
            }
        }
        changed |= progress;
    }
    return changed;
}

}  // namespace

bool refine_fragments(BoundsState& st) {
    if (st.no_solution) return false;
    bool changed = ensure_normalized(st);
    if (!st.no_solution) changed |= fragments_pass(st);
    return changed;
}

bool build_marker_map(BoundsState& st) {
    if (st.no_solution) return false;
    bool changed = ensure_normalized(st);
    if (!st.no_solution) changed |= markers_pass(st);
    return changed;
}

bool refine_growth_bounds(BoundsState& st) {
    if (st.no_solution) return false;
    bool changed = ensure_normalized(st);
    if (!st.no_solution) changed |= growth_pass(st);
    return changed;
}

bool refine_length_bounds(BoundsState& st) {
    if (st.no_solution) return false;
    bool changed = ensure_normalized(st);
    if (!st.no_solution) changed |= length_pass(st);
    return changed;
}

bool fixpoint(BoundsState& st) {
    for (SymbolId a = 0; a < st.alphabet->size() && !st.no_solution; ++a) {
        if (!st.is_active(a)) continue;
        if (st.len_min[a] > st.len_max[a]) st.no_solution = true;
        for (SymbolId b = 0; b < st.alphabet->size(); ++b)
            if (st.is_active(b) && st.g_min.at(a, b) > st.g_max.at(a, b))
                st.no_solution = true;
    }
    bool progress = true;
    while (progress && !st.no_solution) {
        progress = false;
        progress |= refine_fragments(st);
        if (st.no_solution) break;
        progress |= build_marker_map(st);
        if (st.no_solution) break;
        progress |= refine_growth_bounds(st);
        if (st.no_solution) break;
        progress |= refine_length_bounds(st);
    }
    return !st.no_solution;
}

void absorb_projected(BoundsState& st, const BoundsState& wider) {
    std::size_t n = st.alphabet->size();
    for (SymbolId a = 0; a < n; ++a) {
        if (!st.is_active(a) || st.alphabet->is_constant(a)) continue;
        std::int64_t lo = 0, hi = 0;
        for (SymbolId b = 0; b < n; ++b) {
            if (!st.is_active(b)) continue;
            st.tighten_g_min(a, b, wider.g_min.at(a, b));
            st.tighten_g_max(a, b, wider.g_max.at(a, b));
            lo += wider.g_min.at(a, b);
            hi += wider.g_max.at(a, b);
        }
        st.tighten_len_min(a, lo);
        st.tighten_len_max(a, hi);
        if (st.no_solution) return;
        st.update_pre(a, filter_word(wider.pre[a], st.active));
        st.update_suf(a, filter_word(wider.suf[a], st.active));
        if (wider.sup[a]) st.update_sup(a, filter_word(*wider.sup[a], st.active));
        Word sub = filter_word(wider.sub[a], st.active);
        if (sub.size() > st.sub[a].size()) st.sub[a] = sub;
        if (wider.known[a]) st.learn(a, filter_word(*wider.known[a], st.active));
        if (st.no_solution) return;
    }
}

std::string dump_bounds(const BoundsState& st) {
    std::ostringstream out;
    const Alphabet& alpha = *st.alphabet;
    for (SymbolId a = 0; a < alpha.size(); ++a) {
        if (!st.is_active(a)) continue;
        out << alpha.glyph(a) << ": len [" << st.len_min[a] << "," << st.len_max[a] << "]";
        if (st.known[a]) out << " known=" << alpha.render(*st.known[a]);
        else {
            if (!st.pre[a].empty()) out << " pre=" << alpha.render(st.pre[a]);
            if (!st.suf[a].empty()) out << " suf=" << alpha.render(st.suf[a]);
            if (st.sup[a]) out << " sup=" << alpha.render(*st.sup[a]);
        }
        out << "\n";
        for (SymbolId b = 0; b < alpha.size(); ++b) {
            if (!st.is_active(b)) continue;
            if (st.g_min.at(a, b) == 0 && st.g_max.at(a, b) == 0) continue;
            out << "  (" << alpha.glyph(a) << "," << alpha.glyph(b) << "): ["
                << st.g_min.at(a, b) << "," << st.g_max.at(a, b) << "]\n";
        }
    }
    return out.str();
}

}  // namespace lsinfer
