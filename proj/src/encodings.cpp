#include "lsinfer/encodings.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

namespace lsinfer {

std::optional<Scheme> scheme_from_name(std::string_view name) {
    if (name == "osos1") return Scheme::OSOS1;
    if (name == "osos2") return Scheme::OSOS2;
    if (name == "g") return Scheme::G;
    if (name == "l") return Scheme::L;
    if (name == "mg") return Scheme::MG;
    if (name == "ml") return Scheme::ML;
    return std::nullopt;
}

std::string_view scheme_name(Scheme scheme) {
    switch (scheme) {
        case Scheme::OSOS1: return "osos1";
        case Scheme::OSOS2: return "osos2";
        case Scheme::G: return "g";
        case Scheme::L: return "l";
        case Scheme::MG: return "mg";
        case Scheme::ML: return "ml";
    }
    return "?";
}

// ---- exact linear systems ----------------------------------------------------

LinearSystem row_reduce(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs) {
    LinearSystem out;
    std::size_t m = rows.size();
    std::size_t n = m == 0 ? 0 : rows[0].size();
    out.unknowns = n;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < m; ++col) {
        std::size_t pivot = rank;
        while (pivot < m && rows[pivot][col] == 0) ++pivot;
        if (pivot == m) continue;
        std::swap(rows[pivot], rows[rank]);
        std::swap(rhs[pivot], rhs[rank]);
        Rational inv = rows[rank][col];
        for (std::size_t j = col; j < n; ++j) rows[rank][j] /= inv;
        rhs[rank] /= inv;
        for (std::size_t r = 0; r < m; ++r) {
            if (r == rank || rows[r][col] == 0) continue;
            Rational f = rows[r][col];
            for (std::size_t j = col; j < n; ++j) rows[r][j] -= f * rows[rank][j];
            rhs[r] -= f * rhs[rank];
        }
        out.pivot_cols.push_back(col);
        ++rank;
    }
    for (std::size_t r = rank; r < m; ++r)
        if (rhs[r] != 0) out.inconsistent = true;
    std::vector<char> is_pivot(n, 0);
    for (std::size_t c : out.pivot_cols) is_pivot[c] = 1;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) out.free_cols.push_back(c);
    out.pivot_rhs.resize(rank);
    out.pivot_coef.assign(rank, std::vector<Rational>(out.free_cols.size(), 0));
    for (std::size_t r = 0; r < rank; ++r) {
        out.pivot_rhs[r] = rhs[r];
        for (std::size_t f = 0; f < out.free_cols.size(); ++f)
            out.pivot_coef[r][f] = rows[r][out.free_cols[f]];
    }
    return out;
}

std::optional<std::vector<std::int64_t>> evaluate_system(
    const LinearSystem& sys, const std::vector<std::int64_t>& free_values) {
    std::vector<std::int64_t> values(sys.unknowns, 0);
    for (std::size_t f = 0; f < sys.free_cols.size(); ++f)
        values[sys.free_cols[f]] = free_values[f];
    for (std::size_t r = 0; r < sys.pivot_cols.size(); ++r) {
        Rational v = sys.pivot_rhs[r];
        for (std::size_t f = 0; f < sys.free_cols.size(); ++f)
            if (sys.pivot_coef[r][f] != 0) v -= sys.pivot_coef[r][f] * free_values[f];
        if (boost::multiprecision::denominator(v) != 1) return std::nullopt;
        auto num = boost::multiprecision::numerator(v);
        if (num < std::numeric_limits<std::int64_t>::min() ||
            num > std::numeric_limits<std::int64_t>::max())
            return std::nullopt;
        values[sys.pivot_cols[r]] = static_cast<std::int64_t>(num);
    }
    return values;
}

MatrixSystemResult build_matrix_system(const std::vector<Word>& words,
                                       const BoundsState& st, MatrixMode mode) {
    MatrixSystemResult out;
    const Alphabet& alpha = *st.alphabet;
    std::size_t n = alpha.size();

    for (SymbolId a = 0; a < n; ++a)
        if (st.is_active(a) && !alpha.is_constant(a)) out.unknown_symbols.push_back(a);
    std::size_t u = out.unknown_symbols.size();

    std::vector<ParikhVector> counts;
    counts.reserve(words.size());
    for (const Word& w : words) counts.push_back(parikh(w, n));

    auto make_rows = [&]() {
        std::vector<std::vector<Rational>> rows;
        for (std::size_t i = 0; i + 1 < words.size(); ++i) {
            std::vector<Rational> row(u);
            for (std::size_t k = 0; k < u; ++k) row[k] = counts[i][out.unknown_symbols[k]];
            rows.push_back(std::move(row));
        }
        return rows;
    };

    auto constant_contribution = [&](std::size_t i, SymbolId target) {
        // constants produce exactly themselves
        std::int64_t total = 0;
        for (SymbolId c = 0; c < n; ++c)
            if (st.is_active(c) && alpha.is_constant(c))
                total += counts[i][c] * (c == target ? 1 : 0);
        return total;
    };

    if (mode == MatrixMode::Lengths) {
        std::vector<Rational> rhs;
        for (std::size_t i = 0; i + 1 < words.size(); ++i) {
            std::int64_t constants = 0;
            for (SymbolId c = 0; c < n; ++c)
                if (st.is_active(c) && alpha.is_constant(c)) constants += counts[i][c];
            rhs.emplace_back(static_cast<std::int64_t>(words[i + 1].size()) - constants);
        }
        LinearSystem sys = row_reduce(make_rows(), std::move(rhs));
        if (sys.inconsistent) return out;
        for (std::size_t f = 0; f < sys.free_cols.size(); ++f) {
            SymbolId a = out.unknown_symbols[sys.free_cols[f]];
            out.free_vars.push_back(
                MatrixFreeVar{a, 0, GeneRange{st.len_min[a], st.len_max[a]}});
        }
        out.systems.push_back(std::move(sys));
        if (out.free_vars.empty()) {
            auto values = evaluate_system(out.systems[0], {});
            if (!values) return out;
            LengthAssignment lens(n, 0);
            for (SymbolId c = 0; c < n; ++c)
                if (st.is_active(c) && alpha.is_constant(c)) lens[c] = 1;
            for (std::size_t k = 0; k < u; ++k) {
                SymbolId a = out.unknown_symbols[k];
                if ((*values)[k] < st.len_min[a] || (*values)[k] > st.len_max[a]) return out;
                lens[a] = (*values)[k];
            }
            out.kind = MatrixSystemResult::Kind::Unique;
            out.lens = std::move(lens);
        } else {
            out.kind = MatrixSystemResult::Kind::Reduced;
        }
        return out;
    }

    // Growth mode: one system per target column.
    GrowthMatrix unique(n);
    bool all_pivots = true;
    for (SymbolId target = 0; target < n; ++target) {
        if (!st.is_active(target)) continue;
        std::vector<Rational> rhs;
        for (std::size_t i = 0; i + 1 < words.size(); ++i)
            rhs.emplace_back(counts[i + 1][target] - constant_contribution(i, target));
        LinearSystem sys = row_reduce(make_rows(), std::move(rhs));
        if (sys.inconsistent) return out;
        for (std::size_t f = 0; f < sys.free_cols.size(); ++f) {
            SymbolId a = out.unknown_symbols[sys.free_cols[f]];
            out.free_vars.push_back(MatrixFreeVar{
                a, target, GeneRange{st.g_min.at(a, target), st.g_max.at(a, target)}});
        }
        if (!sys.free_cols.empty()) all_pivots = false;
        out.system_targets.push_back(target);
        out.systems.push_back(std::move(sys));
    }
    if (all_pivots) {
        for (SymbolId c = 0; c < n; ++c)
            if (st.is_active(c) && alpha.is_constant(c)) unique.at(c, c) = 1;
        for (std::size_t s = 0; s < out.systems.size(); ++s) {
            auto values = evaluate_system(out.systems[s], {});
            if (!values) return out;
            SymbolId target = out.system_targets[s];
            for (std::size_t k = 0; k < u; ++k) {
                SymbolId a = out.unknown_symbols[k];
                if ((*values)[k] < st.g_min.at(a, target) ||
                    (*values)[k] > st.g_max.at(a, target))
                    return out;
                unique.at(a, target) = (*values)[k];
            }
        }
        out.kind = MatrixSystemResult::Kind::Unique;
        out.growth = std::move(unique);
    } else {
        out.kind = MatrixSystemResult::Kind::Reduced;
    }
    return out;
}

// ---- encoding instances -------------------------------------------------------

EncodingInstance::EncodingInstance(Scheme scheme, const BoundsState& state,
                                   std::vector<Word> words)
    : scheme_(scheme), state_(state), words_(std::move(words)) {
    const Alphabet& alpha = *state_.alphabet;
    std::size_t n = alpha.size();
    if (state_.no_solution) {
        feasible_ = false;
        return;
    }
    for (SymbolId a = 0; a < n; ++a)
        if (state_.is_active(a) && !alpha.is_constant(a)) unknown_symbols_.push_back(a);

    switch (scheme_) {
        case Scheme::L:
            for (SymbolId a : unknown_symbols_) {
                gene_symbol_.push_back(a);
                int_ranges_.push_back(GeneRange{state_.len_min[a], state_.len_max[a]});
            }
            break;
        case Scheme::G:
            for (SymbolId a : unknown_symbols_) {
                for (SymbolId b = 0; b < n; ++b) {
                    if (!state_.is_active(b)) continue;
                    gene_pair_.emplace_back(a, b);
                    int_ranges_.push_back(
                        GeneRange{state_.g_min.at(a, b), state_.g_max.at(a, b)});
                }
            }
            break;
        case Scheme::ML:
        case Scheme::MG: {
            matrix_ = build_matrix_system(
                words_, state_,
                scheme_ == Scheme::ML ? MatrixMode::Lengths : MatrixMode::Growth);
            if (matrix_->kind == MatrixSystemResult::Kind::NoSolution) {
                feasible_ = false;
                return;
            }
            for (const MatrixFreeVar& fv : matrix_->free_vars) int_ranges_.push_back(fv.range);
            break;
        }
        case Scheme::OSOS1:
        case Scheme::OSOS2: {
            dense_.assign(n, 0);
            for (std::size_t k = 0; k < n; ++k) {
                if (state_.is_active(static_cast<SymbolId>(k))) {
                    dense_[k] = dense_rev_.size();
                    dense_rev_.push_back(static_cast<SymbolId>(k));
                }
            }
            std::size_t d = dense_rev_.size();
            uni_.assign(d, 0);
            bi_.assign(d * d, 0);
            tri_.assign(scheme_ == Scheme::OSOS2 ? d * d * d : 0, 0);
            for (const Word& w : words_) {
                for (std::size_t i = 0; i < w.size(); ++i) {
                    std::size_t x = dense_[w[i]];
                    ++uni_[x];
                    if (i + 1 < w.size()) ++bi_[x * d + dense_[w[i + 1]]];
                    if (!tri_.empty() && i + 2 < w.size())
                        ++tri_[(x * d + dense_[w[i + 1]]) * d + dense_[w[i + 2]]];
                }
            }
            for (SymbolId a : unknown_symbols_) {
                OsosLayout layout;
                layout.symbol = a;
                layout.prefix = state_.pre[a];
                std::int64_t cap = state_.len_max[a];
                std::int64_t pre_len = static_cast<std::int64_t>(layout.prefix.size());
                std::int64_t suf_keep =
                    std::min<std::int64_t>(state_.suf[a].size(), std::max<std::int64_t>(0, cap - pre_len));
                layout.suffix = Word(state_.suf[a].end() - suf_keep, state_.suf[a].end());
                layout.slots = static_cast<std::size_t>(
                    std::max<std::int64_t>(0, cap - pre_len - suf_keep));
                real_gene_count_ += layout.slots;
                osos_.push_back(std::move(layout));
            }
            break;
        }
    }
    for (const GeneRange& r : int_ranges_)
        if (r.lo > r.hi) feasible_ = false;
}

std::optional<std::uint64_t> EncodingInstance::space_size() const {
    if (!feasible_) return 0;
    if (uses_reals()) {
        if (real_gene_count_ == 0) return 1;
        return std::nullopt;
    }
    constexpr std::uint64_t kCap = std::uint64_t{1} << 62;
    std::uint64_t total = 1;
    for (const GeneRange& r : int_ranges_) {
        std::uint64_t w = r.width();
        if (w == 0) return 0;
        if (total > kCap / w) return kCap;
        total *= w;
    }
    return total;
}

std::optional<DecodedCandidate> EncodingInstance::decode_lengths(
    const LengthAssignment& lens) const {
    ScanResult scan = scan_successors(*state_.alphabet, words_, lens);
    if (scan.status != ScanStatus::OK) return std::nullopt;
    return DecodedCandidate{std::move(scan.successors)};
}

std::optional<DecodedCandidate> EncodingInstance::decode_growth(const GrowthMatrix& m) const {
    auto lens = lens_from_growth(m, state_.min_len_floor);
    if (!lens) return std::nullopt;
    for (SymbolId c = 0; c < state_.alphabet->size(); ++c)
        if (state_.is_active(c) && state_.alphabet->is_constant(c)) (*lens)[c] = 1;
    auto decoded = decode_lengths(*lens);
    if (!decoded) return std::nullopt;
    // the realized growth matrix must equal the genome's matrix
    for (SymbolId a : unknown_symbols_) {
        const Word& succ = *decoded->successors[a];
        ParikhVector got = parikh(succ, state_.alphabet->size());
        for (SymbolId b = 0; b < state_.alphabet->size(); ++b)
            if (state_.is_active(b) && got[b] != m.at(a, b)) return std::nullopt;
    }
    return decoded;
}

std::vector<std::pair<int, double>> EncodingInstance::slot_candidates(
    const OsosLayout& layout, const Word& placed) const {
    const Alphabet& alpha = *state_.alphabet;
    SymbolId a = layout.symbol;
    std::size_t n = alpha.size();

    ParikhVector have(n, 0);
    for (SymbolId s : layout.prefix) ++have[s];
    for (SymbolId s : layout.suffix) ++have[s];
    for (SymbolId s : placed) ++have[s];
    std::int64_t len_so_far = static_cast<std::int64_t>(layout.prefix.size() +
                                                        layout.suffix.size() + placed.size());
    std::int64_t remaining =
        static_cast<std::int64_t>(layout.slots) - static_cast<std::int64_t>(placed.size());

    std::int64_t deficit_total = 0;
    std::vector<char> deficient(n, 0);
    for (SymbolId b = 0; b < n; ++b) {
        if (!state_.is_active(b)) continue;
        std::int64_t d = state_.g_min.at(a, b) - have[b];
        if (d > 0) {
            deficit_total += d;
            deficient[b] = 1;
        }
    }
    if (deficit_total > remaining) return {};  // genome dead regardless of choice

    // depth of prefix+placed decides whether ] stays selectable
    std::int64_t depth = 0;
    int open = alpha.open_bracket(), close = alpha.close_bracket();
    for (SymbolId s : layout.prefix) {
        if (static_cast<int>(s) == open) ++depth;
        else if (static_cast<int>(s) == close) --depth;
    }
    for (SymbolId s : placed) {
        if (static_cast<int>(s) == open) ++depth;
        else if (static_cast<int>(s) == close) --depth;
    }

    bool force_deficient = deficit_total == remaining && deficit_total > 0;
    std::vector<int> candidates;
    for (SymbolId b = 0; b < n; ++b) {
        if (!state_.is_active(b)) continue;
        if (force_deficient && !deficient[b]) continue;
        if (have[b] >= state_.g_max.at(a, b)) continue;
        if (static_cast<int>(b) == close && depth <= 0) continue;
        candidates.push_back(b);
    }
    if (candidates.empty()) {
        if (len_so_far >= state_.len_min[a] && !force_deficient)
            return {{kNoSymbol, 1.0}};
        return {};
    }

    // corpus weights with context fallback (trigram -> bigram -> unigram)
    std::size_t d = dense_rev_.size();
    Word context = layout.prefix;
    context.insert(context.end(), placed.begin(), placed.end());
    std::vector<double> weights(candidates.size(), 0.0);
    bool found = false;
    if (scheme_ == Scheme::OSOS2 && context.size() >= 2) {
        std::size_t c1 = dense_[context[context.size() - 2]];
        std::size_t c2 = dense_[context[context.size() - 1]];
        for (std::size_t i = 0; i < candidates.size(); ++i)
            weights[i] = static_cast<double>(tri_[(c1 * d + c2) * d + dense_[candidates[i]]]);
        found = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0; });
    }
    if (!found && !context.empty()) {
        std::size_t c = dense_[context.back()];
        for (std::size_t i = 0; i < candidates.size(); ++i)
            weights[i] = static_cast<double>(bi_[c * d + dense_[candidates[i]]]);
        found = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0; });
    }
    if (!found) {
        for (std::size_t i = 0; i < candidates.size(); ++i)
            weights[i] = static_cast<double>(uni_[dense_[candidates[i]]]);
        found = std::any_of(weights.begin(), weights.end(), [](double w) { return w > 0; });
    }
    std::vector<std::pair<int, double>> out;
    double total = 0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        double w = found ? std::max(weights[i], 1.0) : 1.0;
        out.emplace_back(candidates[i], w);
        total += w;
    }
    if (len_so_far >= state_.len_min[a])
        out.emplace_back(kNoSymbol, total / static_cast<double>(out.size()));
    return out;
}

std::vector<std::pair<int, double>> EncodingInstance::osos_slot_candidates(
    SymbolId a, const Word& placed) const {
    for (const OsosLayout& layout : osos_)
        if (layout.symbol == a) return slot_candidates(layout, placed);
    return {};
}

std::optional<Word> EncodingInstance::decode_osos_symbol(const OsosLayout& layout,
                                                         const double* genes) const {
    Word placed;
    placed.reserve(layout.slots);
    for (std::size_t slot = 0; slot < layout.slots; ++slot) {
        auto cands = slot_candidates(layout, placed);
        if (cands.empty()) return std::nullopt;
        double total = 0;
        for (auto& [sym, w] : cands) total += w;
        double x = genes[slot] * total;
        int chosen = cands.back().first;
        double acc = 0;
        for (auto& [sym, w] : cands) {
            acc += w;
            if (x <= acc) {
                chosen = sym;
                break;
            }
        }
        if (chosen != kNoSymbol) placed.push_back(static_cast<SymbolId>(chosen));
    }
    Word succ = layout.prefix;
    succ.insert(succ.end(), placed.begin(), placed.end());
    succ.insert(succ.end(), layout.suffix.begin(), layout.suffix.end());
    if (static_cast<std::int64_t>(succ.size()) < state_.len_min[layout.symbol])
        return std::nullopt;
    if (!check_nesting(*state_.alphabet, succ)) return std::nullopt;
    return succ;
}

std::optional<DecodedCandidate> EncodingInstance::decode(const Genome& genome) const {
    if (!feasible_) return std::nullopt;
    const Alphabet& alpha = *state_.alphabet;
    std::size_t n = alpha.size();
    switch (scheme_) {
        case Scheme::L: {
            LengthAssignment lens(n, 0);
            for (SymbolId c = 0; c < n; ++c)
                if (state_.is_active(c) && alpha.is_constant(c)) lens[c] = 1;
            for (std::size_t g = 0; g < gene_symbol_.size(); ++g)
                lens[gene_symbol_[g]] = genome.ints[g];
            return decode_lengths(lens);
        }
        case Scheme::G: {
            GrowthMatrix m(n);
            for (SymbolId c = 0; c < n; ++c)
                if (state_.is_active(c) && alpha.is_constant(c)) m.at(c, c) = 1;
            for (std::size_t g = 0; g < gene_pair_.size(); ++g)
                m.at(gene_pair_[g].first, gene_pair_[g].second) = genome.ints[g];
            return decode_growth(m);
        }
        case Scheme::ML: {
            const auto& mr = *matrix_;
            if (mr.kind == MatrixSystemResult::Kind::Unique) return decode_lengths(mr.lens);
            auto values = evaluate_system(mr.systems[0], genome.ints);
            if (!values) return std::nullopt;
            LengthAssignment lens(n, 0);
            for (SymbolId c = 0; c < n; ++c)
                if (state_.is_active(c) && alpha.is_constant(c)) lens[c] = 1;
            for (std::size_t k = 0; k < mr.unknown_symbols.size(); ++k) {
                SymbolId a = mr.unknown_symbols[k];
                if ((*values)[k] < state_.len_min[a] || (*values)[k] > state_.len_max[a])
                    return std::nullopt;
                lens[a] = (*values)[k];
            }
            return decode_lengths(lens);
        }
        case Scheme::MG: {
            const auto& mr = *matrix_;
            if (mr.kind == MatrixSystemResult::Kind::Unique) return decode_growth(mr.growth);
            GrowthMatrix m(n);
            for (SymbolId c = 0; c < n; ++c)
                if (state_.is_active(c) && alpha.is_constant(c)) m.at(c, c) = 1;
            std::size_t cursor = 0;
            for (std::size_t s = 0; s < mr.systems.size(); ++s) {
                const LinearSystem& sys = mr.systems[s];
                std::vector<std::int64_t> frees(
                    genome.ints.begin() + cursor,
                    genome.ints.begin() + cursor + sys.free_cols.size());
                cursor += sys.free_cols.size();
                auto values = evaluate_system(sys, frees);
                if (!values) return std::nullopt;
                SymbolId target = mr.system_targets[s];
                for (std::size_t k = 0; k < mr.unknown_symbols.size(); ++k) {
                    SymbolId a = mr.unknown_symbols[k];
                    if ((*values)[k] < state_.g_min.at(a, target) ||
                        (*values)[k] > state_.g_max.at(a, target))
                        return std::nullopt;
                    m.at(a, target) = (*values)[k];
                }
            }
            return decode_growth(m);
        }
        case Scheme::OSOS1:
        case Scheme::OSOS2: {
            DecodedCandidate out;
            out.successors.assign(n, std::nullopt);
            for (SymbolId c = 0; c < n; ++c)
                if (state_.is_active(c) && alpha.is_constant(c)) out.successors[c] = Word{c};
            std::size_t cursor = 0;
            for (const OsosLayout& layout : osos_) {
                auto succ = decode_osos_symbol(layout, genome.reals.data() + cursor);
                cursor += layout.slots;
                if (!succ) return std::nullopt;
                out.successors[layout.symbol] = std::move(*succ);
            }
            return out;
        }
    }
    return std::nullopt;
}

std::string EncodingInstance::solution_key(const std::optional<DecodedCandidate>& decoded,
                                           const Genome& genome) const {
    std::ostringstream key;
    if (decoded) {
        key << "s:";
        for (SymbolId a : unknown_symbols_) {
            const auto& succ = decoded->successors[a];
            key << static_cast<int>(a) << '=';
            if (succ)
                for (SymbolId s : *succ) key << static_cast<char>('0' + s % 64);
            key << ';';
        }
    } else {
        key << "g:";
        for (double r : genome.reals) key << r << ',';
        for (std::int64_t v : genome.ints) key << v << ',';
    }
    return key.str();
}

}  // namespace lsinfer
