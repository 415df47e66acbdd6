#include "lsinfer/projection.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <ostream>
#include <set>

namespace lsinfer {

std::optional<DevSequence> strip_constants(const DevSequence& rho, std::size_t constant_index) {
    const Alphabet& alpha = *rho.alphabet;
    auto constants = alpha.constants();
    if (constant_index > constants.size()) throw InputError("constant index out of range");
    if (constant_index > 0 && constant_index < constants.size()) {
        char prev = alpha.glyph(constants[constant_index - 1]);
        char next = alpha.glyph(constants[constant_index]);
        if (prev == '[' && next == ']')
            throw InputError("brackets are stripped together");
    }
    std::vector<char> keep(alpha.size(), 0);
    for (SymbolId a = 0; a < alpha.size(); ++a)
        if (!alpha.is_constant(a)) keep[a] = 1;
    for (std::size_t i = 0; i < constant_index; ++i) keep[constants[i]] = 1;

    DevSequence out;
    out.alphabet = rho.alphabet;
    for (const Word& w : rho.words) {
        out.words.push_back(filter_word(w, keep));
        if (out.words.back().empty()) return std::nullopt;
    }
    return out;
}

std::vector<std::vector<SymbolId>> constant_levels(const Alphabet& alphabet) {
    std::vector<std::vector<SymbolId>> levels;
    auto constants = alphabet.constants();
    for (std::size_t i = 0; i < constants.size(); ++i) {
        char g = alphabet.glyph(constants[i]);
        if (g == ']') continue;  // handled with '['
        if (g == '[' && i + 1 < constants.size() &&
            alphabet.glyph(constants[i + 1]) == ']') {
            levels.push_back({constants[i], constants[i + 1]});
        } else {
            levels.push_back({constants[i]});
        }
    }
    return levels;
}

namespace {

// ---- the lift solver ---------------------------------------------------------
//
// At level k every successor over the level alphabet is known. Adding the next
// constant group D leaves exactly three kinds of unknowns, all D-strings:
// a prefix and a suffix per nonconstant with a nonempty projected successor,
// and a whole successor per nonconstant whose projected successor is empty.
// Every derivation decomposes into known "cores" (the span between the first
// and last old symbol produced by an occurrence, read off the next word)
// separated by gaps of pure D symbols; each gap yields a word equation over
// the unknowns, solved by candidate-set intersection.

struct GapItem {
    bool fixed = false;
    SymbolId ch = 0;  // fixed: the D symbol copied from the source word
    int var = -1;     // otherwise: unknown index
};

struct Gap {
    Word content;
    std::vector<GapItem> items;
};

struct Solver {
    // candidate sets; unconstrained until first seen
    std::vector<std::optional<std::vector<Word>>> candidates;

    int var_count = 0;
    std::vector<int> pre_var, suf_var;  // per symbol id; absorbers use pre_var only

    int var_for(std::vector<int>& table, SymbolId a) {
        if (table[a] < 0) {
            table[a] = var_count++;
            candidates.emplace_back(std::nullopt);
        }
        return table[a];
    }
};

constexpr std::size_t kGapFactorizationCap = 4096;

// Enumerates factorizations of gap.content over gap.items given current
// candidate sets and per-path bindings; collects observed values per variable.
struct GapEnumerator {
    const Gap& gap;
    Solver& solver;
    std::vector<std::optional<Word>> binding;
    std::vector<std::set<Word>> observed;
    std::size_t produced = 0;
    bool capped = false;

    explicit GapEnumerator(const Gap& g, Solver& s)
        : gap(g), solver(s), binding(s.var_count), observed(s.var_count) {}

    bool allowed(int var, const Word& value) const {
        const auto& cands = solver.candidates[var];
        if (!cands) return true;
        return std::binary_search(cands->begin(), cands->end(), value);
    }

    void recurse(std::size_t item, std::size_t pos) {
        if (capped) return;
        if (item == gap.items.size()) {
            if (pos != gap.content.size()) return;
            if (++produced > kGapFactorizationCap) {
                capped = true;
                return;
            }
            for (std::size_t v = 0; v < binding.size(); ++v)
                if (binding[v]) observed[v].insert(*binding[v]);
            return;
        }
        const GapItem& it = gap.items[item];
        if (it.fixed) {
            if (pos < gap.content.size() && gap.content[pos] == it.ch)
                recurse(item + 1, pos + 1);
            return;
        }
        if (binding[it.var]) {
            const Word& bound = *binding[it.var];
            if (pos + bound.size() <= gap.content.size() &&
                std::equal(bound.begin(), bound.end(), gap.content.begin() + pos))
                recurse(item + 1, pos + bound.size());
            return;
        }
        for (std::size_t len = 0; pos + len <= gap.content.size(); ++len) {
            Word value(gap.content.begin() + pos, gap.content.begin() + pos + len);
            if (!allowed(it.var, value)) continue;
            binding[it.var] = value;
            recurse(item + 1, pos + len);
            binding[it.var] = std::nullopt;
            if (capped) return;
        }
    }
};

}  // namespace

LiftResult lift_constant(const PartialSolution& partial,
                         const std::vector<std::vector<Word>>& level_words,
                         const AlphabetRef& alphabet,
                         const std::vector<std::vector<SymbolId>>& levels, std::size_t cap) {
    LiftResult result;
    const Alphabet& alpha = *alphabet;
    std::size_t k = partial.level;
    const std::vector<SymbolId>& group = levels[k];
    const std::vector<Word>& words = level_words[k + 1];
    std::size_t n_words = words.size();
    bool full_level = (k + 1 == levels.size());

    std::vector<char> is_new(alpha.size(), 0);
    for (SymbolId d : group) is_new[d] = 1;
    std::vector<char> was_active(alpha.size(), 0);
    for (SymbolId a = 0; a < alpha.size(); ++a)
        if (!alpha.is_constant(a)) was_active[a] = 1;
    for (std::size_t l = 0; l < k; ++l)
        for (SymbolId c : levels[l]) was_active[c] = 1;

    Solver solver;
    solver.pre_var.assign(alpha.size(), -1);
    solver.suf_var.assign(alpha.size(), -1);

    // cores: span between first and last old symbol of each occurrence's
    // production, read off the next word; must agree across occurrences
    std::vector<std::optional<Word>> core(alpha.size());
    std::vector<Gap> gaps;

    for (std::size_t i = 0; i + 1 < n_words; ++i) {
        const Word& u = words[i];
        const Word& v = words[i + 1];
        std::vector<std::size_t> old_pos;  // v positions carrying old symbols
        for (std::size_t p = 0; p < v.size(); ++p)
            if (was_active[v[p]]) old_pos.push_back(p);

        struct Block {
            std::size_t core_begin, core_end;  // [begin, end) in v
            SymbolId symbol;
        };
        std::vector<Block> blocks;
        // items between blocks, per pending gap
        std::vector<GapItem> pending;
        std::vector<std::vector<GapItem>> gap_items;
        gap_items.emplace_back();

        std::size_t cursor = 0;  // over old_pos
        for (SymbolId s : u) {
            if (is_new[s]) {
                gap_items.back().push_back(GapItem{true, s, -1});
                continue;
            }
            const Word& succ = *partial.successors[s];
            if (succ.empty()) {
                int var = solver.var_for(solver.pre_var, s);
                gap_items.back().push_back(GapItem{false, 0, var});
                continue;
            }
            if (cursor + succ.size() > old_pos.size()) return result;  // dead
            std::size_t b = old_pos[cursor];
            std::size_t e = old_pos[cursor + succ.size() - 1] + 1;
            cursor += succ.size();
            Word c(v.begin() + b, v.begin() + e);
            // old symbols inside the core must match the level-k successor
            blocks.push_back(Block{b, e, s});
            if (!alpha.is_constant(s)) {
                if (core[s]) {
                    if (*core[s] != c) return result;  // inconsistent occurrences
                } else {
                    core[s] = std::move(c);
                }
            }
            gap_items.emplace_back();
        }
        if (cursor != old_pos.size()) return result;

        // assemble gaps: [word start .. first block), between blocks, [last .. end)
        std::size_t prev_end = 0;
        for (std::size_t b = 0; b <= blocks.size(); ++b) {
            std::size_t gap_begin = prev_end;
            std::size_t gap_end = b < blocks.size() ? blocks[b].core_begin : v.size();
            if (gap_end < gap_begin) return result;
            Gap gap;
            gap.content.assign(v.begin() + gap_begin, v.begin() + gap_end);
            for (SymbolId g : gap.content)
                if (!is_new[g]) return result;  // old symbol outside every core
            if (b > 0) {
                SymbolId left = blocks[b - 1].symbol;
                if (!alpha.is_constant(left)) {
                    int var = solver.var_for(solver.suf_var, left);
                    gap.items.push_back(GapItem{false, 0, var});
                }
            }
            for (const GapItem& it : gap_items[b]) gap.items.push_back(it);
            if (b < blocks.size()) {
                SymbolId right = blocks[b].symbol;
                if (!alpha.is_constant(right)) {
                    int var = solver.var_for(solver.pre_var, right);
                    gap.items.push_back(GapItem{false, 0, var});
                }
                prev_end = blocks[b].core_end;
            }
            if (gap.content.empty() && gap.items.empty()) continue;
            gaps.push_back(std::move(gap));
        }
    }

    // constraint propagation: intersect candidate sets per gap until stable
    std::vector<char> gap_wide(gaps.size(), 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t gi = 0; gi < gaps.size(); ++gi) {
            GapEnumerator en(gaps[gi], solver);
            en.recurse(0, 0);
            if (en.capped) {
                gap_wide[gi] = 1;
                continue;
            }
            gap_wide[gi] = 0;
            if (en.produced == 0) return result;  // dead branch
            for (int v = 0; v < solver.var_count; ++v) {
                if (en.observed[v].empty()) continue;  // var not in this gap
                std::vector<Word> seen(en.observed[v].begin(), en.observed[v].end());
                auto& cands = solver.candidates[v];
                if (!cands) {
                    cands = std::move(seen);
                    changed = true;
                } else {
                    std::vector<Word> inter;
                    std::set_intersection(cands->begin(), cands->end(), seen.begin(),
                                          seen.end(), std::back_inserter(inter));
                    if (inter.empty()) return result;
                    if (inter.size() != cands->size()) {
                        *cands = std::move(inter);
                        changed = true;
                    }
                }
            }
        }
    }

    for (int v = 0; v < solver.var_count; ++v) {
        if (!solver.candidates[v]) {
            // constrained only by capped gaps; cannot enumerate soundly
            result.status = LiftStatus::CapExceeded;
            return result;
        }
    }

    // enumerate residual combinations
    std::vector<int> open_vars;
    std::uint64_t combos = 1;
    for (int v = 0; v < solver.var_count; ++v) {
        std::size_t c = solver.candidates[v]->size();
        if (c == 0) return result;
        if (c > 1) open_vars.push_back(v);
        if (combos > cap || c > cap / std::max<std::uint64_t>(combos, 1))
            combos = cap + 1;
        else
            combos *= c;
    }
    if (combos > cap) {
        result.status = LiftStatus::CapExceeded;
        return result;
    }

    std::vector<std::size_t> pick(open_vars.size(), 0);
    std::vector<PartialSolution> accepted;
    while (true) {
        // assemble a candidate at level k+1
        std::vector<std::optional<Word>> successors(alpha.size());
        auto value_of = [&](int var) -> const Word& {
            for (std::size_t j = 0; j < open_vars.size(); ++j)
                if (open_vars[j] == var) return (*solver.candidates[var])[pick[j]];
            return solver.candidates[var]->front();
        };
        bool ok = true;
        for (SymbolId a = 0; a < alpha.size() && ok; ++a) {
            if (alpha.is_constant(a)) {
                if (was_active[a] || is_new[a]) successors[a] = Word{a};
                continue;
            }
            if (!partial.successors[a]) continue;
            Word succ;
            if (partial.successors[a]->empty()) {
                if (solver.pre_var[a] >= 0) succ = value_of(solver.pre_var[a]);
            } else {
                if (solver.pre_var[a] >= 0) succ = value_of(solver.pre_var[a]);
                if (core[a]) succ.insert(succ.end(), core[a]->begin(), core[a]->end());
                else {  // occurs in no source word at this level
                    ok = false;
                    break;
                }
                if (solver.suf_var[a] >= 0) {
                    const Word& sfx = value_of(solver.suf_var[a]);
                    succ.insert(succ.end(), sfx.begin(), sfx.end());
                }
            }
            if (full_level && succ.empty()) ok = false;
            if (ok && !check_nesting(alpha, succ)) ok = false;
            successors[a] = std::move(succ);
        }
        if (ok && table_compatible(successors, words))
            accepted.push_back(PartialSolution{k + 1, std::move(successors)});

        // odometer
        std::size_t j = 0;
        for (; j < open_vars.size(); ++j) {
            if (++pick[j] < solver.candidates[open_vars[j]]->size()) break;
            pick[j] = 0;
        }
        if (j == open_vars.size()) break;
        if (open_vars.empty()) break;
    }

    if (accepted.empty()) return result;  // Dead
    result.status = open_vars.empty() ? LiftStatus::Resolved : LiftStatus::Ambiguous;
    result.candidates = std::move(accepted);

    // certainty report over the source words
    bool all_resolved = open_vars.empty();
    result.certainty.resize(n_words == 0 ? 0 : n_words - 1);
    for (std::size_t i = 0; i + 1 < n_words; ++i) {
        const Word& u = words[i];
        auto& row = result.certainty[i];
        row.resize(u.size());
        std::size_t at = 0;
        const auto& sol = result.candidates.front().successors;
        for (std::size_t p = 0; p < u.size(); ++p) {
            row[p].symbol = u[p];
            row[p].projected_certain = true;
            row[p].certain = all_resolved;
            if (all_resolved) {
                std::size_t len = sol[u[p]] ? sol[u[p]]->size() : 1;
                row[p].begin = at;
                row[p].end = at + len;
                at += len;
            }
        }
    }
    return result;
}

// ---- the driver ----------------------------------------------------------------

std::string_view infer_status_name(InferStatus s) {
    switch (s) {
        case InferStatus::Found: return "found";
        case InferStatus::Exhausted: return "exhausted";
        case InferStatus::Timeout: return "timeout";
    }
    return "?";
}

namespace {

std::string successors_key(const std::vector<std::optional<Word>>& succ) {
    std::string key;
    for (std::size_t a = 0; a < succ.size(); ++a) {
        key += std::to_string(a);
        key += '=';
        if (succ[a])
            for (SymbolId s : *succ[a]) key += static_cast<char>('a' + s % 26);
        key += ';';
    }
    return key;
}

}  // namespace

InferResult infer(const DevSequence& rho, const InferOptions& options) {
    auto start = std::chrono::steady_clock::now();
    auto finish = [&](InferResult r) {
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
        return r;
    };
    InferResult result;
    const AlphabetRef& alphabet = rho.alphabet;
    Deadline deadline =
        options.total_time_ms > 0 ? Deadline::in_ms(options.total_time_ms) : Deadline::none();
    GAConfig ga_cfg = options.ga ? *options.ga : default_ga_config(options.scheme);

    auto levels = constant_levels(*alphabet);

    // all-constant input: the identity system is the only candidate
    if (alphabet->nonconstant_count() == 0) {
        std::vector<Word> productions(alphabet->size());
        for (SymbolId c = 0; c < alphabet->size(); ++c) productions[c] = Word{c};
        LSystem sys;
        sys.alphabet = alphabet;
        sys.axiom = rho.words.front();
        sys.productions = std::move(productions);
        if (is_compatible(sys, rho)) {
            result.status = InferStatus::Found;
            result.system = std::move(sys);
        }
        return finish(result);
    }

    // words per level: V-bar plus the first k constant groups
    std::vector<std::vector<char>> level_active(levels.size() + 1,
                                                std::vector<char>(alphabet->size(), 0));
    for (std::size_t k = 0; k <= levels.size(); ++k) {
        for (SymbolId a = 0; a < alphabet->size(); ++a)
            if (!alphabet->is_constant(a)) level_active[k][a] = 1;
        for (std::size_t l = 0; l < k; ++l)
            for (SymbolId c : levels[l]) level_active[k][c] = 1;
    }
    std::vector<std::vector<Word>> level_words(levels.size() + 1);
    for (std::size_t k = 0; k <= levels.size(); ++k) {
        for (const Word& w : rho.words) {
            level_words[k].push_back(filter_word(w, level_active[k]));
            if (level_words[k].back().empty()) return finish(result);  // exhausted
        }
    }

    // reduce on the full words, then on the constant-free projection
    BoundsState full_state = init_bounds(rho);
    if (!fixpoint(full_state)) return finish(result);
    if (options.dump_bounds && options.diagnostics)
        *options.diagnostics << "bounds after full-alphabet reduction:\n"
                             << dump_bounds(full_state);

    bool timed_out = false;
    auto make_level_state = [&](std::size_t k) {
        BoundsState st = init_bounds(level_words[k], alphabet, level_active[k],
                                     k == levels.size() ? 1 : 0);
        absorb_projected(st, full_state);
        fixpoint(st);
        return st;
    };

    std::deque<PartialSolution> queue;
    std::set<std::pair<std::size_t, std::string>> enqueued;
    auto push = [&](PartialSolution p) {
        auto key = std::make_pair(p.level, successors_key(p.successors));
        if (!enqueued.insert(key).second) return;
        queue.push_back(std::move(p));
    };

    auto ga_at_level = [&](std::size_t k) {
        BoundsState st = make_level_state(k);
        if (options.dump_bounds && options.diagnostics && k == 0)
            *options.diagnostics << "bounds at level 0:\n" << dump_bounds(st);
        if (st.no_solution) return;
        EncodingInstance space(options.scheme, st, level_words[k]);
        SearchReport report = run_ga(space, ga_cfg, deadline);
        result.generations += report.generations;
        result.ga_runs += 1;
        if (report.termination == Termination::Timeout) timed_out = true;
        for (FoundSolution& sol : report.solutions)
            push(PartialSolution{k, std::move(sol.successors)});
    };

    ga_at_level(0);

    while (!queue.empty()) {
        if (deadline.expired()) {
            result.status = InferStatus::Timeout;
            return finish(result);
        }
        PartialSolution partial;
        if (options.lifo) {
            partial = std::move(queue.back());
            queue.pop_back();
        } else {
            partial = std::move(queue.front());
            queue.pop_front();
        }
        if (partial.level == levels.size()) {
            try {
                std::vector<Word> productions(alphabet->size());
                for (SymbolId a = 0; a < alphabet->size(); ++a) {
                    if (!partial.successors[a]) throw InputError("incomplete solution");
                    productions[a] = *partial.successors[a];
                }
                LSystem sys = make_lsystem(alphabet, rho.words.front(), std::move(productions));
                if (!is_compatible(sys, rho)) continue;
                result.status = InferStatus::Found;
                result.system = std::move(sys);
                return finish(result);
            } catch (const InputError&) {
                continue;
            }
        }
        LiftResult lift =
            lift_constant(partial, level_words, alphabet, levels, options.lift_cap);
        result.lifts += 1;
        switch (lift.status) {
            case LiftStatus::Resolved:
            case LiftStatus::Ambiguous:
                for (PartialSolution& p : lift.candidates) push(std::move(p));
                break;
            case LiftStatus::CapExceeded:
                ga_at_level(partial.level + 1);
                break;
            case LiftStatus::Dead:
                break;
        }
    }
    result.status = timed_out ? InferStatus::Timeout : InferStatus::Exhausted;
    return finish(result);
}

}  // namespace lsinfer
