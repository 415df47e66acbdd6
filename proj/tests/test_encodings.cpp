#include <doctest.h>

#include "lsinfer/encodings.hpp"
#include "lsinfer/genbench.hpp"

using namespace lsinfer;

namespace {

BoundsState fixed_state(const DevSequence& rho) {
    BoundsState st = init_bounds(rho);
    REQUIRE(fixpoint(st));
    return st;
}

std::string succ_of(const EncodingInstance& inst, const DecodedCandidate& c, char glyph) {
    const Alphabet& a = *inst.state().alphabet;
    int s = a.id_of(glyph);
    REQUIRE(s >= 0);
    REQUIRE(c.successors[s].has_value());
    return a.render(*c.successors[s]);
}

}  // namespace

TEST_CASE("row reduction basics") {
    using R = Rational;
    // x + y = 3, x - y = 1  ->  unique x=2, y=1
    LinearSystem sys = row_reduce({{R(1), R(1)}, {R(1), R(-1)}}, {R(3), R(1)});
    CHECK_FALSE(sys.inconsistent);
    CHECK(sys.free_cols.empty());
    auto values = evaluate_system(sys, {});
    REQUIRE(values.has_value());
    CHECK((*values)[0] == 2);
    CHECK((*values)[1] == 1);

    // inconsistent
    LinearSystem bad = row_reduce({{R(1), R(1)}, {R(2), R(2)}}, {R(3), R(7)});
    CHECK(bad.inconsistent);

    // underdetermined: one equation, two unknowns
    LinearSystem under = row_reduce({{R(2), R(1)}}, {R(5)});
    CHECK(under.free_cols.size() == 1);
    auto at2 = evaluate_system(under, {1});  // y = 1 -> x = 2
    REQUIRE(at2.has_value());
    CHECK((*at2)[0] == 2);
    CHECK_FALSE(evaluate_system(under, {2}).has_value());  // x = 3/2, rejected
}

TEST_CASE("matrix system goes unique with enough words") {
    DevSequence rho = parse_sequence("A\nAB\nABA\nABAAB\n");
    BoundsState st = fixed_state(rho);
    auto lengths = build_matrix_system(rho.words, st, MatrixMode::Lengths);
    REQUIRE(lengths.kind == MatrixSystemResult::Kind::Unique);
    CHECK(lengths.lens[rho.alphabet->id_of('A')] == 2);
    CHECK(lengths.lens[rho.alphabet->id_of('B')] == 1);

    auto growth = build_matrix_system(rho.words, st, MatrixMode::Growth);
    REQUIRE(growth.kind == MatrixSystemResult::Kind::Unique);
    int a = rho.alphabet->id_of('A'), b = rho.alphabet->id_of('B');
    CHECK(growth.growth.at(a, a) == 1);
    CHECK(growth.growth.at(a, b) == 1);
    CHECK(growth.growth.at(b, a) == 1);
    CHECK(growth.growth.at(b, b) == 0);
}

TEST_CASE("matrix system keeps free variables when underdetermined") {
    DevSequence rho = parse_sequence("AB\nABA\n");
    BoundsState st = init_bounds(rho);  // no fixpoint: keep bounds loose
    auto lengths = build_matrix_system(rho.words, st, MatrixMode::Lengths);
    REQUIRE(lengths.kind == MatrixSystemResult::Kind::Reduced);
    CHECK(lengths.systems.size() == 1);
    CHECK(lengths.systems[0].free_cols.size() == 1);
    CHECK(lengths.free_vars.size() == 1);
}

TEST_CASE("all ones solve the identity system") {
    DevSequence rho = parse_sequence("AB\nAB\n");
    BoundsState st = fixed_state(rho);
    EncodingInstance inst(Scheme::L, st, rho.words);
    REQUIRE(inst.feasible());
    Genome g;
    g.ints.assign(inst.gene_count(), 1);
    auto decoded = inst.decode(g);
    REQUIRE(decoded.has_value());
    CHECK(succ_of(inst, *decoded, 'A') == "A");
    CHECK(succ_of(inst, *decoded, 'B') == "B");
}

TEST_CASE("length decode") {
    DevSequence rho = parse_sequence("AB\nABA\n");
    BoundsState st = init_bounds(rho);
    EncodingInstance inst(Scheme::L, st, rho.words);
    REQUIRE(inst.gene_count() == 2);

    Genome good;
    good.ints = {2, 1};
    auto decoded = inst.decode(good);
    REQUIRE(decoded.has_value());
    CHECK(succ_of(inst, *decoded, 'A') == "AB");
    CHECK(succ_of(inst, *decoded, 'B') == "A");

    Genome bad;
    bad.ints = {1, 1};
    CHECK_FALSE(inst.decode(bad).has_value());

    // decode determinism
    auto again = inst.decode(good);
    CHECK(inst.solution_key(again, good) == inst.solution_key(decoded, good));
}

TEST_CASE("growth decode") {
    DevSequence rho = parse_sequence("A\nAB\nABA\nABAAB\n");
    BoundsState st = init_bounds(rho);
    EncodingInstance inst(Scheme::G, st, rho.words);
    REQUIRE(inst.feasible());
    // genes are (A,A) (A,B) (B,A) (B,B)
    REQUIRE(inst.gene_count() == 4);
    Genome truth;
    truth.ints = {1, 1, 1, 0};
    auto decoded = inst.decode(truth);
    REQUIRE(decoded.has_value());
    CHECK(succ_of(inst, *decoded, 'A') == "AB");
    CHECK(succ_of(inst, *decoded, 'B') == "A");

    Genome zero_row;
    zero_row.ints = {0, 0, 1, 0};
    CHECK_FALSE(inst.decode(zero_row).has_value());

    Genome perturbed;
    perturbed.ints = {2, 1, 1, 0};  // violates Y*M = Z, scanning rejects
    CHECK_FALSE(inst.decode(perturbed).has_value());
}

TEST_CASE("matrix length decode rejects fractional pivots") {
    // 2*len(A) + len(B) = 5 with one free variable; odd free values keep the
    // pivot integral, even ones do not
    DevSequence rho = parse_sequence("AAB\nABABB\n");
    BoundsState st = init_bounds(rho);
    EncodingInstance inst(Scheme::ML, st, rho.words);
    REQUIRE(inst.feasible());
    REQUIRE(inst.gene_count() == 1);

    Genome odd;
    odd.ints = {1};
    auto decoded = inst.decode(odd);
    REQUIRE(decoded.has_value());
    CHECK(succ_of(inst, *decoded, 'A') == "AB");
    CHECK(succ_of(inst, *decoded, 'B') == "B");

    Genome even;
    even.ints = {2};
    CHECK_FALSE(inst.decode(even).has_value());
}

TEST_CASE("unique matrix instance needs no genes") {
    DevSequence rho = parse_sequence("A\nAB\nABA\nABAAB\n");
    BoundsState st = fixed_state(rho);
    for (Scheme scheme : {Scheme::ML, Scheme::MG}) {
        EncodingInstance inst(scheme, st, rho.words);
        REQUIRE(inst.feasible());
        CHECK(inst.gene_count() == 0);
        CHECK(inst.space_size() == std::uint64_t{1});
        auto decoded = inst.decode(Genome{});
        REQUIRE(decoded.has_value());
        CHECK(succ_of(inst, *decoded, 'A') == "AB");
        CHECK(succ_of(inst, *decoded, 'B') == "A");
    }
}

TEST_CASE("osos candidate machinery") {
    // A_max 7, prefix A, suffix BB, growth cap on B already consumed
    DevSequence rho = parse_sequence("AABB\nAABBABB\n");
    BoundsState st = init_bounds(rho);
    int a = rho.alphabet->id_of('A'), b = rho.alphabet->id_of('B');
    st.len_min[a] = 3;
    st.len_max[a] = 7;
    st.pre[a] = rho.alphabet->intern("A");
    st.suf[a] = rho.alphabet->intern("BB");
    st.g_max.at(a, b) = 2;
    st.g_max.at(a, a) = 7;
    EncodingInstance inst(Scheme::OSOS1, st, rho.words);
    auto cands = inst.osos_slot_candidates(static_cast<SymbolId>(a), {});
    bool offers_b = false;
    for (auto& [sym, w] : cands)
        if (sym == b) offers_b = true;
    CHECK_FALSE(offers_b);
    bool offers_a = false;
    for (auto& [sym, w] : cands)
        if (sym == a) offers_a = true;
    CHECK(offers_a);
}

TEST_CASE("osos context weights follow corpus frequency") {
    // corpus AABAACAAB; after decoding AA the trigram weights give B 2/3
    DevSequence rho = parse_sequence("AABAACAAB\nCBCBCB\n");
    BoundsState st = init_bounds(rho);
    st.no_solution = false;  // the words are a corpus, not a derivation
    int a = rho.alphabet->id_of('A'), b = rho.alphabet->id_of('B');
    int c = rho.alphabet->id_of('C');
    // decode symbol A with candidates restricted to {A, B}
    for (SymbolId s = 0; s < rho.alphabet->size(); ++s) {
        st.len_min[s] = 1;
        st.len_max[s] = 6;
        st.g_min.at(a, s) = 0;
    }
    st.len_min[a] = 4;
    st.pre[a].clear();
    st.suf[a].clear();
    st.g_max.at(a, c) = 0;
    st.g_max.at(a, a) = 9;
    st.g_max.at(a, b) = 9;
    st.known[a].reset();
    EncodingInstance inst(Scheme::OSOS2, st, rho.words);
    Word placed = rho.alphabet->intern("AA");
    auto cands = inst.osos_slot_candidates(static_cast<SymbolId>(a), placed);
    REQUIRE(cands.size() == 2);  // A and B; no-symbol gated out by len_min
    double total = cands[0].second + cands[1].second;
    for (auto& [sym, w] : cands) {
        if (sym == a) CHECK(w / total == doctest::Approx(1.0 / 3.0));
        if (sym == b) CHECK(w / total == doctest::Approx(2.0 / 3.0));
    }
}

TEST_CASE("osos decode pins prefix and suffix and honors the sentinel") {
    DevSequence rho = parse_sequence("AB\nABA\n");
    BoundsState st = init_bounds(rho);
    int a = rho.alphabet->id_of('A');
    st.pre[a] = rho.alphabet->intern("AB");
    st.len_min[a] = 2;
    EncodingInstance inst(Scheme::OSOS1, st, rho.words);
    Genome g;
    g.reals.assign(inst.gene_count(), 1.0);  // the sentinel sits at the top interval
    auto decoded = inst.decode(g);
    REQUIRE(decoded.has_value());
    CHECK(succ_of(inst, *decoded, 'A') == "AB");  // exactly the prefix

    // duplicate detection: the sentinel position does not matter
    DevSequence rho2 = parse_sequence("AA\nABBABB\n");
    BoundsState st2 = init_bounds(rho2);
    EncodingInstance inst2(Scheme::OSOS1, st2, rho2.words);
    REQUIRE(inst2.gene_count() >= 2);
    Genome g1, g2;
    g1.reals.assign(inst2.gene_count(), 1.0);
    g2.reals.assign(inst2.gene_count(), 1.0);
    g1.reals.front() = 0.0;
    g2.reals.back() = 0.0;
    auto d1 = inst2.decode(g1);
    auto d2 = inst2.decode(g2);
    REQUIRE(d1.has_value());
    REQUIRE(d2.has_value());
    if (d1->successors == d2->successors)
        CHECK(inst2.solution_key(d1, g1) == inst2.solution_key(d2, g2));
}

TEST_CASE("true genome decodes compatibly for every scheme") {
    for (int size = 2; size <= 5; ++size) {
        GeneratorConfig cfg;
        cfg.nonconstants = size;
        cfg.seed = static_cast<std::uint64_t>(400 + size);
        LSystem sys = generate_lsystem(cfg);
        DevSequence rho = derive_budgeted(sys, static_cast<std::size_t>(size), 50'000);
        BoundsState st = init_bounds(rho);
        REQUIRE(fixpoint(st));
        GrowthMatrix truth = growth_matrix(sys);

        // length scheme
        {
            EncodingInstance inst(Scheme::L, st, rho.words);
            Genome g;
            for (SymbolId s = 0; s < sys.alphabet->size(); ++s)
                if (!sys.alphabet->is_constant(s))
                    g.ints.push_back(static_cast<std::int64_t>(sys.productions[s].size()));
            auto decoded = inst.decode(g);
            REQUIRE(decoded.has_value());
            CHECK(fitness_table(decoded->successors, rho.words) == 0.0);
        }
        // growth scheme
        {
            EncodingInstance inst(Scheme::G, st, rho.words);
            Genome g;
            for (SymbolId s = 0; s < sys.alphabet->size(); ++s) {
                if (sys.alphabet->is_constant(s)) continue;
                for (SymbolId b = 0; b < sys.alphabet->size(); ++b)
                    g.ints.push_back(truth.at(s, b));
            }
            auto decoded = inst.decode(g);
            REQUIRE(decoded.has_value());
            CHECK(fitness_table(decoded->successors, rho.words) == 0.0);
        }
        // matrix schemes: free variables set to their true values
        {
            EncodingInstance inst(Scheme::ML, st, rho.words);
            REQUIRE(inst.feasible());
            Genome g;
            if (const auto* mr = inst.matrix_result())
                for (const MatrixFreeVar& fv : mr->free_vars)
                    g.ints.push_back(static_cast<std::int64_t>(
                        sys.productions[fv.symbol].size()));
            auto decoded = inst.decode(g);
            REQUIRE(decoded.has_value());
            CHECK(fitness_table(decoded->successors, rho.words) == 0.0);
        }
        {
            EncodingInstance inst(Scheme::MG, st, rho.words);
            REQUIRE(inst.feasible());
            Genome g;
            if (const auto* mr = inst.matrix_result())
                for (const MatrixFreeVar& fv : mr->free_vars)
                    g.ints.push_back(truth.at(fv.symbol, fv.target));
            auto decoded = inst.decode(g);
            REQUIRE(decoded.has_value());
            CHECK(fitness_table(decoded->successors, rho.words) == 0.0);
        }
    }
}

TEST_CASE("scheme names round trip") {
    for (Scheme s : {Scheme::OSOS1, Scheme::OSOS2, Scheme::G, Scheme::L, Scheme::MG,
                     Scheme::ML})
        CHECK(scheme_from_name(scheme_name(s)) == s);
    CHECK_FALSE(scheme_from_name("nope").has_value());
}
