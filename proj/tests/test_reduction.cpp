#include <doctest.h>

#include "lsinfer/genbench.hpp"
#include "lsinfer/reduction.hpp"

using namespace lsinfer;

namespace {

int id(const DevSequence& rho, char g) { return rho.alphabet->id_of(g); }

bool is_prefix(const Word& p, const Word& w) {
    return p.size() <= w.size() && std::equal(p.begin(), p.end(), w.begin());
}

bool is_suffix(const Word& s, const Word& w) {
    return s.size() <= w.size() && std::equal(s.rbegin(), s.rend(), w.rbegin());
}

}  // namespace

TEST_CASE("init_bounds caps") {
    DevSequence rho = parse_sequence("A\nAB\n");
    BoundsState st = init_bounds(rho);
    int a = id(rho, 'A');
    CHECK(st.len_min[a] == 1);
    CHECK(st.len_max[a] == 2);  // a lone symbol produces the whole next word

    DevSequence still = parse_sequence("AB\nAB\n");
    BoundsState st2 = init_bounds(still);
    CHECK(st2.len_max[id(still, 'A')] == 1);
    CHECK(st2.len_max[id(still, 'B')] == 1);
}

TEST_CASE("init_bounds pins constants") {
    DevSequence rho = parse_sequence("A+\nAA+\n");
    BoundsState st = init_bounds(rho);
    int plus = id(rho, '+');
    int a = id(rho, 'A');
    CHECK(st.len_min[plus] == 1);
    CHECK(st.len_max[plus] == 1);
    CHECK(st.g_min.at(plus, plus) == 1);
    CHECK(st.g_max.at(plus, plus) == 1);
    CHECK(st.g_min.at(plus, a) == 0);
    CHECK(st.g_max.at(plus, a) == 0);
    REQUIRE(st.known[plus].has_value());

    DevSequence constant_only = parse_sequence("+\n+\n");
    BoundsState st3 = init_bounds(constant_only);
    CHECK(st3.all_known());
}

TEST_CASE("fragment refinement on the branching example") {
    // omega_1 = +++A[-FF][+F]BF, omega_2 = ++++A[-FF][-FF][+F][+F]BFF,
    // with the successor length of A bounded by [2, 8]
    DevSequence rho = parse_sequence("+++A[-FF][+F]BF\n++++A[-FF][-FF][+F][+F]BFF\n");
    BoundsState st = init_bounds(rho);
    int a = id(rho, 'A');
    st.len_min[a] = 2;
    st.len_max[a] = 8;
    refine_fragments(st);
    REQUIRE_FALSE(st.no_solution);

    CHECK(rho.alphabet->render(st.pre[a]) == "+A");
    REQUIRE(st.sup[a].has_value());
    CHECK(rho.alphabet->render(*st.sup[a]) == "+A[-FF]");

    auto g = [&](char to) { return st.g_min.at(a, id(rho, to)); };
    auto gmax = [&](char to) { return st.g_max.at(a, id(rho, to)); };
    CHECK(g('+') == 1);
    CHECK(g('A') == 1);
    CHECK(gmax('+') == 1);
    CHECK(gmax('-') == 1);
    CHECK(gmax('A') == 1);
    CHECK(gmax('[') == 1);
    CHECK(gmax(']') == 1);
    CHECK(gmax('F') == 2);
}

TEST_CASE("prefix window extends through an opened branch") {
    // with min length 1, a successor window starting at [ must reach its ]
    DevSequence rho = parse_sequence("+AB\n+[-F]BB\n");
    BoundsState st = init_bounds(rho);
    refine_fragments(st);
    REQUIRE_FALSE(st.no_solution);
    CHECK(rho.alphabet->render(st.pre[id(rho, 'A')]) == "[-F]");
}

TEST_CASE("no nonconstant means no fragment change") {
    DevSequence rho = parse_sequence("++\n++\n");
    BoundsState st = init_bounds(rho);
    fixpoint(st);
    CHECK_FALSE(refine_fragments(st));
}

TEST_CASE("growth accounting example") {
    // previous word ABA, next word ABABBBABA, minimum growths seeded
    DevSequence rho = parse_sequence("ABA\nABABBBABA\n");
    BoundsState st = init_bounds(rho);
    int a = id(rho, 'A'), b = id(rho, 'B');
    st.g_min.at(a, a) = 1;
    refine_growth_bounds(st);
    REQUIRE_FALSE(st.no_solution);
    CHECK(st.g_max.at(a, a) == 2);
    CHECK(st.g_max.at(b, a) == 2);
}

TEST_CASE("growth minimum raise example") {
    // two A's and one B; ten A's produced; A contributes at most 4 each
    DevSequence rho = parse_sequence("AAB\nAAAAAAAAAABBB\n");
    BoundsState st = init_bounds(rho);
    int a = id(rho, 'A'), b = id(rho, 'B');
    st.g_max.at(a, a) = 4;
    refine_growth_bounds(st);
    REQUIRE_FALSE(st.no_solution);
    CHECK(st.g_min.at(b, a) >= 2);
}

TEST_CASE("length bounds") {
    DevSequence rho = parse_sequence("A\nAB\n");
    BoundsState st = init_bounds(rho);
    refine_length_bounds(st);
    CHECK(st.len_max[id(rho, 'A')] == 2);

    // minimum growth sums push the length minimum up
    DevSequence rho2 = parse_sequence("A\nAABBB\n");
    BoundsState st2 = init_bounds(rho2);
    int a2 = id(rho2, 'A');
    st2.g_min.at(a2, a2) = 2;
    st2.g_min.at(a2, id(rho2, 'B')) = 3;
    refine_length_bounds(st2);
    CHECK(st2.len_min[a2] >= 5);
}

TEST_CASE("marker slices the derivation") {
    DevSequence rho = parse_sequence("A+B\nABA+BBB\n");
    BoundsState st = init_bounds(rho);
    REQUIRE(fixpoint(st));
    int a = id(rho, 'A'), b = id(rho, 'B');
    REQUIRE(st.known[a].has_value());
    REQUIRE(st.known[b].has_value());
    CHECK(rho.alphabet->render(*st.known[a]) == "ABA");
    CHECK(rho.alphabet->render(*st.known[b]) == "BBB");
}

TEST_CASE("marker reservation eliminates the second occurrence") {
    DevSequence rho = parse_sequence("A+BC-\nA+BC+C-\n");
    BoundsState st = init_bounds(rho);
    REQUIRE(fixpoint(st));
    bool found = false;
    for (const MarkerAssociation& m : st.marker_log)
        if (m.derivation == 0 && m.src_pos == 1 && m.dst_pos == 1 && m.length == 1)
            found = true;
    CHECK(found);
    REQUIRE(st.known[id(rho, 'A')].has_value());
    CHECK(rho.alphabet->render(*st.known[id(rho, 'A')]) == "A");
}

TEST_CASE("words without constants produce no markers") {
    DevSequence rho = parse_sequence("AB\nABBA\n");
    BoundsState st = init_bounds(rho);
    CHECK_FALSE(build_marker_map(st));
    CHECK(st.marker_log.empty());
}

TEST_CASE("fixpoint is idempotent and detects contradictions") {
    DevSequence rho = parse_sequence("+++A[-FF][+F]BF\n++++A[-FF][-FF][+F][+F]BFF\n");
    BoundsState st = init_bounds(rho);
    REQUIRE(fixpoint(st));
    CHECK_FALSE(refine_fragments(st));
    CHECK_FALSE(build_marker_map(st));
    CHECK_FALSE(refine_growth_bounds(st));
    CHECK_FALSE(refine_length_bounds(st));

    BoundsState bad = init_bounds(rho);
    bad.len_min[id(rho, 'A')] = 3;
    bad.len_max[id(rho, 'A')] = 2;
    CHECK_FALSE(fixpoint(bad));

    DevSequence impossible = parse_sequence("A\nAA\nA\n");
    BoundsState st2 = init_bounds(impossible);
    CHECK_FALSE(fixpoint(st2));
}

TEST_CASE("bounds are sound and monotone on generated systems") {
    for (int size = 1; size <= 6; ++size) {
        for (int instance = 0; instance < 4; ++instance) {
            GeneratorConfig cfg;
            cfg.nonconstants = size;
            cfg.seed = static_cast<std::uint64_t>(7000 + size * 10 + instance);
            LSystem sys = generate_lsystem(cfg);
            DevSequence rho = derive_budgeted(sys, static_cast<std::size_t>(size), 50'000);
            BoundsState st = init_bounds(rho);
            std::int64_t slack = st.slack();
            REQUIRE(fixpoint(st));
            CHECK(st.slack() <= slack);
            for (SymbolId s = 0; s < sys.alphabet->size(); ++s) {
                const Word& succ = sys.productions[s];
                std::int64_t len = static_cast<std::int64_t>(succ.size());
                CHECK(st.len_min[s] <= len);
                CHECK(len <= st.len_max[s]);
                ParikhVector counts = parikh(succ, sys.alphabet->size());
                for (SymbolId b = 0; b < sys.alphabet->size(); ++b) {
                    CHECK(st.g_min.at(s, b) <= counts[b]);
                    CHECK(counts[b] <= st.g_max.at(s, b));
                }
                CHECK(is_prefix(st.pre[s], succ));
                CHECK(is_suffix(st.suf[s], succ));
                if (st.sup[s]) CHECK(is_prefix(succ, *st.sup[s]));
                if (st.known[s]) CHECK(*st.known[s] == succ);
            }
        }
    }
}

TEST_CASE("bounds dump is printable") {
    DevSequence rho = parse_sequence("A+\nAA+\n");
    BoundsState st = init_bounds(rho);
    fixpoint(st);
    std::string dump = dump_bounds(st);
    CHECK(dump.find("A: len") != std::string::npos);
}
