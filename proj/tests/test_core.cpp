#include <doctest.h>

#include <random>

#include "lsinfer/core.hpp"

using namespace lsinfer;

namespace {

LSystem make(const std::string& text) { return parse_lsystem(text); }

const char* kAlgae = "axiom: A\nA -> AB\nB -> A\n";
const char* kDragon = "axiom: X\nconstants: +-F\nX -> X+YF+\nY -> -F-Y\n";

}  // namespace

TEST_CASE("fixed constant ordering") {
    auto alpha = Alphabet::make("Ff+-[]ab/\\|^&", "Ff+-[]/\\|^&");
    std::string order;
    for (SymbolId c : alpha->constants()) order.push_back(alpha->glyph(c));
    CHECK(order == "[]+-&^\\/|Ff");
    CHECK(alpha->nonconstant_count() == 2);
    CHECK(alpha->glyph(0) == 'a');
    CHECK(alpha->glyph(1) == 'b');
}

TEST_CASE("alphabet rejects invalid input") {
    CHECK_THROWS_AS(Alphabet::make("A;", ""), InputError);
    CHECK_THROWS_AS(Alphabet::make("AB", "C"), InputError);
    CHECK_THROWS_AS(Alphabet::make("AB[", "["), InputError);  // lone bracket
}

TEST_CASE("derive_step") {
    LSystem algae = make(kAlgae);
    const Alphabet& a = *algae.alphabet;
    CHECK(a.render(derive_step(algae, a.intern("A"))) == "AB");
    CHECK(a.render(derive_step(algae, a.intern("ABA"))) == "ABAAB");

    LSystem dragon = make(kDragon);
    CHECK(dragon.alphabet->render(derive_step(dragon, dragon.alphabet->intern("X"))) ==
          "X+YF+");
}

TEST_CASE("derive_sequence") {
    LSystem algae = make(kAlgae);
    DevSequence rho = derive_sequence(algae, 3);
    REQUIRE(rho.words.size() == 4);
    CHECK(rho.alphabet->render(rho.words[0]) == "A");
    CHECK(rho.alphabet->render(rho.words[1]) == "AB");
    CHECK(rho.alphabet->render(rho.words[2]) == "ABA");
    CHECK(rho.alphabet->render(rho.words[3]) == "ABAAB");

    LSystem identity = make("axiom: ++\nconstants: +\n");
    DevSequence still = derive_sequence(identity, 1);
    CHECK(still.words[0] == still.words[1]);
}

TEST_CASE("derive_sequence on the large biological model") {
    // hand expansion of the 28-production model, two steps from axiom c
    LSystem sys = make(
        "axiom: c\nconstants: []+-Ff\n"
        "c -> FFFz[+k][-r]FFfd\nz -> Fz\nk -> lmfF\nr -> stfF\n"
        "d -> FFFz[+k][-r]FFfe\nl -> fF\nm -> n\ns -> fF\nt -> u\n"
        "e -> FFFz[+fj]FFfg\nn -> fFF[-A]Fo\nu -> fFF[+A]Fv\nj -> abF\n"
        "g -> FFFz[+k][-r]FFfh\nA -> fFB\no -> fFF[-B]Fp\nv -> fFF[+B]Fw\n"
        "a -> Ff\nb -> c\nh -> FFFz[+k][-r]FFfi\nB -> fFC\np -> fFF[-C]Fq\n"
        "w -> fFF[+C]Fx\ni -> FFFz[-fj]FFfc\nC -> fFD\nq -> fFF[-D]F\n"
        "x -> fFF[+D]F\nD -> fF\n");
    DevSequence rho = derive_sequence(sys, 2);
    CHECK(rho.alphabet->render(rho.words[1]) == "FFFz[+k][-r]FFfd");
    CHECK(rho.words[1].size() == 16);
    CHECK(rho.alphabet->render(rho.words[2]) == "FFFFz[+lmfF][-stfF]FFfFFFz[+k][-r]FFfe");
    CHECK(rho.words[2].size() == 38);
}

TEST_CASE("parikh") {
    auto alpha = Alphabet::make("AB", "");
    CHECK(parikh(alpha->intern(""), 2) == ParikhVector{0, 0});
    CHECK(parikh(alpha->intern("ABA"), 2) == ParikhVector{2, 1});
    CHECK(parikh(alpha->intern("ABABBBABA"), 2) == ParikhVector{4, 5});
}

TEST_CASE("growth_matrix") {
    LSystem algae = make(kAlgae);
    GrowthMatrix m = growth_matrix(algae);
    CHECK(m.at(0, 0) == 1);
    CHECK(m.at(0, 1) == 1);
    CHECK(m.at(1, 0) == 1);
    CHECK(m.at(1, 1) == 0);
    CHECK(m.row_sum(0) == 2);

    LSystem identity = make("axiom: +-\nconstants: +-\n");
    GrowthMatrix eye = growth_matrix(identity);
    for (std::size_t i = 0; i < eye.n; ++i)
        for (std::size_t j = 0; j < eye.n; ++j) CHECK(eye.at(i, j) == (i == j ? 1 : 0));

    // ids: X=0 Y=1, constants + - F = 2 3 4
    LSystem dragon = make(kDragon);
    GrowthMatrix d = growth_matrix(dragon);
    CHECK(d.at(0, 0) == 1);
    CHECK(d.at(0, 1) == 1);
    CHECK(d.at(0, 2) == 2);
    CHECK(d.at(0, 3) == 0);
    CHECK(d.at(0, 4) == 1);
}

TEST_CASE("is_compatible") {
    LSystem algae = make(kAlgae);
    const Alphabet& a = *algae.alphabet;
    DevSequence good{algae.alphabet, {a.intern("A"), a.intern("AB"), a.intern("ABA")}};
    DevSequence bad{algae.alphabet, {a.intern("A"), a.intern("AB"), a.intern("ABB")}};
    CHECK(is_compatible(algae, good));
    CHECK_FALSE(is_compatible(algae, bad));
    CHECK(is_compatible(algae, derive_sequence(algae, 5)));
}

TEST_CASE("check_nesting") {
    auto alpha = Alphabet::make("AB[]+", "[]+");
    CHECK(check_nesting(*alpha, alpha->intern("[+A]")));
    CHECK_FALSE(check_nesting(*alpha, alpha->intern("[[A]")));
    CHECK(check_nesting(*alpha, alpha->intern("B[+A]B")));
    CHECK_FALSE(check_nesting(*alpha, alpha->intern("]A[")));
}

TEST_CASE("parikh linearity and length additivity") {
    LSystem dragon = make(kDragon);
    const Alphabet& a = *dragon.alphabet;
    GrowthMatrix m = growth_matrix(dragon);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        Word w;
        std::size_t len = rng() % 20;
        for (std::size_t i = 0; i < len; ++i)
            w.push_back(static_cast<SymbolId>(rng() % a.size()));
        Word next = derive_step(dragon, w);
        ParikhVector before = parikh(w, a.size());
        ParikhVector after = parikh(next, a.size());
        std::int64_t expected_len = 0;
        for (std::size_t b = 0; b < a.size(); ++b) {
            std::int64_t dot = 0;
            for (std::size_t x = 0; x < a.size(); ++x) dot += before[x] * m.at(x, b);
            CHECK(after[b] == dot);
            expected_len += before[b] * static_cast<std::int64_t>(dragon.productions[b].size());
        }
        CHECK(static_cast<std::int64_t>(next.size()) == expected_len);
    }
}

TEST_CASE("constants are fixed points") {
    LSystem dragon = make(kDragon);
    Word constants_only = dragon.alphabet->intern("+-F-F+");
    CHECK(derive_step(dragon, constants_only) == constants_only);
}

TEST_CASE("lsystem text format round trip") {
    LSystem dragon = make(kDragon);
    std::string text = format_lsystem(dragon);
    CHECK(text == "axiom: X\nconstants: +-F\nX -> X+YF+\nY -> -F-Y\n");
    LSystem again = parse_lsystem(text);
    CHECK(format_lsystem(again) == text);

    CHECK_THROWS_AS(make("axiom: A\n"), InputError);                 // no production for A
    CHECK_THROWS_AS(make("A -> AB\n"), InputError);                  // missing axiom
    CHECK_THROWS_AS(make("axiom: A\nA -> \n"), InputError);          // empty successor
    CHECK_THROWS_AS(make("axiom: A\nA -> [A\n"), InputError);        // bad nesting
    CHECK_THROWS_AS(make("axiom: A\nconstants: +\nA -> A\n+ -> A\n"), InputError);
}

TEST_CASE("sequence file format") {
    DevSequence rho = parse_sequence("A\nAB\nABA\n");
    CHECK(rho.words.size() == 3);
    CHECK(rho.alphabet->constant_count() == 0);
    CHECK(format_sequence(rho) == "A\nAB\nABA\n");

    // turtle glyphs default to constants, fixed order
    DevSequence turtle = parse_sequence("X\nX+YF+\n");
    std::string consts;
    for (SymbolId c : turtle.alphabet->constants()) consts.push_back(turtle.alphabet->glyph(c));
    CHECK(consts == "+F");

    // header and override
    DevSequence with_header = parse_sequence("constants: +\nX\nX+YF+\n");
    CHECK(with_header.alphabet->constant_count() == 1);
    DevSequence overridden = parse_sequence("X\nX+YF+\n", std::string(""));
    CHECK(overridden.alphabet->constant_count() == 0);

    CHECK_THROWS_AS(parse_sequence("A\n"), InputError);              // one word
    CHECK_THROWS_AS(parse_sequence("A\nAB\n", std::string("Q")), InputError);
}
