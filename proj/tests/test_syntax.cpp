#include "doctest.h"

#include "spikit/random.hpp"
#include "spikit/syntax.hpp"

using namespace spikit;

namespace {
Formula F(const char* s) { return parse_formula(s); }
Implication I(const char* s) { return parse_implication(s); }
} // namespace

TEST_CASE("parse and render") {
    Signature sig;
    CHECK(parse_formula("top", sig).is_top());
    auto f = parse_formula("<R>p & q", sig);
    REQUIRE(f.kind() == Kind::And);
    CHECK(f.args().size() == 2);
    CHECK(f.str() == "q & <R>p");
    CHECK(f.args()[0].kind() == Kind::Var);
    CHECK(sig.has(intern("R")));

    auto g = parse_formula("<R>(p & <S>q)", sig);
    CHECK(g.kind() == Kind::Dia);
    CHECK(g.body().kind() == Kind::And);
    CHECK(g.str() == "<R>(p & <S>q)");
    CHECK(sig.relations().size() == 2);

    CHECK(F("<>p").str() == "<R>p");
    CHECK(F("q & <>p").str() == F("<R>p & q").str());
}

TEST_CASE("parse errors") {
    Signature sig;
    CHECK_THROWS_AS(parse_formula("p & ", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("<r>p", sig), ParseError);
    CHECK_THROWS_AS(parse_formula("bot", sig), ParseError);
    CHECK_THROWS_AS(parse_implication("p & q", sig), ParseError);
    try {
        parse_formula("p & (q", sig);
        FAIL("no throw");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 6);
    }
    sig.set_bot_dialect(true);
    CHECK(parse_formula("bot", sig).kind() == Kind::Bot);
}

TEST_CASE("implications from the defaults table") {
    CHECK(I("p => <R>p").str() == "p => <R>p");
    CHECK(I("<R><R>p => <R>p").lhs.depth() == 2);
    auto sym = I("q & <R>p => <R>(p & <R>q)");
    CHECK(sym.lhs.str() == "q & <R>p");
    CHECK(sym.rhs.str() == "<R>(p & <R>q)");
}

TEST_CASE("canonical forms") {
    CHECK(F("q & p & p & top").str() == "p & q");
    CHECK(F("top & top").str() == "top");
    CHECK(F("<R>(p & p)").str() == "<R>p");
    CHECK(F("(p & q) & (r & p)").str() == "p & q & r");
    CHECK(F("p & bot & <R>q").kind() == Kind::Bot);
    CHECK(F("<R>(top & p)").str() == "<R>p");
}

TEST_CASE("canonicalisation is idempotent and parse/render round-trips") {
    Rng rng(7);
    FormulaShape shape;
    shape.relations = {intern("R"), intern("S")};
    for (int k = 0; k < 300; ++k) {
        auto f = random_formula(rng, shape);
        CHECK(canonicalize(f) == f);
        CHECK(canonicalize(canonicalize(f)) == canonicalize(f));
        Signature sig;
        auto g = parse_formula(f.str(), sig);
        CHECK(g.str() == f.str());
    }
}

TEST_CASE("render of parse equals canonicalisation for permuted input") {
    // Build the same conjunction in several orders; all must render identically.
    auto a = F("<R>(q & p) & r & <S>top");
    auto b = F("r & <S>top & <R>(p & q)");
    auto c = F("<S>top & (r & <R>(p & q & p))");
    CHECK(a == b);
    CHECK(b == c);
}

TEST_CASE("substitution") {
    Substitution m{{intern("p"), F("<R>q")}};
    CHECK(substitute(F("p"), m).str() == "<R>q");
    CHECK(substitute(F("p"), {}).str() == "p");
    // identity map
    Substitution id{{intern("p"), F("p")}, {intern("q"), F("q")}};
    auto f = F("<R>(p & <R>q) & p");
    CHECK(substitute(f, id) == f);
    // substitution collapses duplicates after canonicalisation
    Substitution pq{{intern("q"), F("p")}};
    CHECK(substitute(F("p & q"), pq).str() == "p");

    // depth schema: p -> p & <>q, q -> q & <>p turns lhs p & <>q into p & <>q & <>(q & <>p)
    Substitution dep{{intern("p"), F("p & <>q")}, {intern("q"), F("q & <>p")}};
    auto lhs = substitute(F("p & <>q"), dep);
    CHECK(lhs == F("p & <>q & <>(q & <>p)"));
}

TEST_CASE("substitution commutes with canonicalisation") {
    Rng rng(11);
    FormulaShape shape;
    for (int k = 0; k < 200; ++k) {
        auto f = random_formula(rng, shape);
        auto g = random_formula(rng, shape);
        Substitution m{{intern("p"), g}};
        CHECK(canonicalize(substitute(f, m)) == substitute(canonicalize(f), m));
    }
}

TEST_CASE("classify") {
    auto c1 = classify(I("<R><R>top => <R>top"));
    CHECK(c1.variable_free);
    CHECK(c1.bot_free);
    auto c2 = classify(I("<R><R>p => <R>p"));
    CHECK_FALSE(c2.variable_free);
    CHECK(c2.left_variable_linear);
    CHECK(classify(I("<R>p & <R>q => <R>(p & q)")).left_variable_linear);
    CHECK_FALSE(classify(I("p & <R>p => <S>p")).left_variable_linear);
    CHECK_FALSE(classify(I("p => bot")).bot_free);
}

TEST_CASE("bot translations") {
    Sym R = intern("R");
    auto out = bot_translate({I("<S>p => bot")}, R, BotMode::Eliminate);
    REQUIRE(out.size() == 3);
    CHECK(out[0].str() == "<S>p => <R>top");
    CHECK(out[1].str() == "<R>top => q");
    CHECK(out[2].str() == "<S><R>top => <R>top");

    auto lifted = bot_translate({I("p => p")}, R, BotMode::Lift);
    CHECK(lifted[0].str() == "p => p");

    auto dropped = bot_translate({I("<R>top => <R>(p & <R>top)")}, R, BotMode::Drop);
    CHECK(dropped[0].str() == "bot => bot");

    CHECK_THROWS_AS(bot_translate({I("<R>p => p")}, R, BotMode::Eliminate), PreconditionError);
}

TEST_CASE("drop after lift is the identity") {
    Rng rng(3);
    Sym Z = intern("Z");
    FormulaShape shape;
    shape.relations = {intern("S")};
    for (int k = 0; k < 200; ++k) {
        auto i = random_implication(rng, shape);
        // sprinkle bot into some implications
        if (k % 3 == 0) i.rhs = Formula::conj(i.rhs, Formula::dia(intern("S"), Formula::bot()));
        auto up = bot_translate({i}, Z, BotMode::Lift);
        auto down = bot_translate(up, Z, BotMode::Drop);
        CHECK(down[0] == i);
    }
}

TEST_CASE("rules") {
    Signature sig;
    auto r = parse_rule("<>top => p ; p => q / q => p", sig);
    CHECK(r.premises.size() == 2);
    CHECK(r.conclusion.str() == "q => p");
    auto r0 = parse_rule("p => <>p", sig);
    CHECK(r0.premises.empty());
}
