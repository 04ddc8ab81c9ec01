#include "doctest.h"

#include "spikit/kripke.hpp"
#include "spikit/random.hpp"

using namespace spikit;

namespace {

Formula F(const char* s) { return parse_formula(s); }
Implication I(const char* s) { return parse_implication(s); }
const Sym R = intern("R");

// Independent truth definition: explicit successor loops, no bitset shortcuts.
bool naive_sat(const KripkeModel& m, int w, const Formula& f) {
    switch (f.kind()) {
    case Kind::Top: return true;
    case Kind::Bot: return false;
    case Kind::Var: return (m.val_of(f.sym()) >> w) & 1U;
    case Kind::And:
        for (auto& a : f.args())
            if (!naive_sat(m, w, a)) return false;
        return true;
    case Kind::Dia:
        for (int v = 0; v < m.frame.size(); ++v)
            if (m.frame.edge(f.sym(), w, v) && naive_sat(m, v, f.body())) return true;
        return false;
    }
    return false;
}

KripkeModel chain(int n, bool reflexive = false) {
    KripkeModel m;
    for (int i = 0; i < n; ++i) m.frame.add_point(std::to_string(i + 1));
    m.frame.declare(R);
    for (int i = 0; i + 1 < n; ++i) m.frame.add_edge(R, i, i + 1);
    if (reflexive)
        for (int i = 0; i < n; ++i) m.frame.add_edge(R, i, i);
    return m;
}

} // namespace

TEST_CASE("satisfaction basics") {
    auto m = chain(2);
    m.val[intern("p")] = bit(1);
    CHECK(satisfies(m, 0, F("top")));
    CHECK(satisfies(m, 0, F("<>p")));
    CHECK_FALSE(satisfies(m, 0, F("p")));
    CHECK_THROWS(satisfies(m, 5, F("p")));

    // one point p, its successor not: p & <>top holds, <>p fails
    auto b = chain(2);
    b.val[intern("p")] = bit(0);
    CHECK(satisfies(b, 0, F("p & <>top")));
    CHECK_FALSE(satisfies(b, 0, F("<>p")));
}

TEST_CASE("satisfaction agrees with the naive definition") {
    Rng rng(1);
    FormulaShape shape;
    shape.relations = {R, intern("S")};
    for (int k = 0; k < 300; ++k) {
        auto m = random_model(rng, 1 + k % 5, shape.relations, 3);
        auto f = random_formula(rng, shape);
        for (int w = 0; w < m.frame.size(); ++w) CHECK(satisfies(m, w, f) == naive_sat(m, w, f));
    }
}

TEST_CASE("tree models") {
    auto t = tree_model(F("p"));
    CHECK(t.size() == 1);
    CHECK(t.model.frame.edge_count() == 0);
    CHECK(t.model.val_of(intern("p")) == bit(0));

    auto c = tree_model(F("<>(p & <>q)"));
    CHECK(c.size() == 3);
    CHECK(c.model.frame.edge(R, 0, 1));
    CHECK(c.model.frame.edge(R, 1, 2));
    CHECK(c.model.val_of(intern("p")) == bit(1));
    CHECK(c.model.val_of(intern("q")) == bit(2));

    CHECK(tree_model(F("p & p")).size() == 1);
    CHECK_THROWS_AS(tree_model(F("<>bot")), PreconditionError);
}

TEST_CASE("formula_of") {
    KripkeModel one;
    one.frame.add_point("x");
    one.val[intern("p")] = 1;
    CHECK(formula_of(one, 0).str() == "p");

    auto s = F("<>p & <><>q");
    CHECK(formula_of(tree_model(s).model, 0) == s);

    // diamond-shaped DAG r -> a, r -> b, a -> c, b -> c with q at c
    KripkeModel d;
    for (auto n : {"r", "a", "b", "c"}) d.frame.add_point(n);
    d.frame.add_edge(R, 0, 1);
    d.frame.add_edge(R, 0, 2);
    d.frame.add_edge(R, 1, 3);
    d.frame.add_edge(R, 2, 3);
    d.val[intern("q")] = bit(3);
    CHECK(formula_of(d, 0).str() == "<R><R>q");

    auto cyc = chain(2);
    cyc.frame.add_edge(R, 1, 0);
    CHECK_THROWS_AS(formula_of(cyc, 0), PreconditionError);
    CHECK_THROWS_AS(formula_of(chain(3), 1), PreconditionError);
}

TEST_CASE("formula_of inverts tree_model") {
    Rng rng(5);
    FormulaShape shape;
    shape.relations = {R, intern("S")};
    for (int k = 0; k < 300; ++k) {
        auto f = random_formula(rng, shape);
        CHECK(formula_of(tree_model(f).model, 0) == f);
    }
}

TEST_CASE("unravel") {
    auto s = F("<>(p & <>q) & <>r");
    auto t = unravel(tree_model(s).model, 0);
    CHECK(formula_of(t.model, 0) == s);
    CHECK(t.size() == 4);

    KripkeModel d;
    for (auto n : {"r", "a", "b", "c"}) d.frame.add_point(n);
    d.frame.add_edge(R, 0, 1);
    d.frame.add_edge(R, 0, 2);
    d.frame.add_edge(R, 1, 3);
    d.frame.add_edge(R, 2, 3);
    d.val[intern("q")] = bit(3);
    auto u = unravel(d, 0);
    // two branches, each of length two
    CHECK(u.size() == 5);
    CHECK(popcount(u.model.frame.succ(R, 0)) == 2);
    CHECK(popcount(u.model.val_of(intern("q"))) == 2);
    CHECK(formula_of(u.model, 0) == formula_of(d, 0));
    // truth is preserved at the root
    for (const char* tau : {"<><>q", "<>q", "<>(<>q & <>q)", "<><>top"})
        CHECK(satisfies(u.model, 0, F(tau)) == satisfies(d, 0, F(tau)));

    auto c3 = unravel(chain(3), 0);
    CHECK(c3.size() == 3);
    CHECK(c3.model.frame.edge_count() == 2);
}

TEST_CASE("homomorphisms") {
    auto t = tree_model(F("<>p"));
    Rng rng(9);
    for (int k = 0; k < 50; ++k) {
        auto m = random_model(rng, 3, {R}, 1);
        for (int w = 0; w < 3; ++w)
            CHECK(find_homomorphism(t, m, {0, w}).has_value() == satisfies(m, w, F("<>p")));
    }
    auto s = tree_model(F("<>(p & <>q) & r"));
    auto id = find_homomorphism(s, s.model, {0, 0});
    REQUIRE(id);
    CHECK(is_homomorphism(s.model, s.model, *id));

    auto one = chain(2);
    one.val[intern("p")] = bit(1);
    CHECK_FALSE(find_homomorphism(tree_model(F("<>p & <>q")), one, {0, 0}));
}

TEST_CASE("tree models characterise truth via homomorphisms") {
    Rng rng(21);
    FormulaShape shape;
    shape.relations = {R, intern("S")};
    for (int k = 0; k < 500; ++k) {
        auto m = random_model(rng, 1 + k % 5, shape.relations, 3, 0.4);
        auto f = random_formula(rng, shape);
        auto t = tree_model(f);
        for (int w = 0; w < m.frame.size(); ++w) {
            auto h = find_homomorphism(t, m, {0, w});
            CHECK(h.has_value() == satisfies(m, w, f));
            if (h) CHECK(is_homomorphism(t.model, m, *h));
            // the general backtracking search must agree with the tree DP
            auto g = find_homomorphism(t.model, m, {0, w});
            CHECK(g.has_value() == h.has_value());
        }
    }
}

TEST_CASE("homomorphisms preserve truth") {
    Rng rng(33);
    FormulaShape shape;
    for (int k = 0; k < 200; ++k) {
        auto a = random_model(rng, 3, {R}, 2, 0.4);
        auto b = random_model(rng, 3, {R}, 2, 0.6);
        auto f = random_formula(rng, shape);
        for_each_hom(a.frame, b.frame, {}, [&](const HomMap& h) {
            if (!is_homomorphism(a, b, h)) return true;
            for (int x = 0; x < 3; ++x)
                if (satisfies(a, x, f)) CHECK(satisfies(b, h[x], f));
            return true;
        });
    }
}

TEST_CASE("Kripke validity") {
    CHECK(kr_valid(I("<>(p & q) => <>p & <>q")));
    CHECK_FALSE(kr_valid(I("<>p & <>q => <>(p & q)")));
    CHECK_FALSE(kr_valid(I("p => <>p")));
    CHECK(kr_valid(I("p & q => p")));
}

TEST_CASE("frame validity") {
    Frame refl(1);
    refl.add_edge(R, 0, 0);
    CHECK(frame_validates(refl, I("p => <>p")));
    CHECK_FALSE(frame_validates(chain(3).frame, I("<><>p => <>p")));
    CHECK_FALSE(frame_validates(chain(2).frame, I("p & <>top => <>p")));
    auto qo = chain(3, true);
    qo.frame.add_edge(R, 0, 2);
    CHECK(frame_validates(qo.frame, I("<><>p => <>p")));
    CHECK(frame_validates(qo.frame, I("p => <>p")));
    CHECK_FALSE(frame_validates(qo.frame, I("<>p => p")));
}

TEST_CASE("frame validity equals validity in every model on the frame") {
    // Oracle: enumerate all valuations of up to two variables on small frames.
    Rng rng(13);
    FormulaShape shape;
    shape.vars = 2;
    shape.max_depth = 2;
    for (int k = 0; k < 200; ++k) {
        int n = 1 + k % 3;
        auto fr = random_frame(rng, n, {R}, 0.45);
        auto i = random_implication(rng, shape);
        bool all = true;
        KripkeModel m{fr, {}};
        for (PSet a = 0; a <= fr.all() && all; ++a)
            for (PSet b = 0; b <= fr.all() && all; ++b) {
                m.val[intern("p")] = a;
                m.val[intern("q")] = b;
                all = model_validates(m, i);
            }
        CHECK(frame_validates(fr, i) == all);
        bool pointwise = true;
        for (int w = 0; w < n; ++w) pointwise &= frame_validates_at(fr, i, w);
        CHECK(pointwise == all);
    }
}

TEST_CASE("rule validity quantifies over valuations") {
    // irreflexive 2-cycle: p => <>p holds for p empty or full; with p full,
    // p => q fails for q empty. Hand enumeration of the 16 valuations.
    Frame cyc(2);
    cyc.add_edge(R, 0, 1);
    cyc.add_edge(R, 1, 0);
    Signature sig;
    auto rule = parse_rule("p => <>p / p => q", sig);
    bool expected = true;
    for (PSet p = 0; p < 4; ++p)
        for (PSet q = 0; q < 4; ++q) {
            bool prem = true;
            for (int w = 0; w < 2; ++w)
                if (has(p, w) && !has(p, 1 - w)) prem = false;
            bool concl = (p & ~q) == 0;
            if (prem && !concl) expected = false;
        }
    CHECK(frame_validates_rule(cyc, rule) == expected);
    CHECK_FALSE(expected);

    Frame u(1);
    u.add_edge(R, 0, 0);
    CHECK(frame_validates_rule(u, parse_rule("p => <>p", sig)));

    // 2-chain, <>top => p / q => p: p must contain the first point; q = {2} breaks it
    auto c = chain(2).frame;
    bool exp2 = true;
    for (PSet p = 0; p < 4; ++p)
        for (PSet q = 0; q < 4; ++q)
            if (has(p, 0) && (q & ~p)) exp2 = false;
    CHECK(frame_validates_rule(c, parse_rule("<>top => p / q => p", sig)) == exp2);
}

TEST_CASE("text format round trip") {
    auto m = parse_model("points: a b c\nR: a->b, b->c\nS: c->a\nval p: a c\n");
    CHECK(m.frame.size() == 3);
    CHECK(m.frame.edge(R, 0, 1));
    CHECK(m.frame.edge(intern("S"), 2, 0));
    CHECK(m.val_of(intern("p")) == (bit(0) | bit(2)));
    auto again = parse_model(render_model(m));
    CHECK(again.frame == m.frame);
    CHECK(again.val == m.val);
    CHECK_THROWS_AS(parse_model("R: a->b\n"), ParseError);
    CHECK_THROWS_AS(parse_model("points: a\nR: a->z\n"), ParseError);
    CHECK(render_set(m.frame, bit(0) | bit(2)) == "{a,c}");
    CHECK(parse_set(m.frame, "{a,c}") == (bit(0) | bit(2)));
}
