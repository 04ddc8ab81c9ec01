#include "doctest.h"

#include "spikit/random.hpp"
#include "spikit/slo.hpp"

using namespace spikit;

namespace {

Implication I(const char* s) { return parse_implication(s); }
const Sym R = intern("R");
const Sym S = intern("S");

const char* kThreeChain = R"(
elements: b a top
top: top
order: b<a, a<top
dia R: b->b, a->b, top->a
)";

FiniteSLO two_element(const char* dia_a, const char* dia_top) {
    return parse_slo(std::string("elements: a top\ntop: top\norder: a<top\ndia R: a->") + dia_a + ", top->" +
                     dia_top + "\n");
}

// Up-closed, meet-closed, nonempty subsets found by brute force.
std::vector<PSet> brute_filters(const FiniteSLO& a) {
    std::vector<PSet> out;
    for (PSet s = 1; s < (PSet{1} << a.size()); ++s) {
        bool ok = true;
        for (int x = 0; x < a.size() && ok; ++x) {
            if (!has(s, x)) continue;
            for (int y = 0; y < a.size() && ok; ++y) {
                if (a.leq(x, y) && !has(s, y)) ok = false;
                if (has(s, y) && !has(s, a.meet(x, y))) ok = false;
            }
        }
        if (ok) out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("the three-element chain algebra") {
    auto a = parse_slo(kThreeChain);
    CHECK(check_slo_axioms(a).empty());
    int b = a.index_of("b"), el = a.index_of("a");
    SloValuation v{{intern("p"), el}};
    CHECK(eval_term(a, parse_formula("p & <>top"), v) == el);
    CHECK(eval_term(a, parse_formula("<>p"), v) == b);
    CHECK(eval_term(a, parse_formula("top"), {}) == a.top());
    CHECK(slo_validates(a, I("<>p => p")));
    CHECK_FALSE(slo_validates(a, I("p & <>top => <>p")));
    CHECK(slo_validates(a, I("p => top")));
    CHECK_THROWS_AS(eval_term(a, parse_formula("q"), v), Error);
}

TEST_CASE("two-element algebra with a full diamond") {
    auto a = two_element("top", "top");
    CHECK(eval_term(a, parse_formula("<>top"), {}) == a.top());
    CHECK(slo_validates(a, I("<>p => <>q")));
    CHECK_FALSE(slo_validates(a, I("<>top => p")));
    CHECK(slo_validates(a, I("p => <>p")));
}

TEST_CASE("axiom violations are reported") {
    auto bad = two_element("top", "a");
    auto v = check_slo_axioms(bad);
    REQUIRE_FALSE(v.empty());
    CHECK(v.front().find("monotonicity") != std::string::npos);

    auto with_bottom = parse_slo(std::string(kThreeChain) + "bottom: b\n");
    CHECK(check_slo_axioms(with_bottom).empty());
    auto bad_bottom = parse_slo("elements: a top\ntop: top\nbottom: a\norder: a<top\ndia R: a->top, top->top\n");
    CHECK_FALSE(check_slo_axioms(bad_bottom).empty());
}

TEST_CASE("text format errors") {
    CHECK_THROWS_AS(parse_slo("elements: a b top\ntop: top\norder: a<top, b<top\ndia R: a->a, b->b, top->top"),
                    ParseError);  // a and b have no meet
    CHECK_THROWS_AS(parse_slo("elements: a top\ntop: a\norder: a<top\n"), ParseError);
    CHECK_THROWS_AS(parse_slo("elements: a top\ntop: top\norder: a<top\ndia R: a->a\n"), ParseError);
    CHECK_THROWS_AS(parse_slo("elements: a top\ntop: top\norder: a<top, top<a\n"), ParseError);
}

TEST_CASE("complex algebras") {
    Frame irr(1);
    irr.declare(R);
    auto c = complex_algebra(irr);
    CHECK(c.size() == 2);
    CHECK(c.dia(R, 0) == 0);
    CHECK(c.dia(R, 1) == 0);

    Frame refl(1);
    refl.add_edge(R, 0, 0);
    auto d = complex_algebra(refl);
    CHECK(d.dia(R, 1) == 1);
    CHECK(check_slo_axioms(d).empty());
    CHECK_THROWS_AS(complex_algebra(Frame(7)), CapError);
}

TEST_CASE("complex algebras validate what their frames validate") {
    Rng rng(47);
    FormulaShape shape;
    shape.max_depth = 2;
    shape.vars = 2;
    for (int k = 0; k < 150; ++k) {
        int n = 1 + static_cast<int>(rng() % 3);
        auto fr = random_frame(rng, n, {R}, 0.4);
        auto a = complex_algebra(fr);
        CHECK(check_slo_axioms(a).empty());
        auto i = random_implication(rng, shape);
        CHECK_MESSAGE(slo_validates(a, i) == frame_validates(fr, i), i.str());
    }
}

TEST_CASE("admissible families") {
    auto fr = parse_frame("points: 1 2\nR: 1->2");
    PSet one = bit(0), both = bit(0) | bit(1);
    CHECK_THROWS_AS(slo_from_admissible(fr, {one, both}), Error);
    auto fam = close_family(fr, {one, both});
    CHECK(fam.size() == 3);
    auto a = slo_from_admissible(fr, fam);
    CHECK(slo_isomorphic(a, parse_slo(kThreeChain)));

    auto full = slo_from_admissible(fr, close_family(fr, {0, one, bit(1), both}));
    CHECK(slo_isomorphic(full, complex_algebra(fr)));

    // a family missing an intersection names the pair
    auto g = parse_frame("points: 1 2 3\nR:");
    try {
        slo_from_admissible(g, {bit(0) | bit(1), bit(1) | bit(2), g.all()});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("intersection") != std::string::npos);
    }
}

TEST_CASE("subalgebras keep the rules of their parent") {
    Rng rng(53);
    FormulaShape shape;
    shape.max_depth = 2;
    shape.vars = 2;
    int kept = 0;
    for (int k = 0; k < 60; ++k) {
        auto fr = random_frame(rng, 3, {R}, 0.4);
        auto parent = complex_algebra(fr);
        auto sub = slo_from_admissible(fr, close_family(fr, {static_cast<PSet>(rng() % 8)}));
        Rule r{{random_implication(rng, shape)}, random_implication(rng, shape)};
        if (slo_validates_rule(parent, r)) {
            ++kept;
            CHECK(slo_validates_rule(sub, r));
        }
    }
    CHECK(kept > 5);
}

TEST_CASE("filters are principal") {
    auto chain2 = two_element("a", "top");
    CHECK(filters(chain2).size() == 2);
    CHECK(filters(parse_slo(kThreeChain)).size() == 3);
    auto diamond = parse_slo("elements: z x y top\ntop: top\norder: z<x, z<y, x<top, y<top\n");
    CHECK(filters(diamond).size() == 4);

    for (const auto& l : lattices(5)) {
        auto fs = filters(l);
        auto brute = brute_filters(l);
        std::sort(fs.begin(), fs.end());
        CHECK(fs == brute);
        for (PSet f : brute) {
            int m = l.top();
            for_each_bit(f, [&](int x) { m = l.meet(m, x); });
            CHECK(has(f, m));
            CHECK(principal_filter(l, m) == f);
        }
    }
}

TEST_CASE("lattice enumeration") {
    std::vector<int> counts(6, 0);
    for (const auto& l : lattices(5)) {
        ++counts[l.size()];
        CHECK(check_slo_axioms(l).empty());
    }
    // known numbers of lattices up to isomorphism
    CHECK(counts[1] == 1);
    CHECK(counts[2] == 1);
    CHECK(counts[3] == 1);
    CHECK(counts[4] == 2);
    CHECK(counts[5] == 5);
}

TEST_CASE("pool algebras satisfy the axioms") {
    int n = 0;
    for_each_slo(4, {R}, false, [&](const FiniteSLO& a) {
        ++n;
        CHECK(check_slo_axioms(a).empty());
        return true;
    });
    CHECK(n > 50);
    int normal = 0;
    for_each_slo(4, {R}, true, [&](const FiniteSLO& a) {
        ++normal;
        CHECK(a.bottom().has_value());
        CHECK(check_slo_axioms(a).empty());
        return true;
    });
    CHECK(normal < n);
}

TEST_CASE("element_classic on the three-element chain") {
    auto a = parse_slo(kThreeChain);
    auto e = embed(a, Recipe::ElementClassic);
    CHECK(verify_embedding(e));
    int b = a.index_of("b"), el = a.index_of("a"), t = a.top();
    CHECK(e.target.edge(R, b, b));
    CHECK(e.target.edge(R, b, el));
    CHECK(e.target.edge(R, b, t));
    CHECK(e.target.edge(R, el, t));
    CHECK(e.target.edge_count() == 4);
    CHECK(e.map[b] == bit(b));
    CHECK(e.map[el] == (bit(b) | bit(el)));
    CHECK(e.map[t] == e.target.all());

    // corrupt the map
    auto bad = e;
    std::swap(bad.map[b], bad.map[el]);
    CHECK_FALSE(verify_embedding(bad));
}

TEST_CASE("element_symmetric and identity_rel") {
    auto a = two_element("top", "top");
    auto e = embed(a, Recipe::ElementSymmetric);
    CHECK(e.target.edge_count() == 4);
    CHECK(eval_fo(e.target, recipe_guarantee(Recipe::ElementSymmetric, {R})));

    auto id = parse_slo("elements: a top\ntop: top\norder: a<top\ndia R: a->a, top->top\n");
    auto ei = embed(id, Recipe::IdentityRel);
    CHECK(ei.target.edge_count() == 2);
    CHECK_THROWS_AS(embed(parse_slo(kThreeChain), Recipe::IdentityRel), PreconditionError);
}

TEST_CASE("functional_filter on a three-element chain") {
    auto a = parse_slo("elements: b a top\ntop: top\norder: b<a, a<top\ndia R: b->b, a->top, top->top\n");
    auto e = embed(a, Recipe::FunctionalFilter);
    CHECK(verify_embedding(e));
    CHECK(eval_fo(e.target, recipe_guarantee(Recipe::FunctionalFilter, {R})));
    // dia^-1 of ^b is everything, of ^a and ^top it is ^a
    int fb = e.target.index_of("^b"), fa = e.target.index_of("^a"), ft = e.target.index_of("^top");
    CHECK(e.target.edge(R, fb, fb));
    CHECK(e.target.edge(R, fa, fa));
    CHECK(e.target.edge(R, ft, fa));
    CHECK(e.target.edge_count() == 3);
}

TEST_CASE("identity embedding of a complex algebra") {
    auto fr = parse_frame("points: x y\nR: x->y, y->y");
    auto a = complex_algebra(fr);
    Embedding e{a, fr, a.sets(), Recipe::ElementClassic, 0};
    CHECK(verify_embedding(e));
}

TEST_CASE("every recipe embeds every pool algebra meeting its precondition") {
    std::map<Recipe, int> used;
    auto run = [&](Recipe r, const std::vector<Sym>& rels, int max_n, RecipeOptions opt) {
        auto pre = recipe_precondition(r, rels, opt);
        auto guarantee = recipe_guarantee(r, rels, opt);
        for_each_slo(max_n, rels, false, [&](const FiniteSLO& a) {
            if (!slo_validates(a, pre)) return true;
            auto e = embed(a, r, opt);
            CHECK(verify_embedding(e));
            CHECK_MESSAGE(eval_fo(e.target, guarantee), render_slo(a));
            ++used[r];
            return true;
        });
    };
    run(Recipe::ElementClassic, {R}, 4, {});
    run(Recipe::ElementSymmetric, {R}, 5, {});
    run(Recipe::IdentityRel, {R}, 5, {});
    run(Recipe::FunctionalFilter, {R}, 5, {});
    run(Recipe::Pi1Iterative, {R, S}, 3, {});
    run(Recipe::FuncommProperFilter, {R, S, intern("Z")}, 3, {});
    RecipeOptions two;
    two.chain = 2;
    run(Recipe::TruncatedChain, {R}, 5, two);
    for (Recipe r : all_recipes()) CHECK_MESSAGE(used[r] > 0, recipe_name(r));
}

TEST_CASE("element_classic satisfies both transfer conditions") {
    for_each_slo(4, {R}, false, [&](const FiniteSLO& a) {
        auto e = embed(a, Recipe::ElementClassic);
        for (int x = 0; x < a.size(); ++x)
            for (int y = 0; y < a.size(); ++y) {
                if (e.target.edge(R, x, y)) CHECK(a.leq(x, a.dia(R, y)));
                if (a.leq(x, a.dia(R, y))) {
                    bool found = false;
                    for (int c = 0; c < a.size(); ++c)
                        if (a.leq(c, y) && e.target.edge(R, x, c)) found = true;
                    CHECK(found);
                }
            }
        return true;
    });
}

TEST_CASE("text round trip") {
    auto a = parse_slo(kThreeChain);
    auto b = parse_slo(render_slo(a));
    CHECK(slo_isomorphic(a, b));
    auto fr = parse_frame("points: x y\nR: x->y");
    auto c = complex_algebra(fr);
    CHECK(slo_isomorphic(c, parse_slo(render_slo(c))));
}
