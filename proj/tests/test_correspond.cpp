#include "doctest.h"

#include "spikit/correspond.hpp"
#include "spikit/random.hpp"

using namespace spikit;

namespace {

Implication I(const char* s) { return parse_implication(s); }
const Sym R = intern("R");

Frame frame_of(const char* text) { return parse_frame(text); }

// All frames on n points over the single relation R, as a bit pattern per frame.
Frame frame_from_bits(int n, unsigned bits) {
    Frame f(n);
    f.declare(R);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (bits >> (a * n + b) & 1U) f.add_edge(R, a, b);
    return f;
}

} // namespace

TEST_CASE("correspondents of the standard axioms") {
    auto refl = correspondent(I("p => <>p"));
    CHECK(refl.str() == "forall x0. R(x0,x0)");
    auto trans = correspondent(I("<><>p => <>p"));
    CHECK(trans.str() == "forall x0 x1 x2. (R(x0,x1) & R(x1,x2) -> R(x0,x2))");
    auto dense = correspondent(I("<>p => <><>p"));
    CHECK(dense.str() == "forall x0 x1. (R(x0,x1) -> exists y1. (R(x0,y1) & R(y1,x1)))");
    auto sym = correspondent(I("q & <>p => <>(p & <>q)"));
    CHECK(sym.str() == "forall x0 x1. (R(x0,x1) -> R(x1,x0))");

    // a variable missing on the left can never be matched
    CHECK(correspondent(I("<>top => <>p")).str() == "forall x0 x1. (R(x0,x1) -> false)");
    CHECK(correspondent(I("top => top")).is_verum());
    CHECK_THROWS_AS(correspondent(I("p => bot")), PreconditionError);
}

TEST_CASE("choice-function form") {
    auto fun = correspondent_dnf(I("<>p & <>q => <>(p & q)"));
    CHECK(fun.str().find('|') == std::string::npos);
    CHECK(fun.str() == "forall x0 x1 x2. (R(x0,x1) & R(x0,x2) -> x1 = x2)");

    auto two = correspondent_dnf(I("p & <R>p => <S>p"));
    CHECK(two.str() == "forall x0 x1. (R(x0,x1) -> S(x0,x0) | S(x0,x1))");
    CHECK(correspondent_dnf(I("top => top")).is_verum());
}

TEST_CASE("first-order evaluation") {
    auto refl = correspondent(I("p => <>p"));
    CHECK(eval_fo(frame_of("points: a\nR: a->a"), refl));
    CHECK_FALSE(eval_fo(frame_of("points: a b\nR: a->b"), refl));
    auto trans = correspondent(I("<><>p => <>p"));
    CHECK(eval_fo(frame_of("points: a b c\nR: a->b, b->c, a->c"), trans));
    CHECK_FALSE(eval_fo(frame_of("points: a b c\nR: a->b, b->c"), trans));

    FO open = FO::atom(R, "x", "y");
    CHECK_THROWS_AS(eval_fo(frame_of("points: a"), open), Error);
    CHECK(free_vars(FO::forall({"x"}, open)) == std::vector<std::string>{"y"});
    // empty frame: universal sentences hold vacuously
    CHECK(eval_fo(Frame(0), refl));
}

TEST_CASE("rendering precedence") {
    FO a = FO::atom(R, "x", "y"), b = FO::atom(R, "y", "x"), c = FO::eq("x", "y");
    FO s = FO::forall({"x", "y"}, FO::implies(FO::disj({a, FO::conj({b, c})}), c));
    CHECK(s.str() == "forall x y. (R(x,y) | R(y,x) & x = y -> x = y)");
    CHECK(FO::conj({FO::disj({a, b}), c}).str() == "(R(x,y) | R(y,x)) & x = y");
}

TEST_CASE("correspondents agree with frame validity on random pairs") {
    Rng rng(19);
    FormulaShape shape;
    shape.max_depth = 3;
    shape.vars = 3;
    int checked = 0;
    for (int k = 0; k < 500; ++k) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto fr = random_frame(rng, n, {R}, 0.4);
        auto i = random_implication(rng, shape);
        bool want = frame_validates(fr, i);
        CHECK_MESSAGE(eval_fo(fr, correspondent(i)) == want, i.str());
        FO dnf;
        try {
            dnf = correspondent_dnf(i);
        } catch (const CapError&) {
            continue;
        }
        CHECK_MESSAGE(eval_fo(fr, dnf) == want, i.str());
        ++checked;
    }
    CHECK(checked > 400);
}

TEST_CASE("profile sentences") {
    CHECK(phi_of_profile(named_profile("refl")).str() == "forall x0. R(x0,x0)");
    CHECK(phi_of_profile(named_profile("trans")).str() == "forall x0 x1 x2. (R(x0,x1) & R(x1,x2) -> R(x0,x2))");
    CHECK(phi_of_profile(named_profile("sym")).str() == "forall x0 x1. (R(x0,x1) -> R(x1,x0))");

    // G itself refutes its own profile sentence
    for (auto name : {"refl", "trans", "sym", "eucl", "pi1", "pi2", "pi3"}) {
        auto p = named_profile(name);
        CHECK_FALSE(eval_fo(p.g, phi_of_profile(p)));
    }
}

TEST_CASE("profile sentences hold exactly on closure fixpoints") {
    for (auto name : {"refl", "trans", "sym", "eucl"}) {
        ProfileSet pi{named_profile(name)};
        FO phi = phi_of_profile(pi[0]);
        for (int n = 1; n <= 3; ++n)
            for (unsigned bits = 0; bits < (1U << (n * n)); ++bits) {
                Frame f = frame_from_bits(n, bits);
                CHECK(eval_fo(f, phi) == (closure(pi, f) == f));
            }
    }
    Rng rng(5);
    std::vector<Sym> rels{intern("R"), intern("S")};
    for (auto name : {"pi1", "pi3"}) {
        ProfileSet pi{named_profile(name)};
        FO phi = phi_of_profile(pi[0]);
        for (int k = 0; k < 200; ++k) {
            auto f = random_frame(rng, 1 + static_cast<int>(rng() % 4), rels, 0.3);
            CHECK(eval_fo(f, phi) == (closure(pi, f) == f));
        }
    }
}
