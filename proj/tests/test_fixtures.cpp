#include "doctest.h"

#include "spikit/error.hpp"
#include "spikit/fixtures.hpp"

using namespace spikit;

TEST_CASE("every catalogue entry verifies") {
    auto reports = verify_all(SPIKIT_FIXTURE_DIR);
    CHECK(reports.size() >= 30);
    for (auto& r : reports) {
        INFO(r.name);
        CHECK_MESSAGE(r.error.empty(), r.error);
        for (auto& c : r.results) CHECK_MESSAGE(c.ok, (r.name + ": " + c.claim + " -- " + c.detail));
    }
}

TEST_CASE("looking up entries") {
    auto names = list_fixtures(SPIKIT_FIXTURE_DIR);
    CHECK(std::is_sorted(names.begin(), names.end()));
    auto e = fixture("ex-3.1", SPIKIT_FIXTURE_DIR);
    CHECK(e.kind == FixtureKind::SloCounterexample);
    CHECK(e.claims.size() == 2);
    auto r = verify_entry(e, SPIKIT_FIXTURE_DIR);
    CHECK(r.ok());
    CHECK(r.passed() == 2);
    CHECK_THROWS_AS(fixture("no-such-entry", SPIKIT_FIXTURE_DIR), Error);
    CHECK_THROWS_AS(fixture("../fixtures/ex-3.1", SPIKIT_FIXTURE_DIR), Error);
}

TEST_CASE("text round trip") {
    for (auto& name : list_fixtures(SPIKIT_FIXTURE_DIR)) {
        INFO(name);
        auto e = fixture(name, SPIKIT_FIXTURE_DIR);
        auto again = parse_fixture(render_fixture(e));
        CHECK(again.name == e.name);
        CHECK(again.kind == e.kind);
        CHECK(again.theory == e.theory);
        CHECK(again.payload == e.payload);
        CHECK(again.claims == e.claims);
    }
    CHECK_THROWS_AS(parse_fixture("kind: frame\n"), ParseError);
    CHECK_THROWS_AS(parse_fixture("name: x\nkind: sculpture\n"), ParseError);
    CHECK_THROWS_AS(parse_fixture("name: x\nkind: frame\n  stray\n"), ParseError);
}

TEST_CASE("a false claim is reported, not thrown") {
    FixtureEntry e;
    e.name = "probe";
    e.kind = FixtureKind::Frame;
    e.payload = "points: a b\nR: a->b\n";
    e.claims = {"has reflexive", "lacks reflexive", "validates <><>p => <>p", "frobnicates"};
    auto r = verify_entry(e, SPIKIT_FIXTURE_DIR);
    REQUIRE(r.results.size() == 4);
    CHECK_FALSE(r.results[0].ok);
    CHECK(r.results[1].ok);
    CHECK(r.results[2].ok);
    CHECK_FALSE(r.results[3].ok);
    CHECK_FALSE(r.error.empty());
    CHECK_FALSE(r.ok());
}

TEST_CASE("parametric algebras match the catalogue") {
    for (int n : {2, 3}) {
        INFO(n);
        auto alt = verify_fixture("fig9-A" + std::to_string(n), SPIKIT_FIXTURE_DIR);
        CHECK(alt.ok());
        auto load = [](const std::string& name) { return parse_slo(fixture(name, SPIKIT_FIXTURE_DIR).payload); };
        CHECK(slo_isomorphic(alt_fun_algebra(n), load("fig9-A" + std::to_string(n))));
        CHECK(slo_isomorphic(depth_algebra(n), load("fig10-A" + std::to_string(n))));
        CHECK(check_slo_axioms(alt_fun_algebra(n)).empty());
        CHECK(check_slo_axioms(depth_algebra(n)).empty());
    }
    CHECK(alt_fun_algebra(4).size() == 7);
    CHECK_THROWS_AS(depth_algebra(0), PreconditionError);
}

TEST_CASE("presets and properties") {
    CHECK(theory_preset("equiv").size() == 3);
    CHECK(parse_theory("@qo; <>p => p").size() == 3);
    CHECK(theory_preset("fun:2").size() == 1);
    CHECK_THROWS_AS(theory_preset("fun:0"), Error);
    CHECK_THROWS_AS(theory_preset("nope"), Error);
    for (auto name : {"reflexive", "functional:2", "cluster:3", "weakly-connected", "mckinsey"})
        CHECK_NOTHROW(frame_property(name));
    CHECK_THROWS_AS(frame_property("bouncy"), Error);
}

TEST_CASE("embedding search finds frames when they exist") {
    // the complex algebra of a reflexive point embeds into itself
    auto one = parse_slo("elements: b top\ntop: top\norder: b<top\ndia R: b->b, top->top\n");
    auto s = search_embedding(one, frame_property("reflexive"), 2);
    REQUIRE(s.found);
    CHECK(eval_fo(s.frame, frame_property("reflexive")));
    CHECK(s.map.size() == 2);

    // a functional algebra embeds into a functional frame
    auto chain = parse_slo("elements: b a top\ntop: top\norder: b<a, a<top\ndia R: b->a, a->top, top->top\n");
    auto f = search_embedding(chain, frame_property("functional"), 3);
    REQUIRE(f.found);
    CHECK(eval_fo(f.frame, frame_property("functional")));

    // with no constraint on the frame, A_2 is represented on a few points
    CHECK(search_embedding(alt_fun_algebra(2), FO::verum(), 4).found);
    auto none = search_embedding(alt_fun_algebra(2), frame_property("functional:2"), 4);
    CHECK_FALSE(none.found);
    CHECK(none.maps > 0);
    CHECK_THROWS_AS(search_embedding(one, frame_property("reflexive"), 9), CapError);
}
