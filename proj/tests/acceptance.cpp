// Acceptance suite: one line per criterion, exit status 1 if any fails.
//
// Every oracle here is independent of the code under test: frames and trees
// are enumerated directly and validity is checked by brute force.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "spikit/calculus.hpp"
#include "spikit/correspond.hpp"
#include "spikit/deciders.hpp"
#include "spikit/defsim.hpp"
#include "spikit/error.hpp"
#include "spikit/fixtures.hpp"
#include "spikit/horn.hpp"
#include "spikit/random.hpp"
#include "spikit/slo.hpp"
#include "spikit/tmred.hpp"

using namespace spikit;
using Clock = std::chrono::steady_clock;

namespace {

const Sym R = intern("R");

struct Outcome {
    bool ok = true;
    std::string detail;
    std::vector<std::string> problems;

    void expect(bool cond, const std::string& what) {
        if (cond) return;
        ok = false;
        if (problems.size() < 5) problems.push_back(what);
    }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1fs", s);
    return buf;
}

// All frames over R with exactly n points.
std::vector<Frame> frames_of_size(int n) {
    std::vector<Frame> out;
    const unsigned long masks = 1UL << (n * n);
    out.reserve(masks);
    for (unsigned long mask = 0; mask < masks; ++mask) {
        Frame f(n);
        f.declare(R);
        for (int k = 0; k < n * n; ++k)
            if (mask >> k & 1UL) f.add_edge(R, k / n, k % n);
        out.push_back(std::move(f));
    }
    return out;
}

bool refuted_on_some(const std::vector<Frame>& frames, const Implication& i) {
    return std::any_of(frames.begin(), frames.end(), [&](const Frame& f) { return !frame_validates(f, i); });
}

// Random implication whose antecedent tree has at most max_tree points.
Implication small_implication(Rng& rng, const FormulaShape& shape, int max_tree) {
    for (;;) {
        auto i = random_implication(rng, shape);
        if (i.lhs.tree_size() <= max_tree) return i;
    }
}

// ---------------------------------------------------------------------------

Outcome fixture_suite() {
    Outcome o;
    auto t0 = Clock::now();
    auto reports = verify_all();
    double took = seconds_since(t0);
    int claims = 0, bounded = 0;
    for (auto& r : reports) {
        o.expect(r.ok(), r.name + (r.error.empty() ? "" : ": " + r.error));
        for (auto& c : r.results) {
            ++claims;
            bounded += c.bounded;
            o.expect(c.ok, r.name + ": " + c.claim + " (" + c.detail + ")");
        }
    }
    o.expect(reports.size() >= 18, "only " + std::to_string(reports.size()) + " entries");
    o.expect(took < 30.0, "took " + fmt_seconds(took));

    // the two headline examples, stated directly
    auto ex = verify_fixture("ex-3.1");
    o.expect(ex.ok() && ex.results.size() == 2, "ex-3.1 claims");
    auto f6 = fixture("fig6a");
    FixtureEntry probe = f6;
    probe.claims = {"validates @eucl", "refutes <><>p & <>q => <>(q & <>p)"};
    o.expect(verify_entry(probe).ok(), "fig6a euclidean claims");

    o.detail = std::to_string(reports.size()) + " entries, " + std::to_string(claims) + " claims (" +
               std::to_string(bounded) + " bounded), " + fmt_seconds(took);
    return o;
}

Outcome correspondence() {
    Outcome o;
    Rng rng(1901);
    FormulaShape shape;
    shape.max_depth = 3;
    shape.vars = 3;
    int refuted = 0;
    for (int k = 0; k < 500; ++k) {
        int n = 1 + static_cast<int>(rng() % 4);
        auto fr = random_frame(rng, n, {R}, 0.4);
        auto i = random_implication(rng, shape);
        bool want = frame_validates(fr, i);
        refuted += !want;
        o.expect(eval_fo(fr, correspondent(i)) == want, i.str());
    }
    o.expect(refuted > 50 && refuted < 450, "degenerate sample: " + std::to_string(refuted) + " refuted");
    o.detail = "500 pairs, " + std::to_string(refuted) + " frames refute";
    return o;
}

// Tree profile over R on 1 to 3 points with a random missing edge.
Profile random_tree_profile(Rng& rng) {
    for (;;) {
        int n = 1 + static_cast<int>(rng() % 3);
        Profile p;
        p.g = Frame(n);
        p.g.declare(R);
        for (int k = 1; k < n; ++k) p.g.add_edge(R, static_cast<int>(rng() % k), k);
        p.s = R;
        p.u = static_cast<int>(rng() % n);
        p.v = static_cast<int>(rng() % n);
        if (!p.g.edge(R, p.u, p.v)) return p;
    }
}

bool edges_within(const Frame& a, const Frame& b) {
    for (auto [x, y] : a.edges(R))
        if (!b.edge(R, x, y)) return false;
    return true;
}

Outcome horn_decider() {
    Outcome o;
    Rng rng(1903);
    FormulaShape shape;
    shape.max_depth = 2;
    shape.vars = 2;
    shape.max_width = 2;
    std::vector<Frame> all;
    for (int n = 1; n <= 4; ++n) {
        auto more = frames_of_size(n);
        all.insert(all.end(), more.begin(), more.end());
    }
    int cases = 0, entailed = 0, closures = 0;
    for (int s = 0; s < 50; ++s) {
        ProfileSet pi;
        int size = 1 + static_cast<int>(rng() % 2);
        for (int k = 0; k < size; ++k) pi.push_back(random_tree_profile(rng));
        std::vector<FO> phis;
        for (auto& p : pi) phis.push_back(phi_of_profile(p));
        std::vector<Frame> models;
        for (auto& f : all)
            if (std::all_of(phis.begin(), phis.end(), [&](const FO& phi) { return eval_fo(f, phi); }))
                models.push_back(f);
        for (int k = 0; k < 10; ++k) {
            auto i = small_implication(rng, shape, 4);
            bool got = horn_entails(pi, i);
            bool want = !refuted_on_some(models, i);
            o.expect(got == want, i.str() + " over " + std::to_string(pi.size()) + " profiles");
            entailed += got;
            ++cases;

            // closure laws on the antecedent tree and on a random frame
            for (const Frame& f : {tree_model(i.lhs).model.frame, random_frame(rng, 4, {R}, 0.25)}) {
                Frame c = closure(pi, f);
                o.expect(edges_within(f, c), "closure not extensive");
                o.expect(closure(pi, c) == c, "closure not idempotent");
                for (unsigned seed = 1; seed <= 3; ++seed) o.expect(closure(pi, f, seed) == c, "order dependent");
                Frame g = f;
                g.add_edge(R, static_cast<int>(rng() % f.size()), static_cast<int>(rng() % f.size()));
                o.expect(edges_within(c, closure(pi, g)), "closure not monotone");
                ++closures;
            }
        }
    }
    o.detail = std::to_string(cases) + " cases (" + std::to_string(entailed) + " entailed), " +
               std::to_string(closures) + " closures";
    return o;
}

// Equivalence frames on at most max_points points with clusters of size <= n.
std::vector<Frame> equivalence_frames(int n, int max_points) {
    std::vector<Frame> out;
    std::vector<int> parts;
    std::function<void(int, int)> rec = [&](int left, int largest) {
        if (!parts.empty()) {
            Frame f(std::accumulate(parts.begin(), parts.end(), 0));
            f.declare(R);
            int off = 0;
            for (int c : parts) {
                for (int a = 0; a < c; ++a)
                    for (int b = 0; b < c; ++b) f.add_edge(R, off + a, off + b);
                off += c;
            }
            out.push_back(f);
        }
        for (int c = 1; c <= std::min(largest, left); ++c) {
            parts.push_back(c);
            rec(left - c, c);
            parts.pop_back();
        }
    };
    rec(max_points, n);
    return out;
}

// Linear quasiorders up to max_points points, one per composition.
std::vector<Frame> linear_quasiorders(int max_points) {
    std::vector<Frame> out;
    for (int m = 1; m <= max_points; ++m)
        for (unsigned cuts = 0; cuts < (1U << (m - 1)); ++cuts) {
            std::vector<int> cluster(m, 0);
            for (int k = 1; k < m; ++k) cluster[k] = cluster[k - 1] + ((cuts >> (k - 1)) & 1U);
            Frame f(m);
            f.declare(R);
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b)
                    if (cluster[a] <= cluster[b]) f.add_edge(R, a, b);
            out.push_back(f);
        }
    return out;
}

// Rooted trees up to max_points points with out-degree at most n.
std::vector<Frame> functional_trees(int n, int max_points) {
    std::vector<Frame> out;
    for (auto& t : labelled_trees(max_points, {R})) {
        bool ok = true;
        for (int x = 0; x < t.size(); ++x) ok = ok && popcount(t.succ(R, x)) <= n;
        if (ok) out.push_back(t);
    }
    return out;
}

Outcome normal_form_deciders() {
    Outcome o;
    Rng rng(1907);
    FormulaShape shape;
    shape.max_depth = 3;
    shape.vars = 3;
    std::ostringstream info;
    auto run = [&](const std::string& name, const std::vector<Frame>& frames, int max_tree,
                   const std::function<bool(const Implication&)>& decide) {
        int negatives = 0;
        for (int k = 0; k < 300; ++k) {
            auto i = small_implication(rng, shape, max_tree);
            bool got = decide(i);
            o.expect(got == !refuted_on_some(frames, i), name + ": " + i.str());
            negatives += !got;
        }
        o.expect(negatives >= 30, name + ": only " + std::to_string(negatives) + " non-entailed cases");
        info << name << " " << negatives << "/300 refuted; ";
    };
    run("lin", linear_quasiorders(5), 5, [](const Implication& i) { return decide_lin(i); });
    for (int n : {2, 3})
        run("equiv" + std::to_string(n), equivalence_frames(n, 6), 6,
            [n](const Implication& i) { return decide_equiv_n(i, n); });
    for (int n : {1, 2, 3})
        run("fun" + std::to_string(n), functional_trees(n, 5), 5,
            [n](const Implication& i) { return decide_fun_n(i, n); });
    o.detail = info.str();
    o.detail.resize(o.detail.size() - 2);
    return o;
}

Outcome normal_form_equivalence() {
    Outcome o;
    struct Case {
        std::string name;
        NfTheory theory;
        int n;
        std::vector<Implication> axioms;
    };
    std::vector<Case> cases = {
        {"fun1", NfTheory::FunN, 1, gen_axiom(AxiomFamily::FunN, 1)},
        {"fun2", NfTheory::FunN, 2, gen_axiom(AxiomFamily::FunN, 2)},
        {"fun3", NfTheory::FunN, 3, gen_axiom(AxiomFamily::FunN, 3)},
        {"equiv2", NfTheory::EquivN, 2, gen_axiom(AxiomFamily::EquivNTheory, 2)},
        {"equiv3", NfTheory::EquivN, 3, gen_axiom(AxiomFamily::EquivNTheory, 3)},
        {"lin", NfTheory::Lin, 0, gen_axiom(AxiomFamily::LinTheory, 1)},
    };
    Rng rng(1909);
    FormulaShape shape;
    shape.max_depth = 3;
    shape.vars = 3;
    long evaluations = 0;
    std::ostringstream info;
    for (auto& c : cases) {
        std::vector<FiniteSLO> pool;
        for_each_slo(5, {R}, false, [&](const FiniteSLO& a) {
            if (slo_validates(a, c.axioms)) pool.push_back(a);
            return true;
        });
        o.expect(pool.size() >= 3, c.name + ": pool too small");
        info << c.name << " " << pool.size() << " algebras; ";
        for (int k = 0; k < 30; ++k) {
            Formula rho = random_formula(rng, shape);
            Formula nf = normal_forms(rho, c.theory, c.n).conj();
            for (auto& a : pool)
                for (int v = 0; v < 20; ++v) {
                    SloValuation val;
                    for (int x = 0; x < 3; ++x) val[nth_var(x)] = static_cast<int>(rng() % a.size());
                    o.expect(eval_term(a, rho, val) == eval_term(a, nf, val), c.name + ": " + rho.str());
                    ++evaluations;
                }
        }
    }
    o.detail = info.str() + std::to_string(evaluations) + " evaluations";
    return o;
}

Outcome embedding_recipes() {
    Outcome o;
    const Sym S = intern("S");
    std::map<Recipe, int> used;
    auto run = [&](Recipe r, const std::vector<Sym>& rels, int max_n, RecipeOptions opt) {
        auto pre = recipe_precondition(r, rels, opt);
        auto guarantee = recipe_guarantee(r, rels, opt);
        for_each_slo(max_n, rels, false, [&](const FiniteSLO& a) {
            if (!slo_validates(a, pre)) return true;
            auto e = embed(a, r, opt);
            o.expect(verify_embedding(e), recipe_name(r) + ": " + embedding_defect(e));
            o.expect(eval_fo(e.target, guarantee), recipe_name(r) + ": guarantee fails");
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
    int total = 0;
    std::ostringstream info;
    for (Recipe r : all_recipes()) {
        o.expect(used[r] > 0, recipe_name(r) + " never applied");
        total += used[r];
        info << recipe_name(r) << " " << used[r] << ", ";
    }
    o.expect(total >= 100, "only " + std::to_string(total) + " algebras");
    o.detail = std::to_string(total) + " embeddings (" + info.str();
    o.detail.resize(o.detail.size() - 2);
    o.detail += ")";
    return o;
}

Outcome calculus() {
    Outcome o;
    auto I = [](const char* s) { return parse_implication(s); };
    const Implication trans = I("<><>p => <>p"), eucl = I("<>p & <>q => <>(p & <>q)");

    std::vector<Implication> small{I("<>p => <>q")};
    auto one = prove_bounded(small, trans, 3);
    o.expect(one && one->size() == 1 && check_derivation(small, *one, trans), "one-step transitivity");

    std::vector<Implication> rf{I("p => <>p"), I("<>p & <>q => <>(p & q)")};
    auto d = prove_bounded(rf, eucl, 6);
    o.expect(d && check_derivation(rf, *d, eucl), "euclidean from reflexive and functional");
    if (!d) return o;

    // fuzzing: every edit that changes a step's meaning must be rejected
    auto base = step_conclusions(rf, *d);
    Rng rng(1913);
    int rejected = 0, tried = 0;
    while (tried < 100) {
        Derivation c = *d;
        std::size_t at = rng() % c.size();
        Step& s = c[at];
        switch (rng() % 6) {
        case 0: s.i = static_cast<int>(rng() % c.size()); break;
        case 1: s.j = static_cast<int>(rng() % c.size()); break;
        case 2:
            if (s.subst.empty()) continue;
            std::next(s.subst.begin(), static_cast<long>(rng() % s.subst.size()))->second = parse_formula("<>z");
            break;
        case 3: s.kind = static_cast<StepKind>(rng() % 5); break;
        case 4: s.premise = static_cast<int>(rng() % 3); break;
        default: s.rel = intern("Z"); break;
        }
        bool same = false;
        try {
            auto cs = step_conclusions(rf, c);
            same = cs[at].has_value() && base[at].has_value() && *cs[at] == *base[at];
        } catch (const DerivationError&) {
        }
        if (same) continue;
        ++tried;
        bool accepted = false;
        try {
            accepted = check_derivation(rf, c, eucl);
        } catch (const DerivationError&) {
        }
        rejected += !accepted;
    }
    o.expect(rejected == 100, std::to_string(100 - rejected) + " corrupted derivations accepted");

    // soundness: whatever a derivation concludes holds in every pool algebra of its premises
    std::vector<FiniteSLO> pool;
    for_each_slo(4, {R}, false, [&](const FiniteSLO& a) {
        pool.push_back(a);
        return true;
    });
    FormulaShape shape;
    shape.max_depth = 2;
    shape.vars = 2;
    shape.max_width = 2;
    int found = 0;
    for (int k = 0; k < 60; ++k) {
        std::vector<Implication> sigma{random_implication(rng, shape)};
        auto target = random_implication(rng, shape);
        auto p = prove_bounded(sigma, target, 4);
        if (!p) continue;
        ++found;
        o.expect(check_derivation(sigma, *p, target), "search result does not check");
        for (auto& a : pool)
            if (slo_validates(a, sigma)) o.expect(slo_validates(a, target), "unsound: " + target.str());
    }
    o.expect(found >= 10, "soundness sample too small");
    o.detail = std::to_string(d->size()) + "-step euclidean derivation, " + std::to_string(rejected) +
               "/100 corruptions rejected, " + std::to_string(found) + " derivations checked on " +
               std::to_string(pool.size()) + " algebras";
    return o;
}

Outcome tm_reduction() {
    Outcome o;
    auto t0 = Clock::now();
    auto loop = parse_tm("states: q0 q1 qh; blank: b; delta: q0 b -> q1 b R; q1 b -> q1 b R");
    auto grid = grid_frame(loop, 3, 4);
    auto rep = verify_grid(loop, grid, 3, 4);
    o.expect(rep.ok(), rep.ok() ? "" : "grid failure: " + rep.failures.front());

    auto halt = parse_tm("states: q0 qh; blank: b; delta: q0 b -> qh b R");
    auto hr = verify_grid(halt, grid_frame(halt, 3, 3), 3, 3);
    bool flagged = std::any_of(hr.failures.begin(), hr.failures.end(),
                               [](const std::string& f) { return f.find("no-halt") != std::string::npos; });
    o.expect(flagged, "halting machine not flagged");

    auto sub = subalgebra_check(loop, 3, 3);
    o.expect(sub.validates_trigger, "subalgebra refutes the trigger");
    o.expect(sub.refutes_probe, "subalgebra validates the probe");
    auto p = sub.witness.find(intern("p"));
    o.expect(p != sub.witness.end() && sub.algebra.sets()[p->second] == bit(grid_frame(loop, 3, 3).d(0, 0)),
             "witness is not p = {d00}");
    double took = seconds_since(t0);
    o.expect(took < 60.0, "took " + fmt_seconds(took));
    o.detail = std::to_string(rep.axiom_checks) + " grid checks, " + std::to_string(sub.algebra.size()) +
               "-element subalgebra, " + fmt_seconds(took);
    return o;
}

Outcome definability() {
    Outcome o;
    int claims = 0;
    for (const char* name : {"sim-pseudo", "sim-weak", "sim-confluent", "sim-mckinsey"}) {
        auto e = fixture(name);
        bool has_consequence = false;
        for (auto& c : e.claims) has_consequence = has_consequence || c == "consequence 100";
        o.expect(has_consequence, std::string(name) + " lacks the consequence check");
        auto r = verify_entry(e);
        o.expect(r.ok(), std::string(name) + ": " + r.error);
        for (auto& c : r.results) o.expect(c.ok, std::string(name) + ": " + c.claim);
        claims += static_cast<int>(r.results.size());
    }
    o.detail = "4 witnesses, " + std::to_string(claims) + " claims";
    return o;
}

Outcome determinism(double elapsed) {
    Outcome o;
    auto render = [] {
        std::ostringstream out;
        for (auto& r : verify_all()) {
            out << r.name;
            for (auto& c : r.results) out << "|" << c.ok << c.detail;
            out << "\n";
        }
        auto v = brute_force_kr({}, parse_implication("<><>p => <>p"), 3);
        out << render_model(v.countermodel->model);
        auto s = brute_force_slo({}, parse_implication("<>p => p"), 3);
        out << render_slo(*s.algebra);
        return out.str();
    };
    auto t0 = Clock::now();
    bool same = render() == render();
    o.expect(same, "two runs disagree");
    double total = elapsed + seconds_since(t0);
    o.expect(total < 600.0, "suite took " + fmt_seconds(total));
    o.detail = "repeat runs identical, acceptance wall-clock " + fmt_seconds(total);
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    auto t0 = Clock::now();
    std::vector<Criterion> criteria = {
        {1, "fixture catalogue", fixture_suite},
        {2, "correspondence", correspondence},
        {3, "horn decider and closure", horn_decider},
        {4, "normal-form deciders", normal_form_deciders},
        {5, "normal-form equivalence", normal_form_equivalence},
        {6, "embedding recipes", embedding_recipes},
        {7, "calculus", calculus},
        {8, "TM reduction", tm_reduction},
        {9, "definability witnesses", definability},
        {10, "runtime and determinism", [&] { return determinism(seconds_since(t0)); }},
    };
    int failed = 0;
    for (auto& c : criteria) {
        auto start = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.problems.push_back(std::string("exception: ") + e.what());
        }
        failed += !o.ok;
        std::printf("criterion %d %s: %s [%s] %s\n", c.id, c.title, o.ok ? "PASS" : "FAIL",
                    fmt_seconds(seconds_since(start)).c_str(), o.detail.c_str());
        for (auto& p : o.problems) std::printf("    %s\n", p.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
