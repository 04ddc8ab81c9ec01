#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "spikit/calculus.hpp"
#include "spikit/correspond.hpp"
#include "spikit/deciders.hpp"
#include "spikit/defsim.hpp"
#include "spikit/error.hpp"
#include "spikit/fixtures.hpp"
#include "spikit/horn.hpp"
#include "spikit/kripke.hpp"
#include "spikit/slo.hpp"
#include "spikit/syntax.hpp"
#include "spikit/text.hpp"
#include "spikit/tmred.hpp"

using namespace spikit;
using json = nlohmann::ordered_json;

namespace {

enum Exit { kAnswered = 0, kRefuted = 1, kUsage = 2, kCap = 3 };

// Text and JSON views of one answer. Text lines are printed in order; the JSON
// record carries the same verdict.
struct Answer {
    std::vector<std::string> lines;
    json record = json::object();
    int code = kAnswered;

    void say(std::string line) { lines.push_back(std::move(line)); }
};

// Arguments name a file when one exists at that path, else they are the text itself.
std::string input(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) return text::read_file(arg);
    return arg;
}

int points_cap() {
    if (const char* env = std::getenv("SPIKIT_MAX_POINTS"); env && *env) {
        int n = std::atoi(env);
        if (n < 1) throw Error("SPIKIT_MAX_POINTS must be a positive integer");
        return n;
    }
    return 5;
}

void check_bound(int bound, int cap, const std::string& what) {
    if (bound < 1) throw Error(what + " bound must be positive");
    if (bound > cap)
        throw CapError(what + " bound " + std::to_string(bound) + " exceeds the cap of " + std::to_string(cap) +
                       " (raise SPIKIT_MAX_POINTS)");
}

std::string indent(const std::string& block) {
    std::string out;
    for (auto& l : text::lines(block))
        if (!l.empty()) out += "  " + l + "\n";
    return out;
}

std::string valuation_text(const FiniteSLO& a, const SloValuation& v) {
    std::vector<std::string> parts;
    for (auto& [var, e] : v) parts.push_back(name_of(var) + "=" + a.name(e));
    return text::join(parts, ", ");
}

json valuation_json(const FiniteSLO& a, const SloValuation& v) {
    json out = json::object();
    for (auto& [var, e] : v) out[name_of(var)] = a.name(e);
    return out;
}

std::string model_text(const KripkeModel& m, int world) {
    return render_model(m) + "world: " + m.frame.name(world) + "\n";
}

// ---------------------------------------------------------------------------

Answer cmd_parse(const std::string& src) {
    Answer ans;
    Implication i = parse_implication(input(src));
    auto cls = classify(i);
    ans.say(i.str());
    std::vector<std::string> tags;
    if (cls.variable_free) tags.push_back("variable-free");
    if (cls.left_variable_linear) tags.push_back("left-variable-linear");
    if (cls.bot_free) tags.push_back("bot-free");
    ans.say("class: " + (tags.empty() ? std::string("none") : text::join(tags, ", ")));
    ans.record = {{"implication", i.str()},
                  {"variable_free", cls.variable_free},
                  {"left_variable_linear", cls.left_variable_linear},
                  {"bot_free", cls.bot_free}};
    return ans;
}

// Frame classes behind each decider, used to look for a countermodel to print.
struct DecideTheory {
    std::string name;
    std::function<bool(const Implication&)> decide;
    std::function<bool(const Frame&)> frame_ok;
};

DecideTheory decide_theory(const std::string& sel) {
    auto nparam = [&](const std::string& prefix) {
        std::string digits = sel.substr(prefix.size());
        int n = digits.empty() ? 0 : std::atoi(digits.c_str());
        if (n < 1) throw Error("theory '" + sel + "' needs a positive n");
        return n;
    };
    if (sel == "none")
        return {sel, [](const Implication& i) { return kr_valid(i); }, [](const Frame&) { return true; }};
    if (sel == "lin") {
        FO p = frame_property("linear");
        return {sel, [](const Implication& i) { return decide_lin(i); }, [p](const Frame& f) { return eval_fo(f, p); }};
    }
    if (text::starts_with(sel, "fun:")) {
        int n = nparam("fun:");
        FO p = frame_property("functional:" + std::to_string(n));
        return {sel, [n](const Implication& i) { return decide_fun_n(i, n); },
                [p](const Frame& f) { return eval_fo(f, p); }};
    }
    if (text::starts_with(sel, "equiv:")) {
        int n = nparam("equiv:");
        FO p = frame_property("cluster:" + std::to_string(n));
        return {sel, [n](const Implication& i) { return decide_equiv_n(i, n); },
                [p](const Frame& f) { return eval_fo(f, p); }};
    }
    if (text::starts_with(sel, "horn:")) {
        ProfileSet pi = parse_profile_set(input(sel.substr(5)));
        std::vector<FO> phis;
        for (auto& p : pi) phis.push_back(phi_of_profile(p));
        return {sel, [pi](const Implication& i) { return horn_entails(pi, i); },
                [phis](const Frame& f) {
                    for (auto& phi : phis)
                        if (!eval_fo(f, phi)) return false;
                    return true;
                }};
    }
    throw Error("unknown theory '" + sel + "' (none, lin, fun:<n>, equiv:<n>, horn:<file>)");
}

// Smallest frame of the class, by enumeration over the implication's relations,
// on which i fails. Only a witness for printing; the verdict comes from the decider.
std::optional<Refutation> small_countermodel(const DecideTheory& th, const Implication& i, int max_points) {
    auto rels = relations_of(i);
    if (rels.empty()) rels.insert(intern("R"));
    std::vector<Sym> rs(rels.begin(), rels.end());
    for (int n = 1; n <= max_points; ++n) {
        const int slots = n * n * static_cast<int>(rs.size());
        if (slots > 20) break;
        for (unsigned long mask = 0; mask < (1UL << slots); ++mask) {
            Frame fr(n);
            for (Sym r : rs) fr.declare(r);
            for (int k = 0; k < slots; ++k)
                if (mask >> k & 1UL) {
                    int r = k / (n * n), x = (k / n) % n, y = k % n;
                    fr.add_edge(rs[r], x, y);
                }
            if (!th.frame_ok(fr)) continue;
            if (auto ref = refute_on_frame(fr, i)) return ref;
        }
    }
    return std::nullopt;
}

Answer cmd_decide(const std::string& sel, const std::string& src) {
    Answer ans;
    Implication i = parse_implication(input(src));
    DecideTheory th = decide_theory(sel);
    bool entailed = th.decide(i);
    ans.record = {{"theory", sel}, {"implication", i.str()}, {"verdict", entailed ? "entailed" : "countermodel"}};
    if (entailed) {
        ans.say("entailed");
        ans.record["witness"] = nullptr;
        return ans;
    }
    ans.say("countermodel");
    if (auto ref = small_countermodel(th, i, std::min(points_cap(), 4))) {
        std::string block = model_text(ref->model, ref->world);
        ans.say(indent(block));
        ans.record["witness"] = block;
    } else {
        ans.say("  (no countermodel within the printing bound)");
        ans.record["witness"] = nullptr;
    }
    return ans;
}

Answer cmd_closure(const std::string& profiles, const std::string& frame, unsigned seed) {
    Answer ans;
    ProfileSet pi = parse_profile_set(input(profiles));
    Frame fr = parse_frame(input(frame));
    ClosureStats stats;
    Frame out = closure(pi, fr, seed, stats);
    std::string block = render_frame(out);
    ans.say(block);
    ans.say("# added " + std::to_string(stats.added) + " edges in " + std::to_string(stats.rounds) + " rounds");
    ans.record = {{"frame", block}, {"added", stats.added}, {"rounds", stats.rounds}};
    return ans;
}

Answer cmd_correspond(const std::string& src, bool dnf) {
    Answer ans;
    Implication i = parse_implication(input(src));
    FO f = dnf ? correspondent_dnf(i) : correspondent(i);
    ans.say(f.str());
    ans.record = {{"implication", i.str()}, {"correspondent", f.str()}};
    return ans;
}

Answer cmd_slo_check(const std::string& src) {
    Answer ans;
    FiniteSLO a = parse_slo(input(src));
    auto bad = check_slo_axioms(a);
    ans.record = {{"elements", a.size()}, {"defects", bad}};
    if (bad.empty()) {
        ans.say("ok: " + std::to_string(a.size()) + " elements");
        return ans;
    }
    for (auto& b : bad) ans.say("defect: " + b);
    ans.code = kRefuted;
    return ans;
}

Answer cmd_slo_validate(const std::string& slo, const std::string& theory) {
    Answer ans;
    FiniteSLO a = parse_slo(input(slo));
    auto imps = parse_theory(input(theory));
    json results = json::array();
    for (auto& i : imps) {
        auto ref = slo_refutation(a, i);
        json r = {{"implication", i.str()}, {"valid", !ref}};
        if (ref) {
            r["valuation"] = valuation_json(a, *ref);
            ans.say("refutes " + i.str() + " at " + valuation_text(a, *ref));
            ans.code = kRefuted;
        } else {
            ans.say("validates " + i.str());
        }
        results.push_back(r);
    }
    ans.record = {{"results", results}};
    return ans;
}

Answer cmd_slo_embed(const std::string& slo, const std::string& recipe, int chain) {
    Answer ans;
    FiniteSLO a = parse_slo(input(slo));
    RecipeOptions opt;
    opt.chain = chain;
    Recipe r = recipe_from_name(recipe);
    Embedding e = embed(a, r, opt);
    std::string defect = embedding_defect(e);
    std::string frame = render_frame(e.target);
    bool guarantee = eval_fo(e.target, recipe_guarantee(r, a.relations(), opt));
    ans.say(frame);
    json map = json::object();
    for (int k = 0; k < a.size(); ++k) {
        std::string s = render_set(e.target, e.map[k]);
        ans.say("# " + a.name(k) + " -> " + s);
        map[a.name(k)] = s;
    }
    ans.say(defect.empty() ? "# embedding verifies" : "# defect: " + defect);
    ans.say(std::string("# guarantee ") + (guarantee ? "holds" : "fails"));
    ans.record = {{"recipe", recipe_name(r)}, {"frame", frame}, {"map", map}, {"verified", defect.empty()},
                  {"guarantee", guarantee}};
    if (!defect.empty() || !guarantee) ans.code = kRefuted;
    return ans;
}

Answer cmd_derive_check(const std::string& theory, const std::string& proof, const std::string& target) {
    Answer ans;
    auto sigma = parse_theory(input(theory));
    Derivation d = parse_derivation(input(proof));
    Implication t = parse_implication(input(target));
    auto concl = step_conclusions(sigma, d);
    json steps = json::array();
    for (std::size_t k = 0; k < concl.size(); ++k) {
        std::string c = concl[k] ? concl[k]->str() : "invalid";
        ans.say(std::to_string(k + 1) + ": " + c);
        steps.push_back(c);
    }
    bool ok = check_derivation(sigma, d, t);
    ans.say(ok ? "derivation checks" : "derivation rejected");
    ans.record = {{"steps", steps}, {"valid", ok}};
    if (!ok) ans.code = kRefuted;
    return ans;
}

Answer cmd_derive_search(const std::string& theory, const std::string& target, int depth) {
    Answer ans;
    auto sigma = parse_theory(input(theory));
    Implication t = parse_implication(input(target));
    auto d = prove_bounded(sigma, t, depth);
    if (!d) {
        ans.say("no derivation within depth " + std::to_string(depth));
        ans.record = {{"found", false}, {"depth", depth}};
        return ans;
    }
    std::string text = render_derivation(*d);
    ans.say(text);
    ans.record = {{"found", true}, {"depth", depth}, {"derivation", text}};
    return ans;
}

Answer cmd_tm_encode(const std::string& src) {
    Answer ans;
    TuringMachine m = parse_tm(input(src));
    json axioms = json::array();
    for (auto& a : encode_labelled(m)) {
        ans.say(a.label + ": " + a.imp.str());
        axioms.push_back({{"label", a.label}, {"implication", a.imp.str()}});
    }
    ans.record = {{"axioms", axioms}};
    return ans;
}

Answer cmd_tm_verify(const std::string& src, int rows, int cols) {
    Answer ans;
    TuringMachine m = parse_tm(input(src));
    GridModel g = grid_frame(m, rows + 1, cols + 1);
    GridReport rep = verify_grid(m, g, rows, cols);
    for (auto& f : rep.failures) ans.say("failure: " + f);
    if (rep.halt_row) ans.say("halts at row " + std::to_string(*rep.halt_row));
    ans.say((rep.ok() ? "ok: " : "failed: ") + std::to_string(rep.axiom_checks) + " axiom checks");
    ans.record = {{"ok", rep.ok()}, {"failures", rep.failures}, {"axiom_checks", rep.axiom_checks}};
    ans.record["halt_row"] = rep.halt_row ? json(*rep.halt_row) : json(nullptr);
    if (!rep.ok()) ans.code = kRefuted;
    return ans;
}

Answer cmd_sim_verify(const std::string& src) {
    Answer ans;
    WitnessFile w = parse_witness(input(src));
    bool ok = verify_witness_file(w);
    ans.say(ok ? "witness verifies" : "witness fails");
    ans.record = {{"pointwise", w.pointwise}, {"valid", ok}};
    if (!ok) ans.code = kRefuted;
    return ans;
}

Answer cmd_sim_search(const std::string& src, int bound) {
    Answer ans;
    WitnessFile w = parse_witness(input(src));
    auto res = search_witness(w.witness.sources, w.witness.target, bound);
    ans.record = {{"bound", bound}, {"trees", res.trees}, {"homs", res.homs}, {"ok", res.ok()}};
    if (res.ok()) {
        ans.say("found witnesses for " + std::to_string(res.homs) + " tree maps over " + std::to_string(res.trees) +
                " trees up to " + std::to_string(bound) + " points");
        return ans;
    }
    std::string tree = render_frame(res.failure->tree);
    ans.say("no witness for tree:");
    ans.say(indent(tree));
    ans.record["failure"] = tree;
    return ans;
}

Answer cmd_fixtures_list(const std::string& dir) {
    Answer ans;
    json entries = json::array();
    for (auto& name : list_fixtures(dir)) {
        auto e = fixture(name, dir);
        ans.say(name + "  [" + fixture_kind_name(e.kind) + "]  " + e.about);
        entries.push_back({{"name", name}, {"kind", fixture_kind_name(e.kind)}, {"about", e.about}});
    }
    ans.record = {{"fixtures", entries}};
    return ans;
}

Answer cmd_fixtures_verify(const std::vector<std::string>& names, const std::string& dir, bool verbose) {
    Answer ans;
    std::vector<FixtureReport> reports;
    if (names.empty()) {
        reports = verify_all(dir);
    } else {
        for (auto& n : names) reports.push_back(verify_fixture(n, dir));
    }
    json out = json::array();
    for (auto& r : reports) {
        std::string prefix = reports.size() > 1 ? r.name + ": " : "";
        json claims = json::array();
        for (auto& c : r.results)
            claims.push_back({{"claim", c.claim}, {"ok", c.ok}, {"bounded", c.bounded}, {"detail", c.detail}});
        out.push_back({{"name", r.name}, {"ok", r.ok()}, {"claims", claims}, {"error", r.error}});
        if (r.ok()) {
            ans.say(prefix + "ok: " + std::to_string(r.results.size()) + " claims");
        } else {
            ans.code = kRefuted;
            ans.say(prefix + "FAILED: " + std::to_string(r.passed()) + " of " + std::to_string(r.results.size()) +
                    " claims");
            if (r.results.empty() && !r.error.empty()) ans.say("  " + r.error);
        }
        for (auto& c : r.results)
            if (!c.ok || verbose)
                ans.say(std::string("  ") + (c.ok ? "ok   " : "FAIL ") + c.claim + (c.bounded ? " (bounded)" : "") +
                        (c.detail.empty() ? "" : "  -- " + c.detail));
    }
    ans.record = {{"reports", out}};
    return ans;
}

Answer cmd_oracle_kr(const std::string& theory, const std::string& src, int bound) {
    Answer ans;
    check_bound(bound, points_cap(), "frame");
    auto sigma = theory.empty() ? std::vector<Implication>{} : parse_theory(input(theory));
    Implication i = parse_implication(input(src));
    auto v = brute_force_kr(sigma, i, bound);
    ans.record = {{"verdict", v.holds ? "entailed" : "countermodel"}, {"bound", bound},
                  {"frames", v.frames_checked}};
    ans.say(v.holds ? "entailed" : "countermodel");
    if (v.holds) {
        ans.say("# on all " + std::to_string(v.frames_checked) + " frames up to " + std::to_string(bound) + " points");
        ans.record["witness"] = nullptr;
    } else {
        std::string block = model_text(v.countermodel->model, v.countermodel->world);
        ans.say(indent(block));
        ans.record["witness"] = block;
    }
    return ans;
}

Answer cmd_oracle_slo(const std::string& theory, const std::string& src, int bound) {
    Answer ans;
    check_bound(bound, std::max(points_cap(), 5), "algebra");
    auto sigma = theory.empty() ? std::vector<Implication>{} : parse_theory(input(theory));
    Implication i = parse_implication(input(src));
    auto v = brute_force_slo(sigma, i, bound);
    ans.record = {{"verdict", v.holds ? "entailed" : "countermodel"}, {"bound", bound},
                  {"algebras", v.algebras_checked}};
    ans.say(v.holds ? "entailed" : "countermodel");
    if (v.holds) {
        ans.say("# on all " + std::to_string(v.algebras_checked) + " algebras up to " + std::to_string(bound) +
                " elements");
        ans.record["witness"] = nullptr;
    } else {
        std::string block = render_slo(*v.algebra);
        ans.say(indent(block) + "  at " + valuation_text(*v.algebra, v.valuation));
        ans.record["witness"] = block;
        ans.record["valuation"] = valuation_json(*v.algebra, v.valuation);
    }
    return ans;
}

Answer cmd_probe(const std::string& theory, const ProbeOptions& opt) {
    Answer ans;
    check_bound(opt.frame_points, points_cap(), "frame");
    auto sigma = parse_theory(input(theory));
    auto found = completeness_probe(sigma, opt);
    json out = json::array();
    for (auto& w : found) {
        ans.say("gap: " + w.implication.str() + " at " + valuation_text(w.algebra, w.valuation));
        ans.say(indent(render_slo(w.algebra)));
        out.push_back({{"implication", w.implication.str()}, {"algebra", render_slo(w.algebra)},
                       {"valuation", valuation_json(w.algebra, w.valuation)}});
    }
    if (found.empty()) ans.say("no gap found within the bounds");
    ans.record = {{"gaps", out}, {"empirical", true}};
    return ans;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spikit: strictly positive implications, frames and semilattices with operators"};
    app.require_subcommand(1);
    bool as_json = false;
    app.add_flag("--json", as_json, "Print a JSON record instead of text");

    std::function<Answer()> run;
    std::string a1, a2, a3, theory, recipe, fixture_dir_opt = fixture_dir();
    int depth = 3, bound = 3, rows = 3, cols = 4, chain = 1;
    unsigned seed = 0;
    bool dnf = false, verbose = false;
    std::vector<std::string> names;
    ProbeOptions probe;

    auto* parse = app.add_subcommand("parse", "Parse an implication and print its canonical form");
    parse->add_option("implication", a1, "Implication or file")->required();
    parse->callback([&] { run = [&] { return cmd_parse(a1); }; });

    auto* decide = app.add_subcommand("decide", "Decide frame consequence over a theory");
    decide->add_option("--theory", theory, "none | lin | fun:<n> | equiv:<n> | horn:<profile file>")->required();
    decide->add_option("implication", a1, "Implication or file")->required();
    decide->callback([&] { run = [&] { return cmd_decide(theory, a1); }; });

    auto* clo = app.add_subcommand("closure", "Close a frame under a set of profiles");
    clo->add_option("--profiles", a1, "Profile set file")->required();
    clo->add_option("--frame", a2, "Frame file")->required();
    clo->add_option("--seed", seed, "Worklist order seed");
    clo->callback([&] { run = [&] { return cmd_closure(a1, a2, seed); }; });

    auto* corr = app.add_subcommand("correspond", "Print the first-order frame correspondent");
    corr->add_option("implication", a1, "Implication or file")->required();
    corr->add_flag("--dnf", dnf, "Unfold into one disjunct per antecedent choice");
    corr->callback([&] { run = [&] { return cmd_correspond(a1, dnf); }; });

    auto* slo = app.add_subcommand("slo", "Finite semilattices with operators");
    slo->require_subcommand(1);
    auto* slo_check = slo->add_subcommand("check", "Check the SLO axioms");
    slo_check->add_option("algebra", a1, "SLO file")->required();
    slo_check->callback([&] { run = [&] { return cmd_slo_check(a1); }; });
    auto* slo_val = slo->add_subcommand("validate", "Check implications in an algebra");
    slo_val->add_option("algebra", a1, "SLO file")->required();
    slo_val->add_option("theory", a2, "';'-separated implications, @presets, or a file")->required();
    slo_val->callback([&] { run = [&] { return cmd_slo_validate(a1, a2); }; });
    auto* slo_emb = slo->add_subcommand("embed", "Embed an algebra into a complex algebra");
    slo_emb->add_option("--recipe", recipe, "Recipe name")->required();
    slo_emb->add_option("--chain", chain, "n for truncated_chain")->check(CLI::PositiveNumber);
    slo_emb->add_option("algebra", a1, "SLO file")->required();
    slo_emb->callback([&] { run = [&] { return cmd_slo_embed(a1, recipe, chain); }; });

    auto* derive = app.add_subcommand("derive", "Derivations in the implication calculus");
    derive->require_subcommand(1);
    auto* dcheck = derive->add_subcommand("check", "Check a derivation");
    dcheck->add_option("--theory", theory, "Premises")->default_val("");
    dcheck->add_option("derivation", a1, "Derivation file")->required();
    dcheck->add_option("target", a2, "Implication to derive")->required();
    dcheck->callback([&] { run = [&] { return cmd_derive_check(theory, a1, a2); }; });
    auto* dsearch = derive->add_subcommand("search", "Bounded proof search");
    dsearch->add_option("--theory", theory, "Premises")->default_val("");
    dsearch->add_option("--depth", depth, "Saturation rounds")->check(CLI::PositiveNumber);
    dsearch->add_option("target", a1, "Implication to derive")->required();
    dsearch->callback([&] { run = [&] { return cmd_derive_search(theory, a1, depth); }; });

    auto* tm = app.add_subcommand("tm", "Turing machine reduction");
    tm->require_subcommand(1);
    auto* tenc = tm->add_subcommand("encode", "Print the encoded implications");
    tenc->add_option("machine", a1, "Machine file or inline text")->required();
    tenc->callback([&] { run = [&] { return cmd_tm_encode(a1); }; });
    auto* tver = tm->add_subcommand("verify", "Check the encoding on a truncated computation grid");
    tver->add_option("--rows", rows, "Interior rows")->check(CLI::PositiveNumber);
    tver->add_option("--cols", cols, "Interior columns")->check(CLI::PositiveNumber);
    tver->add_option("machine", a1, "Machine file or inline text")->required();
    tver->callback([&] { run = [&] { return cmd_tm_verify(a1, rows, cols); }; });

    auto* sim = app.add_subcommand("sim", "Simulation witnesses for non-definability");
    sim->require_subcommand(1);
    auto* sver = sim->add_subcommand("verify", "Verify a witness file");
    sver->add_option("witness", a1, "Witness file")->required();
    sver->callback([&] { run = [&] { return cmd_sim_verify(a1); }; });
    auto* ssearch = sim->add_subcommand("search", "Search witnesses for all trees up to a bound");
    ssearch->add_option("--bound", bound, "Tree points")->check(CLI::PositiveNumber);
    ssearch->add_option("witness", a1, "File with the sources and target")->required();
    ssearch->callback([&] { run = [&] { return cmd_sim_search(a1, bound); }; });

    auto* fx = app.add_subcommand("fixtures", "The fixture catalogue");
    fx->require_subcommand(1);
    fx->add_option("--dir", fixture_dir_opt, "Catalogue directory");
    auto* flist = fx->add_subcommand("list", "List entries");
    flist->callback([&] { run = [&] { return cmd_fixtures_list(fixture_dir_opt); }; });
    auto* fver = fx->add_subcommand("verify", "Verify entries (all when none are named)");
    fver->add_option("names", names, "Entry names");
    fver->add_flag("-v,--verbose", verbose, "Show every claim");
    fver->callback([&] { run = [&] { return cmd_fixtures_verify(names, fixture_dir_opt, verbose); }; });

    auto* oracle = app.add_subcommand("oracle", "Brute-force consequence oracles");
    oracle->require_subcommand(1);
    auto* okr = oracle->add_subcommand("kr", "All frames up to a number of points");
    okr->add_option("--theory", theory, "Premises")->default_val("");
    okr->add_option("--bound", bound, "Frame points");
    okr->add_option("implication", a1, "Implication")->required();
    okr->callback([&] { run = [&] { return cmd_oracle_kr(theory, a1, bound); }; });
    auto* oslo = oracle->add_subcommand("slo", "All algebras up to a number of elements");
    oslo->add_option("--theory", theory, "Premises")->default_val("");
    oslo->add_option("--bound", bound, "Algebra elements");
    oslo->add_option("implication", a1, "Implication")->required();
    oslo->callback([&] { run = [&] { return cmd_oracle_slo(theory, a1, bound); }; });

    auto* pr = app.add_subcommand("probe", "Look for frame consequences that fail algebraically");
    pr->add_option("--theory", theory, "Theory")->required();
    pr->add_option("--points", probe.frame_points, "Frame points")->check(CLI::PositiveNumber);
    pr->add_option("--elements", probe.algebra_elems, "Algebra elements")->check(CLI::PositiveNumber);
    pr->add_option("--vars", probe.vars, "Variables")->check(CLI::PositiveNumber);
    pr->add_option("--depth", probe.depth, "Formula depth")->check(CLI::PositiveNumber);
    pr->add_option("--max", probe.max_witnesses, "Witnesses to report")->check(CLI::PositiveNumber);
    pr->callback([&] { run = [&] { return cmd_probe(theory, probe); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kAnswered : kUsage;
    }

    try {
        Answer ans = run();
        if (as_json) {
            ans.record["exit"] = ans.code;
            std::cout << ans.record.dump(2) << "\n";
        } else {
            for (auto& l : ans.lines) {
                std::cout << l;
                if (l.empty() || l.back() != '\n') std::cout << "\n";
            }
        }
        return ans.code;
    } catch (const CapError& e) {
        std::cerr << "spikit: cap: " << e.what() << "\n";
        return kCap;
    } catch (const std::exception& e) {
        std::cerr << "spikit: " << e.what() << "\n";
        return kUsage;
    }
}
