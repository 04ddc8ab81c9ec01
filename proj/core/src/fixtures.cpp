#include "spikit/fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <future>
#include <optional>
#include <set>
#include <sstream>

#include "spikit/calculus.hpp"
#include "spikit/deciders.hpp"
#include "spikit/defsim.hpp"
#include "spikit/error.hpp"
#include "spikit/horn.hpp"
#include "spikit/random.hpp"
#include "spikit/text.hpp"

#ifndef SPIKIT_DEFAULT_FIXTURE_DIR
#define SPIKIT_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace spikit {

namespace fs = std::filesystem;

std::string fixture_kind_name(FixtureKind k) {
    switch (k) {
    case FixtureKind::Theory: return "theory";
    case FixtureKind::SloCounterexample: return "slo_counterexample";
    case FixtureKind::Frame: return "frame";
    case FixtureKind::Profile: return "profile";
    case FixtureKind::Simulation: return "simulation";
    }
    return "?";
}

namespace {

FixtureKind kind_from_name(const std::string& s, std::size_t at) {
    for (auto k : {FixtureKind::Theory, FixtureKind::SloCounterexample, FixtureKind::Frame, FixtureKind::Profile,
                   FixtureKind::Simulation})
        if (fixture_kind_name(k) == s) return k;
    throw ParseError("unknown fixture kind '" + s + "'", at);
}

} // namespace

// ---------------------------------------------------------------------------
// Text form

FixtureEntry parse_fixture(const std::string& src) {
    FixtureEntry e;
    enum class Block { None, Payload, Claims } block = Block::None;
    std::vector<std::string> payload;
    std::size_t offset = 0;
    bool have_kind = false;
    std::istringstream in(src);
    for (std::string line; std::getline(in, line);) {
        std::size_t here = offset;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        offset += line.size() + 1;
        if (text::trim(line).empty()) continue;
        if (line[0] == ' ' || line[0] == '\t') {
            std::string body(text::trim(line));
            if (block == Block::Payload) {
                payload.push_back(body);
            } else if (block == Block::Claims) {
                e.claims.push_back(body);
            } else {
                throw ParseError("indented line outside payload or claims", here);
            }
            continue;
        }
        auto [key, value] = text::key_value(line);
        std::string v(text::trim(value));
        block = Block::None;
        if (key == "name") {
            e.name = v;
        } else if (key == "kind") {
            e.kind = kind_from_name(v, here);
            have_kind = true;
        } else if (key == "about") {
            e.about = v;
        } else if (key == "theory") {
            e.theory = v;
        } else if (key == "payload") {
            block = Block::Payload;
        } else if (key == "claims") {
            block = Block::Claims;
        } else {
            throw ParseError("unknown fixture key '" + key + "'", here);
        }
    }
    if (e.name.empty()) throw ParseError("fixture without a name", 0);
    if (!have_kind) throw ParseError("fixture without a kind", 0);
    e.payload = text::join(payload, "\n");
    if (!e.payload.empty()) e.payload += "\n";
    return e;
}

std::string render_fixture(const FixtureEntry& e) {
    std::string out = "name: " + e.name + "\nkind: " + fixture_kind_name(e.kind) + "\n";
    if (!e.about.empty()) out += "about: " + e.about + "\n";
    if (!e.theory.empty()) out += "theory: " + e.theory + "\n";
    out += "payload:\n";
    for (auto& l : text::lines(e.payload))
        if (!l.empty()) out += "  " + l + "\n";
    out += "claims:\n";
    for (auto& c : e.claims) out += "  " + c + "\n";
    return out;
}

std::string fixture_dir() {
    if (const char* env = std::getenv("SPIKIT_FIXTURE_DIR"); env && *env) return env;
    return SPIKIT_DEFAULT_FIXTURE_DIR;
}

FixtureEntry fixture(const std::string& name, const std::string& dir) {
    fs::path path = fs::path(dir) / (name + ".fix");
    if (name.empty() || name.find('/') != std::string::npos || !fs::is_regular_file(path))
        throw Error("unknown fixture '" + name + "'");
    auto e = parse_fixture(text::read_file(path.string()));
    if (e.name != name) throw Error("fixture file " + path.string() + " is named '" + e.name + "'");
    return e;
}

std::vector<std::string> list_fixtures(const std::string& dir) {
    std::vector<std::string> out;
    if (!fs::is_directory(dir)) throw Error("fixture directory '" + dir + "' not found");
    for (auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".fix") out.push_back(entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Theories and properties

namespace {

std::vector<Implication> parse_all(std::initializer_list<const char*> texts) {
    std::vector<Implication> out;
    for (const char* t : texts) out.push_back(parse_implication(t));
    return out;
}

int parameter(const std::string& name, const std::string& prefix) {
    std::string digits = name.substr(prefix.size());
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit))
        throw Error("bad parameter in '" + name + "'");
    int n = std::stoi(digits);
    if (n < 1) throw Error("parameter must be positive in '" + name + "'");
    return n;
}

} // namespace

std::vector<Implication> theory_preset(const std::string& name) {
    if (name == "refl") return parse_all({"p => <>p"});
    if (name == "trans") return parse_all({"<><>p => <>p"});
    if (name == "sym") return parse_all({"q & <>p => <>(p & <>q)"});
    if (name == "eucl") return parse_all({"<>p & <>q => <>(p & <>q)"});
    if (name == "dense") return parse_all({"<>p => <><>p"});
    if (name == "fun") return parse_all({"<>p & <>q => <>(p & q)"});
    if (name == "wcon") return parse_all({"<>(p & q) & <>(p & r) => <>(p & <>q & <>r)"});
    auto join = [](std::initializer_list<const char*> parts) {
        std::vector<Implication> out;
        for (const char* p : parts)
            for (auto& i : theory_preset(p)) out.push_back(i);
        return out;
    };
    if (name == "qo") return join({"refl", "trans"});
    if (name == "equiv") return join({"refl", "trans", "sym"});
    if (name == "equiv'") return join({"refl", "trans", "eucl"});
    if (name == "lin") return join({"refl", "trans", "wcon"});
    if (text::starts_with(name, "fun:")) return gen_axiom(AxiomFamily::FunN, parameter(name, "fun:"));
    if (text::starts_with(name, "equiv:")) {
        auto out = theory_preset("equiv");
        out.push_back(gen_axiom(AxiomFamily::FunN, parameter(name, "equiv:")).front());
        return out;
    }
    if (text::starts_with(name, "depth:")) return gen_axiom(AxiomFamily::DepthN, parameter(name, "depth:"));
    if (text::starts_with(name, "width:")) return gen_axiom(AxiomFamily::WidthN, parameter(name, "width:"));
    throw Error("unknown theory preset '" + name + "'");
}

std::vector<Implication> parse_theory(const std::string& src) {
    std::vector<Implication> out;
    for (auto& item : text::split(src, ";")) {
        if (item[0] == '@') {
            for (auto& i : theory_preset(item.substr(1))) out.push_back(i);
        } else {
            out.push_back(parse_implication(item));
        }
    }
    return out;
}

namespace {

const Sym kR = intern("R");

FO R(const std::string& a, const std::string& b) { return FO::atom(kR, a, b); }
FO all(std::vector<std::string> vs, FO body) { return FO::forall(std::move(vs), std::move(body)); }
FO imp(FO a, FO b) { return FO::implies(std::move(a), std::move(b)); }
FO conj(std::vector<FO> v) { return FO::conj(std::move(v)); }
FO disj(std::vector<FO> v) { return FO::disj(std::vector<FO>(std::move(v))); }

FO n_functional(int n) {
    std::vector<std::string> ys;
    std::vector<FO> steps, same;
    for (int i = 0; i <= n; ++i) {
        ys.push_back("y" + std::to_string(i));
        steps.push_back(R("x", ys.back()));
    }
    for (int i = 0; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) same.push_back(FO::eq(ys[i], ys[j]));
    ys.insert(ys.begin(), "x");
    return all(ys, imp(conj(steps), disj(same)));
}

const std::vector<std::string> kPropertyNames = {
    "reflexive",   "transitive",       "symmetric",  "euclidean", "dense",     "functional", "functional:<n>",
    "weakly-connected", "wcon",        "pseudo-transitive", "confluent", "mckinsey", "empty", "sub-identity",
    "identity",    "quasiorder",       "equivalence", "linear",   "cluster:<n>"};

} // namespace

std::vector<std::string> frame_property_names() { return kPropertyNames; }

FO frame_property(const std::string& name) {
    if (name == "reflexive") return all({"x"}, R("x", "x"));
    if (name == "transitive") return all({"x", "y", "z"}, imp(conj({R("x", "y"), R("y", "z")}), R("x", "z")));
    if (name == "symmetric") return all({"x", "y"}, imp(R("x", "y"), R("y", "x")));
    if (name == "euclidean") return all({"x", "y", "z"}, imp(conj({R("x", "y"), R("x", "z")}), R("y", "z")));
    if (name == "dense")
        return all({"x", "y"}, imp(R("x", "y"), FO::exists({"z"}, conj({R("x", "z"), R("z", "y")}))));
    if (name == "functional") return n_functional(1);
    if (text::starts_with(name, "functional:")) return n_functional(parameter(name, "functional:"));
    if (name == "weakly-connected")
        return all({"x", "y", "z"}, imp(conj({R("x", "y"), R("x", "z")}),
                                        disj({R("y", "z"), R("z", "y"), FO::eq("y", "z")})));
    if (name == "wcon")
        return all({"x", "y", "z"}, imp(conj({R("x", "y"), R("x", "z")}),
                                        disj({conj({R("y", "y"), R("y", "z")}), conj({R("z", "z"), R("z", "y")})})));
    if (name == "pseudo-transitive")
        return all({"x", "y", "z"}, imp(conj({R("x", "y"), R("y", "z")}), disj({R("x", "z"), FO::eq("x", "z")})));
    if (name == "confluent")
        return all({"x", "y", "z"},
                   imp(conj({R("x", "y"), R("x", "z")}), FO::exists({"u"}, conj({R("y", "u"), R("z", "u")}))));
    if (name == "mckinsey")
        return all({"x"}, FO::exists({"y"}, conj({R("x", "y"), all({"z"}, imp(R("y", "z"), FO::eq("y", "z")))})));
    if (name == "empty") return all({"x", "y"}, imp(R("x", "y"), FO::falsum()));
    if (name == "sub-identity") return all({"x", "y"}, imp(R("x", "y"), FO::eq("x", "y")));
    if (name == "identity")
        return all({"x", "y"}, conj({imp(R("x", "y"), FO::eq("x", "y")), imp(FO::eq("x", "y"), R("x", "y"))}));
    if (name == "quasiorder") return conj({frame_property("reflexive"), frame_property("transitive")});
    if (name == "equivalence") return conj({frame_property("quasiorder"), frame_property("symmetric")});
    if (name == "linear") return conj({frame_property("quasiorder"), frame_property("wcon")});
    if (text::starts_with(name, "cluster:"))
        return conj({frame_property("equivalence"), n_functional(parameter(name, "cluster:"))});
    throw Error("unknown frame property '" + name + "'");
}

// ---------------------------------------------------------------------------
// Parametric algebras

FiniteSLO alt_fun_algebra(int n) {
    if (n < 1) throw PreconditionError("alt_fun_algebra needs n >= 1");
    std::string els = "g", order, dia = "g->g";
    for (int i = 0; i <= n; ++i) {
        std::string a = "a" + std::to_string(i);
        els += " " + a;
        order += (i ? ", " : "") + ("g<" + a) + ", " + a + "<top";
        dia += ", " + a + "->top";
    }
    return parse_slo("elements: " + els + " top\ntop: top\norder: " + order + "\ndia R: " + dia + ", top->top\n");
}

FiniteSLO depth_algebra(int n) {
    if (n < 1) throw PreconditionError("depth_algebra needs n >= 1");
    auto nm = [](char c, int k) { return std::string(1, c) + std::to_string(k); };
    std::vector<std::string> els{"g", "d0", "e0"}, order{"g<d0", "g<e0", "d0<a0", "e0<a0"}, dia{"g->g", "d0->d0", "e0->e0"};
    for (int k = 0; k < n; ++k) {
        std::string up = k + 1 < n ? nm('a', k + 1) : "top";
        for (char c : {'a', 'b', 'c'}) {
            els.push_back(nm(c, k));
            dia.push_back(nm(c, k) + "->" + nm(c, k));
        }
        for (char c : {'b', 'c'}) {
            order.push_back(nm('a', k) + "<" + nm(c, k));
            order.push_back(nm(c, k) + "<" + up);
        }
    }
    for (int k = 1; k <= n; ++k) {
        for (auto [side, above] : {std::pair{'d', 'b'}, std::pair{'e', 'c'}}) {
            els.push_back(nm(side, k));
            order.push_back(nm(side, k - 1) + "<" + nm(side, k));
            order.push_back(nm(side, k) + "<" + nm(above, k - 1));
            dia.push_back(nm(side, k) + "->" + nm(above, k - 1));
        }
    }
    els.push_back("top");
    dia.push_back("top->top");
    return parse_slo("elements: " + text::join(els, " ") + "\ntop: top\norder: " + text::join(order, ", ") +
                     "\ndia R: " + text::join(dia, ", ") + "\n");
}

// ---------------------------------------------------------------------------
// Embedding search

namespace {

// Every quantifier is universal once negations are pushed inwards.
bool is_universal(const FO& f, bool positive = true) {
    switch (f.op) {
    case FO::Op::Forall: return positive && is_universal(f.kids[0], positive);
    case FO::Op::Exists: return !positive && is_universal(f.kids[0], positive);
    case FO::Op::Implies: return is_universal(f.kids[0], !positive) && is_universal(f.kids[1], positive);
    case FO::Op::And:
    case FO::Op::Or:
        return std::all_of(f.kids.begin(), f.kids.end(), [&](const FO& k) { return is_universal(k, positive); });
    default: return true;
    }
}

Frame induced_prefix(const Frame& fr, int k) {
    Frame out(k);
    for (int i = 0; i < k; ++i) out.set_name(i, fr.name(i));
    for (Sym r : fr.relations()) {
        out.declare(r);
        for (int i = 0; i < k; ++i) out.set_succ(r, i, fr.succ(r, i) & full_set(k));
    }
    return out;
}

} // namespace

// An sp-embedding into a complex algebra sends a to {x | f(x) <= a} for the
// map f taking each point to the meet of the elements whose image holds it
// (filters of a finite semilattice are principal). So it is enough to range
// over point labellings f, up to permutation, and then pick successor sets
// point by point.
EmbeddingSearch search_embedding(const FiniteSLO& a, const FO& property, int max_points) {
    if (max_points < 1 || max_points > 8) throw CapError("embedding search takes 1 to 8 points");
    EmbeddingSearch res;
    res.bound = max_points;
    const bool universal = is_universal(property);
    const auto rels = a.relations();
    const int m = a.size();
    const int nr = static_cast<int>(rels.size());

    for (int n = 1; n <= max_points && !res.found; ++n) {
        std::vector<int> f(n, 0);
        std::function<void(int, int)> labels = [&](int i, int lo) {
            if (res.found) return;
            if (i < n) {
                for (int e = lo; e < m && !res.found; ++e) {
                    f[i] = e;
                    labels(i + 1, e);
                }
                return;
            }
            ++res.maps;
            std::vector<PSet> eta(m, 0);
            for (int x = 0; x < n; ++x)
                for (int e = 0; e < m; ++e)
                    if (a.leq(f[x], e)) eta[e] |= bit(x);
            std::vector<PSet> sorted = eta;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;

            // cand[x * nr + r]: successor sets of x that make <r> commute with eta
            std::vector<std::vector<PSet>> cand(static_cast<std::size_t>(n) * nr);
            for (int x = 0; x < n; ++x)
                for (int r = 0; r < nr; ++r) {
                    auto& c = cand[x * nr + r];
                    for (PSet s = 0; s <= full_set(n); ++s) {
                        bool ok = true;
                        for (int e = 0; e < m && ok; ++e)
                            ok = ((s & eta[e]) != 0) == a.leq(f[x], a.dia(rels[r], e));
                        if (ok) c.push_back(s);
                    }
                    if (c.empty()) return;
                }

            Frame fr(n);
            for (Sym r : rels) fr.declare(r);
            std::function<void(int)> assign = [&](int slot) {
                if (res.found) return;
                if (slot == n * nr) {
                    if (eval_fo(fr, property)) {
                        res.found = true;
                        res.frame = fr;
                        res.map = eta;
                    }
                    return;
                }
                int x = slot / nr, r = slot % nr;
                for (PSet s : cand[slot]) {
                    fr.set_succ(rels[r], x, s);
                    if (universal && r == nr - 1 && x + 1 < n && !eval_fo(induced_prefix(fr, x + 1), property))
                        continue;
                    assign(slot + 1);
                    if (res.found) return;
                }
                fr.set_succ(rels[r], x, 0);
            };
            assign(0);
        };
        labels(0, 0);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Verification

bool FixtureReport::ok() const {
    return error.empty() && !results.empty() &&
           std::all_of(results.begin(), results.end(), [](const ClaimResult& r) { return r.ok; });
}

int FixtureReport::passed() const {
    return static_cast<int>(std::count_if(results.begin(), results.end(), [](const ClaimResult& r) { return r.ok; }));
}

namespace {

struct Loaded {
    const FixtureEntry* entry = nullptr;
    std::string dir;
    std::vector<Implication> theory;
    std::optional<FiniteSLO> algebra;
    std::optional<Frame> frame;  // plain frame, or the frame under an admissible family
    std::optional<Profile> profile;
    std::optional<WitnessFile> witness;
};

FiniteSLO load_algebra(const std::string& payload, std::optional<Frame>& frame) {
    if (payload.find("elements:") != std::string::npos) return parse_slo(payload);
    std::vector<std::string> frame_lines;
    std::string family_text;
    for (auto& l : text::lines(payload)) {
        auto [key, value] = text::key_value(l);
        if (key == "family") {
            family_text = value;
        } else {
            frame_lines.push_back(l);
        }
    }
    if (family_text.empty()) throw Error("algebra payload needs 'elements:' or 'family:'");
    Frame fr = parse_frame(text::join(frame_lines, "\n"));
    std::vector<PSet> family;
    for (auto& tok : text::split(family_text, " \t")) family.push_back(parse_set(fr, tok));
    frame = fr;
    return slo_from_admissible(fr, family);
}

Loaded load(const FixtureEntry& e, const std::string& dir) {
    Loaded l;
    l.entry = &e;
    l.dir = dir;
    switch (e.kind) {
    case FixtureKind::Theory: {
        std::vector<std::string> items;
        for (auto& line : text::lines(e.payload))
            if (!line.empty()) items.push_back(line);
        l.theory = parse_theory(text::join(items, ";"));
        break;
    }
    case FixtureKind::SloCounterexample:
        l.algebra = load_algebra(e.payload, l.frame);
        if (auto bad = check_slo_axioms(*l.algebra); !bad.empty()) throw Error("not an SLO: " + bad.front());
        break;
    case FixtureKind::Frame: l.frame = parse_frame(e.payload); break;
    case FixtureKind::Profile: l.profile = parse_profile(e.payload); break;
    case FixtureKind::Simulation: l.witness = parse_witness(e.payload); break;
    }
    if (!e.theory.empty()) l.theory = parse_theory(e.theory);
    return l;
}

// Removes a trailing "<word> N" and returns N.
std::optional<int> take_bound(std::string& rest, const std::string& word) {
    auto parts = text::split(rest, " \t");
    if (parts.size() < 2 || parts[parts.size() - 2] != word) return std::nullopt;
    int n = std::stoi(parts.back());
    auto pos = rest.rfind(word);
    rest = std::string(text::trim(rest.substr(0, pos)));
    return n;
}

int need_bound(std::string& rest, const std::string& word) {
    auto n = take_bound(rest, word);
    if (!n || *n < 1) throw Error("claim needs '" + word + " N'");
    return *n;
}

Implication single(const std::string& s) {
    auto t = parse_theory(s);
    if (t.size() != 1) throw Error("expected one implication in '" + s + "'");
    return t.front();
}

// Every frame over R with at most n points.
template <class F>
bool all_frames(int n, F&& fn) {
    for (int k = 1; k <= n; ++k) {
        const unsigned long masks = 1UL << (k * k);
        for (unsigned long mask = 0; mask < masks; ++mask) {
            Frame fr(k);
            fr.declare(kR);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j)
                    if (mask >> (i * k + j) & 1UL) fr.add_edge(kR, i, j);
            if (!fn(fr)) return false;
        }
    }
    return true;
}

std::string show_frame(const Frame& fr) {
    std::string s = render_frame(fr);
    std::replace(s.begin(), s.end(), '\n', ' ');
    return std::string(text::trim(s));
}

FiniteSLO algebra_of(const Loaded& l) {
    if (!l.algebra) throw Error("claim needs an algebra payload");
    return *l.algebra;
}

int element_named(const Loaded& l, const std::string& v) {
    const FiniteSLO& a = *l.algebra;
    if (!v.empty() && v[0] == '{' && l.frame && !a.sets().empty()) {
        PSet s = parse_set(*l.frame, v);
        for (int i = 0; i < a.size(); ++i)
            if (a.sets()[i] == s) return i;
        throw Error("set " + v + " is not in the family");
    }
    return a.index_of(v);
}

std::vector<std::pair<Sym, std::string>> parse_assignment(const std::string& text) {
    std::vector<std::pair<Sym, std::string>> out;
    for (auto& item : text::split(text, ";")) {
        auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("expected var=value in '" + item + "'");
        out.push_back({intern(text::trim(item.substr(0, eq))), std::string(text::trim(item.substr(eq + 1)))});
    }
    return out;
}

void check_assigned(const Implication& i, const std::vector<std::pair<Sym, std::string>>& asg) {
    for (Sym v : vars_of(i)) {
        bool found = false;
        for (auto& [w, _] : asg) found = found || w == v;
        if (!found) throw Error("variable " + name_of(v) + " has no value");
    }
}

ClaimResult run_claim(const Loaded& l, const std::string& claim) {
    ClaimResult res;
    res.claim = claim;
    auto sp = claim.find(' ');
    std::string verb = claim.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : std::string(text::trim(claim.substr(sp + 1)));

    std::vector<Implication> theory = l.theory;
    if (auto pos = rest.find(" for "); pos != std::string::npos) {
        theory = parse_theory(rest.substr(pos + 5));
        rest = std::string(text::trim(rest.substr(0, pos)));
    }
    auto fail = [&](std::string why) {
        res.ok = false;
        res.detail = std::move(why);
        return res;
    };
    auto pass = [&](std::string why = {}) {
        res.ok = true;
        res.detail = std::move(why);
        return res;
    };
    const FixtureKind kind = l.entry->kind;

    if (verb == "validates") {
        for (auto& i : parse_theory(rest)) {
            bool ok = kind == FixtureKind::Frame ? frame_validates(*l.frame, i) : slo_validates(algebra_of(l), i);
            if (!ok) return fail("fails " + i.str());
        }
        return pass();
    }
    if (verb == "refutes") {
        std::string at;
        if (auto pos = rest.find(" at "); pos != std::string::npos) {
            at = rest.substr(pos + 4);
            rest = std::string(text::trim(rest.substr(0, pos)));
        }
        Implication i = single(rest);
        if (kind == FixtureKind::Frame) {
            if (at.empty()) return frame_validates(*l.frame, i) ? fail("holds on the frame") : pass();
            auto asg = parse_assignment(at);
            check_assigned(i, asg);
            KripkeModel m{*l.frame, {}};
            for (auto& [v, s] : asg) m.val[v] = parse_set(*l.frame, s);
            return model_validates(m, i) ? fail("holds under the valuation") : pass();
        }
        FiniteSLO a = algebra_of(l);
        if (at.empty()) {
            auto r = slo_refutation(a, i);
            return r ? pass() : fail("no refuting valuation");
        }
        auto asg = parse_assignment(at);
        check_assigned(i, asg);
        SloValuation v;
        for (auto& [var, s] : asg) v[var] = element_named(l, s);
        int lhs = eval_term(a, i.lhs, v), rhs = eval_term(a, i.rhs, v);
        if (a.leq(lhs, rhs)) return fail("lhs " + a.name(lhs) + " is below rhs " + a.name(rhs));
        return pass("lhs " + a.name(lhs) + ", rhs " + a.name(rhs));
    }
    if (verb == "slo-axioms") {
        auto bad = check_slo_axioms(algebra_of(l));
        return bad.empty() ? pass() : fail(bad.front());
    }
    if (verb == "isomorphic") {
        FixtureEntry other = fixture(rest, l.dir);
        Loaded lo = load(other, l.dir);
        return slo_isomorphic(algebra_of(l), algebra_of(lo)) ? pass() : fail("not isomorphic to " + rest);
    }
    if (verb == "kr-entails") {
        int n = need_bound(rest, "points");
        res.bounded = true;
        Implication i = single(rest);
        auto v = brute_force_kr(theory, i, n);
        if (!v.holds) return fail("countermodel with " + std::to_string(v.countermodel->model.frame.size()) + " points");
        return pass("frames up to " + std::to_string(n) + " points");
    }
    if (verb == "slo-entails") {
        int n = need_bound(rest, "elements");
        res.bounded = true;
        for (auto& i : parse_theory(rest)) {
            auto v = brute_force_slo(theory, i, n);
            if (!v.holds) return fail("algebra refutes " + i.str());
        }
        return pass("algebras up to " + std::to_string(n) + " elements");
    }
    if (verb == "equals") {
        auto lhs = theory, rhs = parse_theory(rest);
        std::sort(lhs.begin(), lhs.end());
        std::sort(rhs.begin(), rhs.end());
        lhs.erase(std::unique(lhs.begin(), lhs.end()), lhs.end());
        rhs.erase(std::unique(rhs.begin(), rhs.end()), rhs.end());
        return lhs == rhs ? pass() : fail("theories differ");
    }
    if (verb == "derives") {
        int depth = need_bound(rest, "depth");
        res.bounded = true;
        Implication i = single(rest);
        auto d = prove_bounded(theory, i, depth);
        if (!d || !check_derivation(theory, *d, i)) return fail("no derivation within depth " + std::to_string(depth));
        return pass(std::to_string(d->size()) + " steps");
    }
    if (verb == "defines") {
        int n = need_bound(rest, "points");
        res.bounded = true;
        FO prop = frame_property(rest);
        std::optional<FO> phi;
        if (kind == FixtureKind::Profile) phi = phi_of_profile(*l.profile);
        std::string bad;
        all_frames(n, [&](const Frame& fr) {
            bool lhs = true;
            if (phi) {
                lhs = eval_fo(fr, *phi);
            } else {
                for (auto& i : theory) lhs = lhs && frame_validates(fr, i);
            }
            if (lhs == eval_fo(fr, prop)) return true;
            bad = show_frame(fr);
            return false;
        });
        if (!bad.empty()) return fail("disagree on " + bad);
        return pass("frames up to " + std::to_string(n) + " points");
    }
    if (verb == "has" || verb == "lacks") {
        bool holds = eval_fo(*l.frame, frame_property(rest));
        return holds == (verb == "has") ? pass() : fail(verb == "has" ? "property fails" : "property holds");
    }
    if (verb == "no-embedding") {
        int n = need_bound(rest, "points");
        res.bounded = true;
        FiniteSLO a = algebra_of(l);
        FO prop = frame_property(rest);
        int applicable = 0;
        for (Recipe r : all_recipes()) {
            try {
                Embedding e = embed(a, r);
                ++applicable;
                if (eval_fo(e.target, prop)) return fail("recipe " + recipe_name(r) + " reaches a " + rest + " frame");
            } catch (const Error&) {
                // the recipe does not apply to this algebra
            }
        }
        auto s = search_embedding(a, prop, n);
        if (s.found) return fail("embeds into " + show_frame(s.frame));
        return pass(std::to_string(applicable) + " recipes apply, none reach it; " + std::to_string(s.maps) +
                    " labellings up to " + std::to_string(n) + " points");
    }
    if (verb == "witness") return verify_witness_file(*l.witness) ? pass() : fail("witness does not verify");
    if (verb == "sources-have") {
        FO prop = frame_property(rest);
        for (std::size_t k = 0; k < l.witness->witness.sources.size(); ++k)
            if (!eval_fo(l.witness->witness.sources[k], prop)) return fail(l.witness->source_names[k] + " lacks it");
        return pass();
    }
    if (verb == "target-lacks")
        return eval_fo(l.witness->witness.target, frame_property(rest)) ? fail("target has it") : pass();
    if (verb == "search") {
        int bound = std::stoi(rest);
        res.bounded = true;
        auto s = search_witness(l.witness->witness.sources, l.witness->witness.target, bound);
        if (!s.ok()) return fail("no witness for a tree of " + std::to_string(s.failure->tree.size()) + " points");
        return pass(std::to_string(s.trees) + " trees, " + std::to_string(s.homs) + " maps");
    }
    if (verb == "consequence") {
        int samples = std::stoi(rest);
        res.bounded = true;
        Rng rng(0x5eed + samples);
        FormulaShape shape;
        shape.max_depth = 2;
        shape.vars = 2;
        shape.max_width = 2;
        int shared = 0;
        for (int k = 0; k < samples; ++k) {
            auto i = random_implication(rng, shape);
            bool sources = true;
            for (auto& f : l.witness->witness.sources) sources = sources && frame_validates(f, i);
            if (!sources) continue;
            ++shared;
            if (!frame_validates(l.witness->witness.target, i)) return fail("target refutes " + i.str());
        }
        return pass(std::to_string(shared) + " of " + std::to_string(samples) + " hold on every source");
    }
    if (kind == FixtureKind::Profile) {
        const Profile& p = *l.profile;
        auto flags = profile_flags(p);
        if (verb == "rooted") return flags.rooted ? pass() : fail("not rooted");
        if (verb == "not-rooted") return !flags.rooted ? pass() : fail("rooted");
        if (verb == "forward-looking") return flags.forward_looking ? pass() : fail("not forward-looking");
        if (verb == "leapfrog") return flags.leapfrog ? pass() : fail("not leapfrog");
        if (verb == "not-leapfrog") return !flags.leapfrog ? pass() : fail("leapfrog");
        if (verb == "stable" || verb == "unstable") {
            int n = need_bound(rest, "points");
            res.bounded = true;
            auto v = check_stability({p}, n);
            if (verb == "stable") return v.counterexample ? fail("unstable on " + show_frame(v.tree)) : pass();
            return v.counterexample ? pass("tree " + show_frame(v.tree)) : fail("no counterexample up to the bound");
        }
        if (verb == "iota" || verb == "iota-prime") {
            Implication got = verb == "iota" ? iota_of_profile(p) : iota_prime_of_profile(p);
            Implication want = single(rest);
            return got == want ? pass() : fail("got " + got.str());
        }
        if (verb == "horn-entails" || verb == "horn-refutes") {
            bool e = horn_entails({p}, single(rest));
            return e == (verb == "horn-entails") ? pass() : fail(e ? "entailed" : "not entailed");
        }
    }
    throw Error("unknown claim '" + verb + "' for a " + fixture_kind_name(kind) + " fixture");
}

} // namespace

FixtureReport verify_entry(const FixtureEntry& e, const std::string& dir) {
    FixtureReport rep;
    rep.name = e.name;
    Loaded l;
    try {
        l = load(e, dir);
    } catch (const std::exception& ex) {
        rep.error = std::string("payload: ") + ex.what();
        return rep;
    }
    for (auto& c : e.claims) {
        try {
            rep.results.push_back(run_claim(l, c));
        } catch (const std::exception& ex) {
            rep.results.push_back({c, false, false, ex.what()});
            if (rep.error.empty()) rep.error = c + ": " + ex.what();
        }
    }
    return rep;
}

FixtureReport verify_fixture(const std::string& name, const std::string& dir) {
    return verify_entry(fixture(name, dir), dir);
}

std::vector<FixtureReport> verify_all(const std::string& dir) {
    std::vector<std::future<FixtureReport>> jobs;
    for (auto& name : list_fixtures(dir))
        jobs.push_back(std::async(std::launch::async, [name, dir] { return verify_fixture(name, dir); }));
    std::vector<FixtureReport> out;
    for (auto& j : jobs) out.push_back(j.get());
    return out;
}

} // namespace spikit
