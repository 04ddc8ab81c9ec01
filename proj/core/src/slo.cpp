#include "spikit/slo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "spikit/text.hpp"

namespace spikit {

// ---------------------------------------------------------------------------
// FiniteSLO

FiniteSLO::FiniteSLO(std::vector<std::string> names, std::vector<std::vector<int>> meet, int top)
    : names_(std::move(names)), meet_(std::move(meet)), top_(top) {
    const int n = size();
    if (n == 0) throw Error("an algebra needs at least one element");
    if (n > kMaxAlgebraElements)
        throw CapError("algebras are limited to " + std::to_string(kMaxAlgebraElements) + " elements");
    if (top < 0 || top >= n) throw Error("top out of range");
    if (static_cast<int>(meet_.size()) != n) throw Error("meet table has the wrong number of rows");
    for (auto& row : meet_) {
        if (static_cast<int>(row.size()) != n) throw Error("meet table row has the wrong length");
        for (int x : row)
            if (x < 0 || x >= n) throw Error("meet table entry out of range");
    }
}

int FiniteSLO::dia(Sym rel, int a) const {
    auto it = dia_.find(rel);
    if (it == dia_.end()) throw Error("algebra has no operator for relation " + name_of(rel));
    return it->second[a];
}

void FiniteSLO::set_dia(Sym rel, std::vector<int> table) {
    if (static_cast<int>(table.size()) != size()) throw Error("operator table has the wrong length");
    for (int x : table)
        if (x < 0 || x >= size()) throw Error("operator table entry out of range");
    dia_[rel] = std::move(table);
}

std::vector<Sym> FiniteSLO::relations() const {
    std::vector<Sym> out;
    for (auto& [r, t] : dia_) out.push_back(r);
    std::sort(out.begin(), out.end(), [](Sym a, Sym b) { return name_of(a) < name_of(b); });
    return out;
}

const std::vector<int>& FiniteSLO::dia_table(Sym rel) const {
    auto it = dia_.find(rel);
    if (it == dia_.end()) throw Error("algebra has no operator for relation " + name_of(rel));
    return it->second;
}

int FiniteSLO::index_of(std::string_view name) const {
    for (int i = 0; i < size(); ++i)
        if (names_[i] == name) return i;
    throw Error("unknown element '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Axioms and validity

std::vector<std::string> check_slo_axioms(const FiniteSLO& a) {
    std::vector<std::string> out;
    const int n = a.size();
    auto nm = [&](int x) { return a.name(x); };
    for (int x = 0; x < n; ++x) {
        if (a.meet(x, x) != x) out.push_back("idempotence fails at " + nm(x));
        if (a.meet(x, a.top()) != x) out.push_back("top is not a unit at " + nm(x));
    }
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (a.meet(x, y) != a.meet(y, x)) out.push_back("commutativity fails at " + nm(x) + ", " + nm(y));
            for (int z = 0; z < n; ++z)
                if (a.meet(x, a.meet(y, z)) != a.meet(a.meet(x, y), z))
                    out.push_back("associativity fails at " + nm(x) + ", " + nm(y) + ", " + nm(z));
        }
    for (Sym r : a.relations())
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                int dxy = a.dia(r, a.meet(x, y));
                if (a.meet(dxy, a.dia(r, y)) != dxy)
                    out.push_back("monotonicity of <" + name_of(r) + "> fails at " + nm(x) + ", " + nm(y));
            }
    if (auto b = a.bottom()) {
        for (int x = 0; x < n; ++x)
            if (a.meet(*b, x) != *b) out.push_back("bottom " + nm(*b) + " is not below " + nm(x));
        for (Sym r : a.relations())
            if (a.dia(r, *b) != *b) out.push_back("<" + name_of(r) + "> does not fix the bottom");
    }
    return out;
}

int eval_term(const FiniteSLO& a, const Formula& f, const SloValuation& v) {
    switch (f.kind()) {
        case Kind::Top: return a.top();
        case Kind::Bot:
            if (!a.bottom()) throw PreconditionError("bot needs an algebra with a bottom element");
            return *a.bottom();
        case Kind::Var: {
            auto it = v.find(f.sym());
            if (it == v.end()) throw Error("valuation misses variable " + name_of(f.sym()));
            return it->second;
        }
        case Kind::And: {
            int x = a.top();
            for (auto& g : f.args()) x = a.meet(x, eval_term(a, g, v));
            return x;
        }
        case Kind::Dia: return a.dia(f.sym(), eval_term(a, f.body(), v));
    }
    return a.top();
}

namespace {

// Enumerates all valuations of vars; fn returns false to stop.
bool for_each_valuation(const FiniteSLO& a, const std::set<Sym>& vars,
                        const std::function<bool(const SloValuation&)>& fn) {
    std::vector<Sym> vs(vars.begin(), vars.end());
    double count = std::pow(static_cast<double>(a.size()), static_cast<double>(vs.size()));
    if (count > double(1 << 24)) throw CapError("too many valuations to enumerate");
    SloValuation v;
    for (Sym s : vs) v[s] = 0;
    while (true) {
        if (!fn(v)) return false;
        std::size_t k = 0;
        while (k < vs.size() && ++v[vs[k]] == a.size()) v[vs[k++]] = 0;
        if (k == vs.size()) return true;
    }
}

bool holds(const FiniteSLO& a, const Implication& i, const SloValuation& v) {
    return a.leq(eval_term(a, i.lhs, v), eval_term(a, i.rhs, v));
}

} // namespace

std::optional<SloValuation> slo_refutation(const FiniteSLO& a, const Implication& i) {
    std::optional<SloValuation> bad;
    for_each_valuation(a, vars_of(i), [&](const SloValuation& v) {
        if (holds(a, i, v)) return true;
        bad = v;
        return false;
    });
    return bad;
}

bool slo_validates(const FiniteSLO& a, const Implication& i) { return !slo_refutation(a, i); }

bool slo_validates(const FiniteSLO& a, const std::vector<Implication>& theory) {
    for (auto& i : theory)
        if (!slo_validates(a, i)) return false;
    return true;
}

bool slo_validates_rule(const FiniteSLO& a, const Rule& r) {
    std::set<Sym> vars = vars_of(r.conclusion);
    for (auto& p : r.premises) {
        auto vp = vars_of(p);
        vars.insert(vp.begin(), vp.end());
    }
    return for_each_valuation(a, vars, [&](const SloValuation& v) {
        for (auto& p : r.premises)
            if (!holds(a, p, v)) return true;
        return holds(a, r.conclusion, v);
    });
}

// ---------------------------------------------------------------------------
// Algebras from frames

namespace {

FiniteSLO subalgebra_of_sets(const Frame& fr, const std::vector<PSet>& sets) {
    const int n = static_cast<int>(sets.size());
    std::map<PSet, int> index;
    for (int i = 0; i < n; ++i) index[sets[i]] = i;
    std::vector<std::string> names;
    for (PSet s : sets) names.push_back(render_set(fr, s));
    std::vector<std::vector<int>> meet(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) meet[i][j] = index.at(sets[i] & sets[j]);
    FiniteSLO a(std::move(names), std::move(meet), index.at(fr.all()));
    for (Sym r : fr.relations()) {
        std::vector<int> t(n);
        for (int i = 0; i < n; ++i) t[i] = index.at(fr.dia_plus(r, sets[i]));
        a.set_dia(r, std::move(t));
    }
    if (index.count(0)) a.set_bottom(index.at(0));
    a.set_sets(sets);
    return a;
}

} // namespace

FiniteSLO complex_algebra(const Frame& fr, int cap) {
    if (fr.size() > cap) throw CapError("complex algebra needs at most " + std::to_string(cap) + " points");
    std::vector<PSet> sets;
    for (PSet s = 0; s <= fr.all(); ++s) sets.push_back(s);
    return subalgebra_of_sets(fr, sets);
}

FiniteSLO slo_from_admissible(const Frame& fr, const std::vector<PSet>& family) {
    std::vector<PSet> sets = family;
    std::sort(sets.begin(), sets.end());
    sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
    auto in = [&](PSet s) { return std::binary_search(sets.begin(), sets.end(), s); };
    if (!in(fr.all())) throw Error("family does not contain the set of all points");
    for (PSet x : sets) {
        for (PSet y : sets)
            if (!in(x & y))
                throw Error("family is not closed under intersection: " + render_set(fr, x) + " and " +
                            render_set(fr, y));
        for (Sym r : fr.relations())
            if (!in(fr.dia_plus(r, x)))
                throw Error("family is not closed under <" + name_of(r) + ">: " + render_set(fr, x));
    }
    if (sets.size() > static_cast<std::size_t>(kMaxAlgebraElements))
        throw CapError("admissible family has more than " + std::to_string(kMaxAlgebraElements) + " sets");
    return subalgebra_of_sets(fr, sets);
}

std::vector<PSet> close_family(const Frame& fr, const std::vector<PSet>& family) {
    std::set<PSet> out(family.begin(), family.end());
    out.insert(fr.all());
    std::vector<PSet> work(out.begin(), out.end());
    auto rels = fr.relations();
    while (!work.empty()) {
        PSet x = work.back();
        work.pop_back();
        std::vector<PSet> fresh;
        for (PSet y : out) fresh.push_back(x & y);
        for (Sym r : rels) fresh.push_back(fr.dia_plus(r, x));
        for (PSet f : fresh)
            if (out.insert(f).second) {
                work.push_back(f);
                if (out.size() > 4096) throw CapError("generated family grows beyond 4096 sets");
            }
    }
    return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Filters and isomorphism

Filter principal_filter(const FiniteSLO& a, int c) {
    if (a.size() > 64) throw CapError("filters are limited to algebras with 64 elements");
    Filter f = 0;
    for (int x = 0; x < a.size(); ++x)
        if (a.leq(c, x)) f |= bit(x);
    return f;
}

std::vector<Filter> filters(const FiniteSLO& a) {
    // In a finite meet-semilattice every filter is generated by the meet of its members.
    std::vector<Filter> out;
    for (int c = 0; c < a.size(); ++c) out.push_back(principal_filter(a, c));
    return out;
}

bool slo_isomorphic(const FiniteSLO& a, const FiniteSLO& b) {
    const int n = a.size();
    if (n != b.size() || a.relations() != b.relations()) return false;
    auto rels = a.relations();
    std::vector<int> perm(n, -1);
    std::vector<bool> used(n, false);
    std::function<bool(int)> go = [&](int i) -> bool {
        if (i == n) {
            for (int x = 0; x < n; ++x)
                for (int y = 0; y < n; ++y)
                    if (perm[a.meet(x, y)] != b.meet(perm[x], perm[y])) return false;
            for (Sym r : rels)
                for (int x = 0; x < n; ++x)
                    if (perm[a.dia(r, x)] != b.dia(r, perm[x])) return false;
            if (a.bottom() && b.bottom() && perm[*a.bottom()] != *b.bottom()) return false;
            return true;
        }
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            if ((i == a.top()) != (j == b.top())) continue;
            // order must be preserved with the already mapped elements
            bool ok = true;
            for (int k = 0; k < i && ok; ++k)
                ok = a.leq(k, i) == b.leq(perm[k], j) && a.leq(i, k) == b.leq(j, perm[k]);
            if (!ok) continue;
            perm[i] = j;
            used[j] = true;
            if (go(i + 1)) return true;
            used[j] = false;
        }
        perm[i] = -1;
        return false;
    };
    return go(0);
}

// ---------------------------------------------------------------------------
// Embeddings

std::string recipe_name(Recipe r) {
    switch (r) {
        case Recipe::ElementClassic: return "element_classic";
        case Recipe::ElementSymmetric: return "element_symmetric";
        case Recipe::IdentityRel: return "identity_rel";
        case Recipe::FunctionalFilter: return "functional_filter";
        case Recipe::FuncommProperFilter: return "funcomm_proper_filter";
        case Recipe::Pi1Iterative: return "pi1_iterative";
        case Recipe::TruncatedChain: return "truncated_chain";
    }
    return {};
}

std::vector<Recipe> all_recipes() {
    return {Recipe::ElementClassic,      Recipe::ElementSymmetric, Recipe::IdentityRel,   Recipe::FunctionalFilter,
            Recipe::FuncommProperFilter, Recipe::Pi1Iterative,     Recipe::TruncatedChain};
}

Recipe recipe_from_name(const std::string& name) {
    for (Recipe r : all_recipes())
        if (recipe_name(r) == name) return r;
    throw Error("unknown recipe '" + name + "'");
}

namespace {

// Instantiates a pattern written with "<>" (and "<A>", "<B>" for two relations).
Implication axiom(std::string pattern, Sym a, std::optional<Sym> b = std::nullopt) {
    auto replace = [&](const std::string& from, Sym to) {
        std::string with = "<" + name_of(to) + ">";
        for (std::size_t pos = 0; (pos = pattern.find(from, pos)) != std::string::npos; pos += with.size())
            pattern.replace(pos, from.size(), with);
    };
    replace("<>", a);
    replace("<A>", a);
    if (b) replace("<B>", *b);
    return parse_implication(pattern);
}

void require_relations(const std::vector<Sym>& rels, std::initializer_list<Sym> need, Recipe r) {
    for (Sym s : need)
        if (std::find(rels.begin(), rels.end(), s) == rels.end())
            throw PreconditionError(recipe_name(r) + " needs relation " + name_of(s));
}

FO functional(Sym r) {
    return FO::forall({"x", "y", "z"},
                      FO::implies(FO::conj({FO::atom(r, "x", "y"), FO::atom(r, "x", "z")}), FO::eq("y", "z")));
}

FO commute(Sym r, Sym s) {
    return FO::forall({"x", "y", "z"},
                      FO::implies(FO::conj({FO::atom(r, "x", "y"), FO::atom(s, "y", "z")}),
                                  FO::exists({"w"}, FO::conj({FO::atom(s, "x", "w"), FO::atom(r, "w", "z")}))));
}

} // namespace

std::vector<Implication> recipe_precondition(Recipe r, const std::vector<Sym>& rels, const RecipeOptions& opt) {
    std::vector<Implication> out;
    switch (r) {
        case Recipe::ElementClassic: break;
        case Recipe::ElementSymmetric:
            for (Sym x : rels) out.push_back(axiom("q & <>p => <>(p & <>q)", x));
            break;
        case Recipe::IdentityRel:
            for (Sym x : rels) {
                out.push_back(axiom("p => <>p", x));
                out.push_back(axiom("<>p => p", x));
            }
            break;
        case Recipe::FunctionalFilter:
            for (Sym x : rels) out.push_back(axiom("<>p & <>q => <>(p & q)", x));
            break;
        case Recipe::FuncommProperFilter:
            require_relations(rels, {opt.r, opt.s, opt.z}, r);
            out.push_back(axiom("<>p & <>q => <>(p & q)", opt.r));
            out.push_back(axiom("<>p & <>q => <>(p & q)", opt.s));
            out.push_back(axiom("<A><B>p => <B><A>p", opt.r, opt.s));
            out.push_back(axiom("<A><B>p => <B><A>p", opt.s, opt.r));
            out.push_back(axiom("<>top => p", opt.z));
            for (Sym x : rels) out.push_back(axiom("<A><B>top => <B>top", x, opt.z));
            break;
        case Recipe::Pi1Iterative:
            require_relations(rels, {opt.r, opt.s}, r);
            out.push_back(axiom("<A>(p & <A>q) => <A>(p & <B>q)", opt.r, opt.s));
            break;
        case Recipe::TruncatedChain: {
            if (rels.size() != 1) throw PreconditionError("truncated_chain needs a unimodal algebra");
            if (opt.chain < 1) throw PreconditionError("truncated_chain needs n >= 1");
            std::string lhs = "p";
            for (int k = 0; k < opt.chain; ++k) lhs = "<>" + lhs;
            out.push_back(axiom(lhs + " => q", rels[0]));
            break;
        }
    }
    return out;
}

FO recipe_guarantee(Recipe r, const std::vector<Sym>& rels, const RecipeOptions& opt) {
    std::vector<FO> parts;
    switch (r) {
        case Recipe::ElementClassic: break;
        case Recipe::ElementSymmetric:
            for (Sym x : rels)
                parts.push_back(FO::forall({"x", "y"}, FO::implies(FO::atom(x, "x", "y"), FO::atom(x, "y", "x"))));
            break;
        case Recipe::IdentityRel:
            for (Sym x : rels) {
                parts.push_back(FO::forall({"x"}, FO::atom(x, "x", "x")));
                parts.push_back(FO::forall({"x", "y"}, FO::implies(FO::atom(x, "x", "y"), FO::eq("x", "y"))));
            }
            break;
        case Recipe::FunctionalFilter:
            for (Sym x : rels) parts.push_back(functional(x));
            break;
        case Recipe::FuncommProperFilter:
            parts.push_back(functional(opt.r));
            parts.push_back(functional(opt.s));
            parts.push_back(commute(opt.r, opt.s));
            parts.push_back(commute(opt.s, opt.r));
            parts.push_back(FO::forall({"x", "y"}, FO::implies(FO::atom(opt.z, "x", "y"), FO::falsum())));
            break;
        case Recipe::Pi1Iterative:
            parts.push_back(FO::forall({"x", "y", "z"},
                                       FO::implies(FO::conj({FO::atom(opt.r, "x", "y"), FO::atom(opt.r, "y", "z")}),
                                                   FO::atom(opt.s, "y", "z"))));
            break;
        case Recipe::TruncatedChain: {
            Sym x = rels.empty() ? opt.r : rels[0];
            std::vector<std::string> vars;
            std::vector<FO> chain;
            for (int k = 0; k <= opt.chain; ++k) vars.push_back("x" + std::to_string(k));
            for (int k = 0; k < opt.chain; ++k) chain.push_back(FO::atom(x, vars[k], vars[k + 1]));
            parts.push_back(FO::forall(vars, FO::implies(FO::conj(chain), FO::falsum())));
            break;
        }
    }
    return FO::conj(std::move(parts));
}

std::string embedding_defect(const Embedding& e) {
    const FiniteSLO& a = e.source;
    const int n = a.size();
    if (static_cast<int>(e.map.size()) != n) return "map does not cover every element";
    for (PSet s : e.map)
        if (s & ~e.target.all()) return "map sends an element outside the target points";
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y)
            if (e.map[x] == e.map[y]) return "not injective: " + a.name(x) + " and " + a.name(y);
    if (e.map[a.top()] != e.target.all()) return "top is not sent to the set of all points";
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            if (e.map[a.meet(x, y)] != (e.map[x] & e.map[y]))
                return "meet of " + a.name(x) + " and " + a.name(y) + " is not preserved";
    for (Sym r : a.relations())
        for (int x = 0; x < n; ++x)
            if (e.map[a.dia(r, x)] != e.target.dia_plus(r, e.map[x]))
                return "<" + name_of(r) + "> is not preserved at " + a.name(x);
    return {};
}

bool verify_embedding(const Embedding& e) { return embedding_defect(e).empty(); }

namespace {

// Element-based frame: points are the elements listed in keep, eta(a) = keep-elements below a.
Embedding element_frame(const FiniteSLO& a, const std::vector<int>& keep,
                        const std::function<bool(Sym, int, int)>& rel) {
    Embedding e;
    e.source = a;
    for (int x : keep) e.target.add_point(a.name(x));
    for (Sym r : a.relations()) {
        e.target.declare(r);
        for (std::size_t i = 0; i < keep.size(); ++i)
            for (std::size_t j = 0; j < keep.size(); ++j)
                if (rel(r, keep[i], keep[j])) e.target.add_edge(r, static_cast<int>(i), static_cast<int>(j));
    }
    for (int x = 0; x < a.size(); ++x) {
        PSet s = 0;
        for (std::size_t i = 0; i < keep.size(); ++i)
            if (a.leq(keep[i], x)) s |= bit(static_cast<int>(i));
        e.map.push_back(s);
    }
    return e;
}

// Filter-based frame over the listed generators c (filter = up-set of c); f(a) = filters containing a.
Embedding filter_frame(const FiniteSLO& a, const std::vector<int>& gens,
                       const std::function<bool(Sym, Filter, Filter)>& rel) {
    Embedding e;
    e.source = a;
    std::vector<Filter> pts;
    for (int c : gens) {
        e.target.add_point("^" + a.name(c));
        pts.push_back(principal_filter(a, c));
    }
    for (Sym r : a.relations()) {
        e.target.declare(r);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = 0; j < pts.size(); ++j)
                if (rel(r, pts[i], pts[j])) e.target.add_edge(r, static_cast<int>(i), static_cast<int>(j));
    }
    for (int x = 0; x < a.size(); ++x) {
        PSet s = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (has(pts[i], x)) s |= bit(static_cast<int>(i));
        e.map.push_back(s);
    }
    return e;
}

// dia[V] is contained in U
bool image_inside(const FiniteSLO& a, Sym r, Filter u, Filter v) {
    bool ok = true;
    for_each_bit(v, [&](int x) { ok = ok && has(u, a.dia(r, x)); });
    return ok;
}

Filter preimage(const FiniteSLO& a, Sym r, Filter u) {
    Filter out = 0;
    for (int x = 0; x < a.size(); ++x)
        if (has(u, a.dia(r, x))) out |= bit(x);
    return out;
}

bool is_filter(const FiniteSLO& a, Filter f) {
    if (!f) return false;
    for (int x = 0; x < a.size(); ++x) {
        if (!has(f, x)) continue;
        for (int y = 0; y < a.size(); ++y) {
            if (a.leq(x, y) && !has(f, y)) return false;
            if (has(f, y) && !has(f, a.meet(x, y))) return false;
        }
    }
    return true;
}

Filter up_closure(const FiniteSLO& a, Filter s) {
    Filter out = 0;
    for_each_bit(s, [&](int x) { out |= principal_filter(a, x); });
    return out;
}

// The chain V_0 = {a}^, V_{n+1} = {x & <S>y1 & ... | x & <R>y1 & ... in V_n}^, up to its fixpoint.
// Finite meets of <R>-images are captured by enumerating subsets of the carrier.
Filter pi1_chain(const FiniteSLO& a, Sym r, Sym s, int start) {
    const int n = a.size();
    if (n > 16) throw CapError("pi1_iterative enumerates subsets and is limited to 16 elements");
    Filter v = principal_filter(a, start);
    while (true) {
        Filter next = v;
        for (std::uint64_t ys = 0; ys < (std::uint64_t{1} << n); ++ys) {
            int rmeet = a.top(), smeet = a.top();
            for_each_bit(ys, [&](int y) {
                rmeet = a.meet(rmeet, a.dia(r, y));
                smeet = a.meet(smeet, a.dia(s, y));
            });
            for (int x = 0; x < n; ++x)
                if (has(v, a.meet(x, rmeet))) next |= bit(a.meet(x, smeet));
        }
        next = up_closure(a, next);
        if (next == v) return v;
        v = next;
    }
}

} // namespace

Embedding embed(const FiniteSLO& a, Recipe recipe, const RecipeOptions& opt) {
    if (a.size() > 64) throw CapError("embeddings are limited to algebras with 64 elements");
    auto rels = a.relations();
    for (auto& i : recipe_precondition(recipe, rels, opt))
        if (!slo_validates(a, i)) throw PreconditionError(recipe_name(recipe) + " needs the algebra to validate " + i.str());

    std::vector<int> all(a.size());
    std::iota(all.begin(), all.end(), 0);
    Embedding e;
    switch (recipe) {
        case Recipe::ElementClassic:
            e = element_frame(a, all, [&](Sym r, int x, int y) { return a.leq(x, a.dia(r, y)); });
            break;
        case Recipe::ElementSymmetric:
            e = element_frame(a, all, [&](Sym r, int x, int y) { return a.leq(x, a.dia(r, y)) && a.leq(y, a.dia(r, x)); });
            break;
        case Recipe::IdentityRel:
            e = element_frame(a, all, [](Sym, int x, int y) { return x == y; });
            break;
        case Recipe::FunctionalFilter:
            e = filter_frame(a, all, [&](Sym r, Filter u, Filter v) { return preimage(a, r, u) == v; });
            break;
        case Recipe::FuncommProperFilter: {
            int least = a.dia(opt.z, a.top());
            std::vector<int> proper;
            for (int c : all)
                if (c != least) proper.push_back(c);
            e = filter_frame(a, proper, [&](Sym r, Filter u, Filter v) {
                if (r == opt.z) return false;
                if (r == opt.r || r == opt.s) return preimage(a, r, u) == v;
                return image_inside(a, r, u, v);
            });
            break;
        }
        case Recipe::Pi1Iterative: {
            e = filter_frame(a, all, [&](Sym r, Filter u, Filter v) {
                if (!image_inside(a, r, u, v)) return false;
                if (r != opt.r) return true;
                for (int x = 0; x < a.size(); ++x)
                    if (has(v, a.dia(opt.r, x)) && !has(v, a.dia(opt.s, x))) return false;
                return true;
            });
            // Check the witnesses the construction promises: for <R>x in U the chain from x is an R-successor.
            for (int u = 0; u < a.size(); ++u) {
                Filter fu = principal_filter(a, u);
                for (int x = 0; x < a.size(); ++x) {
                    if (!has(fu, a.dia(opt.r, x))) continue;
                    Filter v = pi1_chain(a, opt.r, opt.s, x);
                    if (!is_filter(a, v)) throw Error("pi1_iterative: chain union is not a filter");
                    int c = -1;
                    for (int k = 0; k < a.size(); ++k)
                        if (principal_filter(a, k) == v) c = k;
                    if (c < 0 || !e.target.edge(opt.r, u, c))
                        throw Error("pi1_iterative: chain filter is not an R-successor of ^" + a.name(u));
                }
            }
            break;
        }
        case Recipe::TruncatedChain: {
            Sym r = rels[0];
            int least = a.top();
            for (int k = 0; k < opt.chain; ++k) least = a.dia(r, least);
            std::vector<int> keep;
            for (int c : all)
                if (c != least) keep.push_back(c);
            e = element_frame(a, keep, [&](Sym rr, int x, int y) { return a.leq(x, a.dia(rr, y)); });
            break;
        }
    }
    e.recipe = recipe;
    e.chain = opt.chain;
    if (auto d = embedding_defect(e); !d.empty()) throw Error(recipe_name(recipe) + " produced a non-embedding: " + d);
    return e;
}

// ---------------------------------------------------------------------------
// Pool

namespace {

std::string pool_name(int i, int n) { return i == n - 1 ? "top" : "e" + std::to_string(i); }

FiniteSLO lattice_from_order(int n, const std::vector<std::vector<bool>>& leq) {
    std::vector<std::vector<int>> meet(n, std::vector<int>(n, -1));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            int best = -1;
            for (int z = 0; z < n; ++z) {
                if (!leq[z][x] || !leq[z][y]) continue;
                if (best < 0 || leq[best][z]) best = z;
            }
            // best must be above every lower bound
            for (int z = 0; z < n && best >= 0; ++z)
                if (leq[z][x] && leq[z][y] && !leq[z][best]) best = -1;
            if (best < 0) return FiniteSLO();
            meet[x][y] = best;
        }
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(pool_name(i, n));
    return FiniteSLO(std::move(names), std::move(meet), n - 1);
}

std::vector<std::vector<int>> monotone_maps(const FiniteSLO& l, bool normal) {
    const int n = l.size();
    std::vector<std::vector<int>> out;
    std::vector<int> f(n);
    std::function<void(int)> go = [&](int i) {
        if (i == n) {
            out.push_back(f);
            return;
        }
        for (int v = 0; v < n; ++v) {
            if (normal && i == 0 && v != 0) continue;
            bool ok = true;
            for (int j = 0; j < i && ok; ++j) {
                if (l.leq(j, i) && !l.leq(f[j], v)) ok = false;
                if (l.leq(i, j) && !l.leq(v, f[j])) ok = false;
            }
            if (!ok) continue;
            f[i] = v;
            go(i + 1);
        }
    };
    go(0);
    return out;
}

} // namespace

std::vector<FiniteSLO> lattices(int max_elements) {
    if (max_elements > 8) throw CapError("lattice enumeration is limited to 8 elements");
    std::vector<FiniteSLO> out;
    for (int n = 1; n <= max_elements; ++n) {
        std::vector<std::pair<int, int>> pairs;
        for (int i = 1; i < n - 1; ++i)
            for (int j = i + 1; j < n - 1; ++j) pairs.push_back({i, j});
        std::vector<FiniteSLO> found;
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
            std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
            for (int i = 0; i < n; ++i) {
                leq[i][i] = true;
                leq[0][i] = true;
                leq[i][n - 1] = true;
            }
            for (std::size_t k = 0; k < pairs.size(); ++k)
                if (mask >> k & 1U) leq[pairs[k].first][pairs[k].second] = true;
            bool transitive = true;
            for (int x = 0; x < n && transitive; ++x)
                for (int y = 0; y < n && transitive; ++y)
                    for (int z = 0; z < n && transitive; ++z)
                        if (leq[x][y] && leq[y][z] && !leq[x][z]) transitive = false;
            if (!transitive) continue;
            FiniteSLO l = lattice_from_order(n, leq);
            if (l.size() == 0) continue;
            bool dup = false;
            for (auto& g : found)
                if (slo_isomorphic(g, l)) {
                    dup = true;
                    break;
                }
            if (!dup) found.push_back(std::move(l));
        }
        for (auto& l : found) out.push_back(std::move(l));
    }
    return out;
}

void for_each_slo(int max_elements, const std::vector<Sym>& rels, bool normal,
                  const std::function<bool(const FiniteSLO&)>& fn) {
    for (const auto& l : lattices(max_elements)) {
        auto maps = monotone_maps(l, normal);
        std::vector<std::size_t> pick(rels.size(), 0);
        while (true) {
            FiniteSLO a = l;
            for (std::size_t k = 0; k < rels.size(); ++k) a.set_dia(rels[k], maps[pick[k]]);
            if (normal) a.set_bottom(0);
            if (!fn(a)) return;
            std::size_t k = 0;
            while (k < rels.size() && ++pick[k] == maps.size()) pick[k++] = 0;
            if (k == rels.size()) break;
        }
    }
}

// ---------------------------------------------------------------------------
// Text format

namespace {

// Splits on commas and whitespace that are not inside braces.
std::vector<std::string> tokens(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char c : s) {
        if (c == '{') ++depth;
        if (c == '}') --depth;
        if (depth == 0 && (c == ',' || c == ' ' || c == '\t')) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::pair<std::string, std::string> split_pair(const std::string& tok, std::string_view sep, std::size_t offset) {
    auto pos = tok.find(sep);
    if (pos == std::string::npos) throw ParseError("expected '" + std::string(sep) + "' in '" + tok + "'", offset);
    return {tok.substr(0, pos), tok.substr(pos + sep.size())};
}

} // namespace

FiniteSLO parse_slo(const std::string& src) {
    std::vector<std::string> names;
    std::string top_name, bottom_name;
    std::vector<std::pair<std::string, std::string>> order;
    std::vector<std::pair<Sym, std::vector<std::pair<std::string, std::string>>>> dias;
    std::size_t offset = 0;
    std::size_t order_offset = 0;
    for (auto& line : text::lines(src)) {
        std::size_t here = offset;
        offset += line.size() + 1;
        if (line.empty()) continue;
        auto [key, value] = text::key_value(line);
        if (key == "elements") {
            names = tokens(value);
        } else if (key == "top") {
            top_name = std::string(text::trim(value));
        } else if (key == "bottom") {
            bottom_name = std::string(text::trim(value));
        } else if (key == "order") {
            order_offset = here;
            for (auto& t : tokens(value)) order.push_back(split_pair(t, "<", here));
        } else if (text::starts_with(key, "dia")) {
            std::string rel(text::trim(std::string_view(key).substr(3)));
            if (rel.empty()) rel = "R";
            std::vector<std::pair<std::string, std::string>> entries;
            for (auto& t : tokens(value)) entries.push_back(split_pair(t, "->", here));
            dias.push_back({intern(rel), std::move(entries)});
        } else {
            throw ParseError("unknown key '" + key + "'", here);
        }
    }
    if (names.empty()) throw ParseError("missing 'elements:' line", 0);
    const int n = static_cast<int>(names.size());
    auto idx = [&](const std::string& s, std::size_t at) {
        for (int i = 0; i < n; ++i)
            if (names[i] == s) return i;
        throw ParseError("unknown element '" + s + "'", at);
    };
    std::vector<std::vector<bool>> leq(n, std::vector<bool>(n, false));
    for (int i = 0; i < n; ++i) leq[i][i] = true;
    for (auto& [a, b] : order) leq[idx(a, order_offset)][idx(b, order_offset)] = true;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (leq[i][k] && leq[k][j]) leq[i][j] = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && leq[i][j] && leq[j][i]) throw ParseError("order has a cycle through " + names[i], order_offset);

    std::vector<std::vector<int>> meet(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            int best = -1;
            for (int z = 0; z < n; ++z)
                if (leq[z][x] && leq[z][y] && (best < 0 || leq[best][z])) best = z;
            for (int z = 0; z < n && best >= 0; ++z)
                if (leq[z][x] && leq[z][y] && !leq[z][best]) best = -1;
            if (best < 0) throw ParseError("order is not meet-closed at " + names[x] + ", " + names[y], order_offset);
            meet[x][y] = best;
        }
    if (top_name.empty()) throw ParseError("missing 'top:' line", 0);
    int top = idx(top_name, 0);
    for (int i = 0; i < n; ++i)
        if (!leq[i][top]) throw ParseError("top is not the greatest element", 0);

    FiniteSLO a(names, std::move(meet), top);
    for (auto& [rel, entries] : dias) {
        std::vector<int> t(n, -1);
        for (auto& [from, to] : entries) t[idx(from, 0)] = idx(to, 0);
        for (int i = 0; i < n; ++i)
            if (t[i] < 0) throw ParseError("<" + name_of(rel) + "> is undefined at " + names[i], 0);
        a.set_dia(rel, std::move(t));
    }
    if (!bottom_name.empty()) a.set_bottom(idx(bottom_name, 0));
    return a;
}

std::string render_slo(const FiniteSLO& a) {
    const int n = a.size();
    std::vector<std::string> names, covers;
    for (int i = 0; i < n; ++i) names.push_back(a.name(i));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            if (x == y || !a.leq(x, y)) continue;
            bool cover = true;
            for (int z = 0; z < n && cover; ++z)
                if (z != x && z != y && a.leq(x, z) && a.leq(z, y)) cover = false;
            if (cover) covers.push_back(a.name(x) + "<" + a.name(y));
        }
    std::string out = "elements: " + text::join(names, " ") + "\n";
    out += "top: " + a.name(a.top()) + "\n";
    if (a.bottom()) out += "bottom: " + a.name(*a.bottom()) + "\n";
    if (!covers.empty()) out += "order: " + text::join(covers, ", ") + "\n";
    for (Sym r : a.relations()) {
        std::vector<std::string> es;
        for (int x = 0; x < n; ++x) es.push_back(a.name(x) + "->" + a.name(a.dia(r, x)));
        out += "dia " + name_of(r) + ": " + text::join(es, ", ") + "\n";
    }
    return out;
}

} // namespace spikit
