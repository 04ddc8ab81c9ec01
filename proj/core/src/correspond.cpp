#include "spikit/correspond.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <tuple>

namespace spikit {

// ---------------------------------------------------------------------------
// Construction helpers

FO FO::falsum() {
    FO f;
    f.op = Op::Falsum;
    return f;
}

FO FO::atom(Sym rel, std::string a, std::string b) {
    FO f;
    f.op = Op::Atom;
    f.rel = rel;
    f.a = std::move(a);
    f.b = std::move(b);
    return f;
}

FO FO::eq(std::string a, std::string b) {
    if (a == b) return verum();
    FO f;
    f.op = Op::Eq;
    if (b < a) std::swap(a, b);
    f.a = std::move(a);
    f.b = std::move(b);
    return f;
}

namespace {

FO nary(FO::Op op, std::vector<FO> parts) {
    const FO::Op unit = op == FO::Op::And ? FO::Op::Verum : FO::Op::Falsum;
    const FO::Op zero = op == FO::Op::And ? FO::Op::Falsum : FO::Op::Verum;
    std::vector<FO> flat;
    for (auto& p : parts) {
        if (p.op == zero) return p;
        if (p.op == unit) continue;
        if (p.op == op) {
            for (auto& k : p.kids)
                if (std::find(flat.begin(), flat.end(), k) == flat.end()) flat.push_back(std::move(k));
        } else if (std::find(flat.begin(), flat.end(), p) == flat.end()) {
            flat.push_back(std::move(p));
        }
    }
    if (flat.empty()) {
        FO f;
        f.op = unit;
        return f;
    }
    if (flat.size() == 1) return std::move(flat.front());
    FO f;
    f.op = op;
    f.kids = std::move(flat);
    return f;
}

FO quant(FO::Op op, std::vector<std::string> vars, FO body) {
    if (vars.empty() || body.is_verum() || body.is_falsum()) return body;
    FO f;
    f.op = op;
    f.vars = std::move(vars);
    f.kids.push_back(std::move(body));
    return f;
}

} // namespace

FO FO::conj(std::vector<FO> parts) { return nary(Op::And, std::move(parts)); }
FO FO::disj(std::vector<FO> parts) { return nary(Op::Or, std::move(parts)); }

FO FO::implies(FO lhs, FO rhs) {
    if (rhs.is_verum() || lhs.is_falsum()) return verum();
    if (lhs.is_verum()) return rhs;
    FO f;
    f.op = Op::Implies;
    f.kids.push_back(std::move(lhs));
    f.kids.push_back(std::move(rhs));
    return f;
}

FO FO::forall(std::vector<std::string> vars, FO body) { return quant(Op::Forall, std::move(vars), std::move(body)); }
FO FO::exists(std::vector<std::string> vars, FO body) { return quant(Op::Exists, std::move(vars), std::move(body)); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

int prec(const FO& f) {
    switch (f.op) {
        case FO::Op::Implies: return 1;
        case FO::Op::Or: return 2;
        case FO::Op::And: return 3;
        default: return 4;
    }
}

std::string render(const FO& f);

std::string wrap(const FO& kid, int min_prec) {
    std::string s = render(kid);
    return prec(kid) < min_prec ? "(" + s + ")" : s;
}

std::string render(const FO& f) {
    switch (f.op) {
        case FO::Op::Verum: return "true";
        case FO::Op::Falsum: return "false";
        case FO::Op::Atom: return name_of(f.rel) + "(" + f.a + "," + f.b + ")";
        case FO::Op::Eq: return f.a + " = " + f.b;
        case FO::Op::And:
        case FO::Op::Or: {
            std::string sep = f.op == FO::Op::And ? " & " : " | ";
            std::string out;
            for (std::size_t k = 0; k < f.kids.size(); ++k) {
                if (k) out += sep;
                out += wrap(f.kids[k], prec(f) + 1);
            }
            return out;
        }
        case FO::Op::Implies: return wrap(f.kids[0], 2) + " -> " + wrap(f.kids[1], 2);
        case FO::Op::Forall:
        case FO::Op::Exists: {
            std::string out = f.op == FO::Op::Forall ? "forall" : "exists";
            for (auto& v : f.vars) out += " " + v;
            const FO& body = f.kids[0];
            bool bare = body.op == FO::Op::Atom || body.op == FO::Op::Eq || body.op == FO::Op::Forall ||
                        body.op == FO::Op::Exists;
            return out + ". " + (bare ? render(body) : "(" + render(body) + ")");
        }
    }
    return {};
}

void collect_free(const FO& f, std::set<std::string>& bound, std::set<std::string>& out) {
    switch (f.op) {
        case FO::Op::Atom:
        case FO::Op::Eq:
            if (!bound.count(f.a)) out.insert(f.a);
            if (!bound.count(f.b)) out.insert(f.b);
            return;
        case FO::Op::Forall:
        case FO::Op::Exists: {
            std::vector<std::string> added;
            for (auto& v : f.vars)
                if (bound.insert(v).second) added.push_back(v);
            collect_free(f.kids[0], bound, out);
            for (auto& v : added) bound.erase(v);
            return;
        }
        default:
            for (auto& k : f.kids) collect_free(k, bound, out);
    }
}

} // namespace

std::string FO::str() const { return render(*this); }

std::vector<std::string> free_vars(const FO& s) {
    std::set<std::string> bound, out;
    collect_free(s, bound, out);
    return {out.begin(), out.end()};
}

// ---------------------------------------------------------------------------
// Evaluation
//
// Sentences are compiled to slot indices first. A quantifier block binds its
// variables one at a time; whenever a conjunct of the antecedent (forall) or of
// the body (exists) has all its variables bound it is checked right away, which
// turns the enumeration of a tree diagram into a pruned homomorphism search.

namespace {

struct Node {
    FO::Op op;
    Sym rel = 0;
    int a = -1, b = -1;
    std::vector<int> slots;
    std::vector<Node> kids;
    // quantifier blocks: guards[k] = conjuncts that become closed after binding slots[k]
    std::vector<std::vector<int>> guards;
};

class Compiler {
public:
    Node compile(const FO& f) {
        Node n;
        n.op = f.op;
        switch (f.op) {
            case FO::Op::Atom:
            case FO::Op::Eq:
                n.rel = f.rel;
                n.a = lookup(f.a);
                n.b = lookup(f.b);
                break;
            case FO::Op::Forall:
            case FO::Op::Exists: {
                for (auto& v : f.vars) {
                    scope_[v].push_back(next_);
                    n.slots.push_back(next_++);
                }
                n.kids.push_back(compile(f.kids[0]));
                for (auto& v : f.vars) scope_[v].pop_back();
                plan_guards(n);
                break;
            }
            default:
                for (auto& k : f.kids) n.kids.push_back(compile(k));
        }
        return n;
    }
    int slots() const { return next_; }

private:
    int lookup(const std::string& v) {
        auto it = scope_.find(v);
        if (it == scope_.end() || it->second.empty()) throw Error("free variable '" + v + "' in first-order sentence");
        return it->second.back();
    }

    static void used_slots(const Node& n, std::set<int>& out) {
        if (n.a >= 0) out.insert(n.a);
        if (n.b >= 0) out.insert(n.b);
        for (auto& k : n.kids) used_slots(k, out);
    }

    static void plan_guards(Node& q) {
        const Node& body = q.kids[0];
        const Node* target = nullptr;
        if (q.op == FO::Op::Forall && body.op == FO::Op::Implies) target = &body.kids[0];
        if (q.op == FO::Op::Exists) target = &body;
        q.guards.assign(q.slots.size(), {});
        if (!target) return;
        std::vector<const Node*> conjuncts;
        if (target->op == FO::Op::And) {
            for (auto& k : target->kids) conjuncts.push_back(&k);
        } else {
            conjuncts.push_back(target);
        }
        for (std::size_t c = 0; c < conjuncts.size(); ++c) {
            std::set<int> used;
            used_slots(*conjuncts[c], used);
            int last = -1;
            for (std::size_t k = 0; k < q.slots.size(); ++k)
                if (used.count(q.slots[k])) last = static_cast<int>(k);
            if (last >= 0) q.guards[last].push_back(static_cast<int>(c));
        }
    }

    std::map<std::string, std::vector<int>> scope_;
    int next_ = 0;
};

class Evaluator {
public:
    Evaluator(const Frame& fr, int slots) : fr_(fr), env_(slots, -1) {}

    bool eval(const Node& n) {
        switch (n.op) {
            case FO::Op::Verum: return true;
            case FO::Op::Falsum: return false;
            case FO::Op::Atom: return fr_.edge(n.rel, env_[n.a], env_[n.b]);
            case FO::Op::Eq: return env_[n.a] == env_[n.b];
            case FO::Op::And:
                for (auto& k : n.kids)
                    if (!eval(k)) return false;
                return true;
            case FO::Op::Or:
                for (auto& k : n.kids)
                    if (eval(k)) return true;
                return false;
            case FO::Op::Implies: return !eval(n.kids[0]) || eval(n.kids[1]);
            case FO::Op::Forall: return !find(n, 0, false);
            case FO::Op::Exists: return find(n, 0, true);
        }
        return false;
    }

private:
    const Node& guarded(const Node& q, int c) const {
        const Node& body = q.kids[0];
        const Node& target = q.op == FO::Op::Forall ? body.kids[0] : body;
        return target.op == FO::Op::And ? target.kids[c] : target;
    }

    // Looks for an assignment of q's block under which the body evaluates to want.
    bool find(const Node& q, std::size_t k, bool want) {
        if (k == q.slots.size()) return eval(q.kids[0]) == want;
        for (int w = 0; w < fr_.size(); ++w) {
            env_[q.slots[k]] = w;
            bool ok = true;
            for (int c : q.guards[k])
                if (!eval(guarded(q, c))) {
                    ok = false;
                    break;
                }
            if (ok && find(q, k + 1, want)) return true;
        }
        return false;
    }

    const Frame& fr_;
    std::vector<int> env_;
};

} // namespace

bool eval_fo(const Frame& fr, const FO& s) {
    Compiler c;
    Node root = c.compile(s);
    Evaluator e(fr, c.slots());
    return e.eval(root);
}

// ---------------------------------------------------------------------------
// Correspondents

namespace {

std::string xname(int i) { return "x" + std::to_string(i); }
std::string yname(int j) { return "y" + std::to_string(j); }

struct Trees {
    TreeModel lhs, rhs;
    std::vector<std::string> xs;
    FO diagram;
    std::set<std::tuple<Sym, std::string, std::string>> lhs_atoms;
    // per rhs point: the lhs points each of its variables may be sent to
    std::vector<std::vector<PSet>> choices;
    bool impossible = false;
};

Trees prepare(const Implication& i) {
    if (contains_bot(i.lhs) || contains_bot(i.rhs)) throw PreconditionError("correspondent needs a bot-free implication");
    Trees t{tree_model(i.lhs), tree_model(i.rhs), {}, {}, {}, {}, false};
    std::vector<FO> diag;
    for (int k = 0; k < t.lhs.size(); ++k) {
        t.xs.push_back(xname(k));
        if (k > 0) {
            diag.push_back(FO::atom(t.lhs.parent_rel[k], xname(t.lhs.parent[k]), xname(k)));
            t.lhs_atoms.insert({t.lhs.parent_rel[k], xname(t.lhs.parent[k]), xname(k)});
        }
    }
    t.diagram = FO::conj(std::move(diag));
    t.choices.assign(t.rhs.size(), {});
    for (auto& [p, set] : t.rhs.model.val) {
        PSet c = t.lhs.model.val_of(p);
        for_each_bit(set, [&](int j) {
            t.choices[j].push_back(c);
            if (!c) t.impossible = true;
        });
    }
    return t;
}

// Relational part of the consequent after renaming; atoms already on the left are dropped.
std::vector<FO> rhs_atoms(const Trees& t, const std::vector<std::string>& name) {
    std::vector<FO> out;
    for (int j = 1; j < t.rhs.size(); ++j) {
        auto key = std::make_tuple(t.rhs.parent_rel[j], name[t.rhs.parent[j]], name[j]);
        if (t.lhs_atoms.count(key)) continue;
        out.push_back(FO::atom(t.rhs.parent_rel[j], name[t.rhs.parent[j]], name[j]));
    }
    return out;
}

FO close(const Trees& t, FO consequent) {
    return FO::forall(t.xs, FO::implies(t.diagram, std::move(consequent)));
}

} // namespace

FO correspondent(const Implication& i) {
    Trees t = prepare(i);
    if (t.impossible) return close(t, FO::falsum());

    std::vector<std::string> name(t.rhs.size());
    name[0] = xname(0);
    // singleton choices fix the existential outright
    for (int j = 1; j < t.rhs.size(); ++j)
        for (PSet c : t.choices[j])
            if (popcount(c) == 1 && name[j].empty()) name[j] = xname(std::countr_zero(c));
    std::vector<std::string> ys;
    for (int j = 1; j < t.rhs.size(); ++j)
        if (name[j].empty()) {
            name[j] = yname(j);
            ys.push_back(name[j]);
        }

    std::vector<FO> body = rhs_atoms(t, name);
    for (int j = 0; j < t.rhs.size(); ++j)
        for (PSet c : t.choices[j]) {
            std::vector<FO> alts;
            for_each_bit(c, [&](int x) { alts.push_back(FO::eq(name[j], xname(x))); });
            body.push_back(FO::disj(std::move(alts)));
        }
    return close(t, FO::exists(std::move(ys), FO::conj(std::move(body))));
}

FO correspondent_dnf(const Implication& i) {
    Trees t = prepare(i);
    if (t.impossible) return close(t, FO::falsum());

    // flatten (rhs point, choice set) pairs
    std::vector<std::pair<int, std::vector<int>>> slots;
    double total = 1;
    for (int j = 0; j < t.rhs.size(); ++j)
        for (PSet c : t.choices[j]) {
            std::vector<int> opts;
            for_each_bit(c, [&](int x) { opts.push_back(x); });
            total *= static_cast<double>(opts.size());
            slots.push_back({j, std::move(opts)});
        }
    if (total > 4096) throw CapError("correspondent_dnf: too many choice functions");

    std::vector<FO> disjuncts;
    std::vector<std::size_t> pick(slots.size(), 0);
    while (true) {
        std::vector<std::string> name(t.rhs.size());
        name[0] = xname(0);
        std::vector<FO> eqs;
        for (std::size_t k = 0; k < slots.size(); ++k) {
            auto& [j, opts] = slots[k];
            std::string chosen = xname(opts[pick[k]]);
            if (name[j].empty()) {
                name[j] = chosen;
            } else {
                eqs.push_back(FO::eq(name[j], chosen));
            }
        }
        std::vector<std::string> ys;
        for (int j = 1; j < t.rhs.size(); ++j)
            if (name[j].empty()) {
                name[j] = yname(j);
                ys.push_back(name[j]);
            }
        std::vector<FO> body = rhs_atoms(t, name);
        for (auto& e : eqs) body.push_back(std::move(e));
        disjuncts.push_back(FO::exists(std::move(ys), FO::conj(std::move(body))));

        std::size_t k = 0;
        while (k < slots.size() && ++pick[k] == slots[k].second.size()) pick[k++] = 0;
        if (k == slots.size()) break;
    }
    return close(t, FO::disj(std::move(disjuncts)));
}

FO phi_of_profile(const Profile& p) {
    validate_profile(p);
    std::vector<std::string> xs;
    std::vector<FO> diag;
    for (int k = 0; k < p.g.size(); ++k) xs.push_back(xname(k));
    for (Sym r : p.g.relations())
        for (auto [a, b] : p.g.edges(r)) diag.push_back(FO::atom(r, xname(a), xname(b)));
    return FO::forall(std::move(xs), FO::implies(FO::conj(std::move(diag)), FO::atom(p.s, xname(p.u), xname(p.v))));
}

} // namespace spikit
