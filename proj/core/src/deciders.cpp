#include "spikit/deciders.hpp"

#include <algorithm>
#include <set>

#include "spikit/horn.hpp"
#include "spikit/random.hpp"

namespace spikit {

namespace {

const Sym kR = intern("R");

Sym single_relation(const std::set<Sym>& rels) {
    if (rels.size() > 1) throw PreconditionError("expected a unimodal formula");
    return rels.empty() ? kR : *rels.begin();
}

void require_bot_free(const Formula& f) {
    if (contains_bot(f)) throw PreconditionError("normal forms need a bot-free formula");
}

// Variables and diamond bodies of the top level of f.
void split_top(const Formula& f, std::vector<Formula>& vars, std::vector<Formula>& bodies) {
    for (auto& c : f.conjuncts()) {
        if (c.kind() == Kind::Dia)
            bodies.push_back(c.body());
        else
            vars.push_back(c);
    }
}

// Calls fn for every k-subset of 0..n-1 in lexicographic order.
template <class F>
void for_each_subset(int n, int k, F&& fn) {
    std::vector<int> idx(k);
    for (int i = 0; i < k; ++i) idx[i] = i;
    if (k > n) return;
    while (true) {
        fn(idx);
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

std::set<Formula> nf_fun(const Formula& f, int n, Sym rel) {
    std::vector<Formula> vars, bodies;
    split_top(f, vars, bodies);
    std::set<Formula> out(vars.begin(), vars.end());
    for (auto& b : bodies) {
        auto inner = nf_fun(b, n, rel);
        std::vector<Formula> a(inner.begin(), inner.end());
        if (static_cast<int>(a.size()) <= n) {
            out.insert(Formula::dia(rel, Formula::conj(a)));
            continue;
        }
        for_each_subset(static_cast<int>(a.size()), n, [&](const std::vector<int>& idx) {
            std::vector<Formula> q;
            for (int k : idx) q.push_back(a[k]);
            out.insert(Formula::dia(rel, Formula::conj(q)));
            if (out.size() > kNormalFormCap) throw CapError("fun_n normal form set exceeds the cap");
        });
    }
    return out;
}

std::set<Formula> nf_equiv(const Formula& f, int n, Sym rel) {
    auto t = tree_model(f);
    std::set<Formula> out;
    std::vector<std::vector<Formula>> at(t.size());
    for (auto& [v, s] : t.model.val)
        for_each_bit(s, [&](int w) { at[w].push_back(Formula::var(v)); });
    for (auto& v : at[t.root]) out.insert(v);
    for (int x = 0; x < t.size(); ++x) {
        int m = static_cast<int>(at[x].size());
        for (int k = 0; k <= std::min(n, m); ++k)
            for_each_subset(m, k, [&](const std::vector<int>& idx) {
                std::vector<Formula> q;
                for (int j : idx) q.push_back(at[x][j]);
                out.insert(Formula::dia(rel, Formula::conj(q)));
            });
    }
    return out;
}

std::set<Formula> nf_lin(const Formula& f, Sym rel) {
    std::vector<Formula> vars, bodies;
    split_top(f, vars, bodies);
    Formula head = Formula::conj(vars);
    if (bodies.empty()) return {head};
    std::set<Formula> out;
    for (auto& b : bodies)
        for (auto& tau : nf_lin(b, rel)) out.insert(Formula::conj(head, Formula::dia(rel, tau)));
    return out;
}

ProfileSet profiles(std::initializer_list<const char*> names, Sym rel) {
    ProfileSet pi;
    for (auto n : names) pi.push_back(named_profile(n, rel));
    return pi;
}

} // namespace

NormalFormSet normal_forms(const Formula& f, NfTheory theory, int n) {
    require_bot_free(f);
    Sym rel = single_relation(relations_of(f));
    std::set<Formula> forms;
    switch (theory) {
    case NfTheory::FunN:
        if (n < 1) throw PreconditionError("fun_n needs n >= 1");
        forms = nf_fun(f, n, rel);
        break;
    case NfTheory::EquivN:
        if (n < 1) throw PreconditionError("equiv_n needs n >= 1");
        forms = nf_equiv(f, n, rel);
        break;
    case NfTheory::Lin:
        forms = nf_lin(f, rel);
        break;
    }
    return {std::vector<Formula>(forms.begin(), forms.end()), theory, n};
}

bool decide_fun_n(const Implication& i, int n) {
    if (n < 1) throw PreconditionError("decide_fun_n needs n >= 1");
    single_relation(relations_of(i));
    if (contains_bot(i.lhs)) return true;
    for (auto& beta : normal_forms(i.rhs, NfTheory::FunN, n).forms)
        if (!kr_valid({i.lhs, beta})) return false;
    return true;
}

bool decide_equiv_n(const Implication& i, int n) {
    if (n < 2) throw PreconditionError("decide_equiv_n needs n >= 2");
    Sym rel = single_relation(relations_of(i));
    if (contains_bot(i.lhs)) return true;
    auto pi = profiles({"refl", "trans", "sym"}, rel);
    for (auto& beta : normal_forms(i.rhs, NfTheory::EquivN, n).forms)
        if (!horn_entails(pi, {i.lhs, beta})) return false;
    return true;
}

bool decide_lin(const Implication& i) {
    Sym rel = single_relation(relations_of(i));
    if (contains_bot(i.lhs)) return true;
    auto pi = profiles({"refl", "trans"}, rel);
    for (auto& beta : normal_forms(i.rhs, NfTheory::Lin).forms)
        if (!horn_entails(pi, {i.lhs, beta})) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Linearisations

namespace {

void rt_close(Frame& fr, Sym rel) {
    int n = fr.size();
    std::vector<PSet> s(n);
    for (int a = 0; a < n; ++a) s[a] = fr.succ(rel, a) | bit(a);
    for (int k = 0; k < n; ++k)
        for (int a = 0; a < n; ++a)
            if (has(s[a], k)) s[a] |= s[k];
    for (int a = 0; a < n; ++a) fr.set_succ(rel, a, s[a]);
}

void linearise(const KripkeModel& m, Sym rel, int root, const std::function<bool(const KripkeModel&)>& fn,
               bool& stop) {
    if (stop) return;
    auto d = find_defect(m.frame, rel, root);
    if (!d) {
        if (!fn(m)) stop = true;
        return;
    }
    KripkeModel left = m;
    left.frame.remove_edge(rel, d->u, d->right);
    left.frame.add_edge(rel, d->left, d->right);
    rt_close(left.frame, rel);
    linearise(left, rel, root, fn, stop);

    KripkeModel right = m;
    right.frame.remove_edge(rel, d->u, d->left);
    right.frame.add_edge(rel, d->right, d->left);
    rt_close(right.frame, rel);
    linearise(right, rel, root, fn, stop);
}

} // namespace

std::optional<RDefect> find_defect(const Frame& fr, Sym rel, int root) {
    int n = fr.size();
    std::vector<int> preds(n);
    for (int u = 0; u < n; ++u) preds[u] = popcount(fr.pred(rel, u) & ~bit(u));
    std::vector<int> order(n);
    for (int u = 0; u < n; ++u) order[u] = u;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if ((a == root) != (b == root)) return a == root;
        return preds[a] < preds[b];
    });
    for (int u : order) {
        PSet s = fr.succ(rel, u) & ~bit(u);
        for (int l = 0; l < n; ++l) {
            if (!has(s, l)) continue;
            for (int r = l + 1; r < n; ++r)
                if (has(s, r) && !fr.edge(rel, l, r) && !fr.edge(rel, r, l)) return RDefect{u, l, r};
        }
    }
    return std::nullopt;
}

void for_each_linearisation(const TreeModel& t, const std::function<bool(const KripkeModel&)>& fn) {
    std::set<Sym> rels;
    for (int k = 0; k < t.size(); ++k)
        if (t.parent[k] >= 0) rels.insert(t.parent_rel[k]);
    Sym rel = single_relation(rels);
    KripkeModel m = t.model;
    m.frame.declare(rel);
    rt_close(m.frame, rel);
    bool stop = false;
    linearise(m, rel, t.root, fn, stop);
}

std::vector<KripkeModel> linearisations(const TreeModel& t) {
    std::vector<KripkeModel> out;
    for_each_linearisation(t, [&](const KripkeModel& m) {
        out.push_back(m);
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Oracles

std::optional<Refutation> refute_on_frame(const Frame& fr, const Implication& i) {
    if (contains_bot(i.lhs)) return std::nullopt;
    auto lt = tree_model(i.lhs);
    std::optional<Refutation> found;
    for_each_hom(lt.model.frame, fr, {}, [&](const HomMap& h) {
        KripkeModel m{fr, {}};
        for (auto& [v, s] : lt.model.val) {
            PSet img = 0;
            for_each_bit(s, [&](int k) { img |= bit(h[k]); });
            m.val[v] = img;
        }
        for (Sym v : vars_of(i.rhs)) m.val.try_emplace(v, 0);
        if (contains_bot(i.rhs) || !satisfies(m, h[lt.root], i.rhs)) {
            found = Refutation{std::move(m), h[lt.root]};
            return false;
        }
        return true;
    });
    return found;
}

KrVerdict brute_force_kr(const std::vector<Implication>& sigma, const Implication& i, int max_points) {
    std::set<Sym> rs = relations_of(i);
    for (auto& s : sigma) {
        auto r = relations_of(s);
        rs.insert(r.begin(), r.end());
    }
    if (rs.empty()) rs.insert(kR);
    std::vector<Sym> rels(rs.begin(), rs.end());

    KrVerdict out;
    out.bound = max_points;
    for (int n = 1; n <= max_points; ++n) {
        long bits = static_cast<long>(rels.size()) * n * n;
        if (bits > 22) throw CapError("brute_force_kr: more than 2^22 frames with " + std::to_string(n) + " points");
        std::uint64_t total = std::uint64_t{1} << bits;
        for (std::uint64_t code = 0; code < total; ++code) {
            Frame fr(n);
            int b = 0;
            for (Sym r : rels) {
                fr.declare(r);
                for (int a = 0; a < n; ++a) {
                    fr.set_succ(r, a, (code >> b) & full_set(n));
                    b += n;
                }
            }
            ++out.frames_checked;
            bool ok = std::all_of(sigma.begin(), sigma.end(), [&](const Implication& s) { return frame_validates(fr, s); });
            if (!ok) continue;
            if (auto ref = refute_on_frame(fr, i)) {
                out.holds = false;
                out.countermodel = std::move(ref);
                return out;
            }
        }
    }
    return out;
}

SloVerdict brute_force_slo(const std::vector<Implication>& sigma, const Implication& i, int max_elems) {
    std::set<Sym> rs = relations_of(i);
    bool bot = contains_bot(i.lhs) || contains_bot(i.rhs);
    for (auto& s : sigma) {
        auto r = relations_of(s);
        rs.insert(r.begin(), r.end());
        bot = bot || contains_bot(s.lhs) || contains_bot(s.rhs);
    }
    if (rs.empty()) rs.insert(kR);
    SloVerdict out;
    out.bound = max_elems;
    for_each_slo(max_elems, std::vector<Sym>(rs.begin(), rs.end()), bot, [&](const FiniteSLO& a) {
        ++out.algebras_checked;
        if (!slo_validates(a, sigma)) return true;
        if (auto v = slo_refutation(a, i)) {
            out.holds = false;
            out.algebra = a;
            out.valuation = *v;
            return false;
        }
        return true;
    });
    return out;
}

// ---------------------------------------------------------------------------
// Generators

AxiomFamily axiom_family_from_name(const std::string& name) {
    if (name == "fun_n" || name == "fun") return AxiomFamily::FunN;
    if (name == "depth_n" || name == "depth") return AxiomFamily::DepthN;
    if (name == "width_n" || name == "width") return AxiomFamily::WidthN;
    if (name == "equiv_n_theory" || name == "equiv") return AxiomFamily::EquivNTheory;
    if (name == "lin_theory" || name == "lin") return AxiomFamily::LinTheory;
    throw Error("unknown axiom family '" + name + "'");
}

std::string axiom_family_name(AxiomFamily f) {
    switch (f) {
    case AxiomFamily::FunN: return "fun_n";
    case AxiomFamily::DepthN: return "depth_n";
    case AxiomFamily::WidthN: return "width_n";
    case AxiomFamily::EquivNTheory: return "equiv_n_theory";
    case AxiomFamily::LinTheory: return "lin_theory";
    }
    return "?";
}

namespace {

Implication fun_n(int n) {
    std::vector<Formula> p;
    for (int k = 0; k <= n; ++k) p.push_back(Formula::var("p" + std::to_string(k)));
    std::vector<Formula> lhs;
    for_each_subset(n + 1, n, [&](const std::vector<int>& idx) {
        std::vector<Formula> q;
        for (int k : idx) q.push_back(p[k]);
        lhs.push_back(Formula::dia(kR, Formula::conj(q)));
    });
    return {Formula::conj(lhs), Formula::dia(kR, Formula::conj(p))};
}

// q & <>(p & <>(q & ...)) with k diamonds, the innermost body a bare variable.
Formula zigzag(int k) {
    Formula p = Formula::var("p"), q = Formula::var("q");
    Formula f = k % 2 == 0 ? q : p;
    for (int level = k - 1; level >= 0; --level) f = Formula::conj(level % 2 == 0 ? q : p, Formula::dia(kR, f));
    return f;
}

Implication depth_n(int n) {
    Formula chain = zigzag(n + 1);  // q & <>(p & ... ) with n+1 diamonds
    // The left side stops one diamond earlier; the right side drops the outer q.
    return {zigzag(n), chain.conjuncts().back()};
}

Implication width_n(int n) {
    Formula p = Formula::var("p");
    std::vector<Formula> ps;
    for (int k = 0; k <= n; ++k) ps.push_back(Formula::var(nth_var(k + 1)));
    std::vector<Formula> lhs, tails{p};
    for (int i = 0; i <= n; ++i) {
        std::vector<Formula> rest{p};
        for (int k = 0; k <= n; ++k)
            if (k != i) rest.push_back(ps[k]);
        lhs.push_back(Formula::dia(kR, Formula::conj(rest)));
        tails.push_back(Formula::dia(kR, ps[i]));
    }
    return {Formula::conj(lhs), Formula::dia(kR, Formula::conj(tails))};
}

} // namespace

std::vector<Implication> gen_axiom(AxiomFamily family, int n) {
    if (n < 1) throw PreconditionError("gen_axiom needs n >= 1");
    switch (family) {
    case AxiomFamily::FunN: return {fun_n(n)};
    case AxiomFamily::DepthN: return {depth_n(n)};
    case AxiomFamily::WidthN: return {width_n(n)};
    case AxiomFamily::EquivNTheory:
        return {iota_of_profile(named_profile("refl")), iota_of_profile(named_profile("trans")),
                iota_of_profile(named_profile("sym")), fun_n(n)};
    case AxiomFamily::LinTheory:
        return {iota_of_profile(named_profile("refl")), iota_of_profile(named_profile("trans")), width_n(1)};
    }
    return {};
}

// ---------------------------------------------------------------------------
// Probe

std::vector<Formula> enumerate_formulas(int vars, int max_dias, int depth, Sym rel) {
    std::vector<Formula> heads;
    for (unsigned mask = 0; mask < (1U << vars); ++mask) {
        std::vector<Formula> ps;
        for (int k = 0; k < vars; ++k)
            if (mask >> k & 1U) ps.push_back(Formula::var(nth_var(k)));
        heads.push_back(Formula::conj(ps));
    }
    if (depth == 0 || max_dias == 0) return heads;

    auto inner = enumerate_formulas(vars, max_dias - 1, depth - 1, rel);
    std::vector<std::pair<Formula, int>> terms;  // diamond term and its diamond count
    for (auto& g : inner) terms.push_back({Formula::dia(rel, g), g.tree_size()});

    std::set<Formula> out;
    std::vector<Formula> chosen;
    std::function<void(std::size_t, int)> rec = [&](std::size_t from, int budget) {
        for (auto& h : heads) {
            auto parts = chosen;
            parts.push_back(h);
            out.insert(Formula::conj(parts));
        }
        for (std::size_t k = from; k < terms.size(); ++k) {
            if (terms[k].second > budget) continue;
            chosen.push_back(terms[k].first);
            rec(k + 1, budget - terms[k].second);
            chosen.pop_back();
        }
    };
    rec(0, max_dias);
    std::vector<Formula> v(out.begin(), out.end());
    std::stable_sort(v.begin(), v.end(), [](const Formula& a, const Formula& b) { return a.tree_size() < b.tree_size(); });
    return v;
}

std::vector<ProbeWitness> completeness_probe(const std::vector<Implication>& sigma, const ProbeOptions& opt) {
    std::set<Sym> rs;
    for (auto& s : sigma) {
        auto r = relations_of(s);
        rs.insert(r.begin(), r.end());
    }
    Sym rel = single_relation(rs);

    // Frames and algebras for sigma are computed once.
    std::vector<Frame> frames;
    for (int n = 1; n <= opt.frame_points; ++n) {
        long bits = static_cast<long>(n) * n;
        if (bits > 22) throw CapError("completeness_probe: frame bound too large");
        for (std::uint64_t code = 0; code < (std::uint64_t{1} << bits); ++code) {
            Frame fr(n);
            fr.declare(rel);
            for (int a = 0; a < n; ++a) fr.set_succ(rel, a, (code >> (a * n)) & full_set(n));
            if (std::all_of(sigma.begin(), sigma.end(), [&](const Implication& s) { return frame_validates(fr, s); }))
                frames.push_back(std::move(fr));
        }
    }
    std::vector<FiniteSLO> algebras;
    for_each_slo(opt.algebra_elems, {rel}, false, [&](const FiniteSLO& a) {
        if (slo_validates(a, sigma)) algebras.push_back(a);
        return true;
    });

    auto lhs = enumerate_formulas(opt.vars, opt.lhs_dias, opt.depth, rel);
    auto rhs = enumerate_formulas(opt.vars, opt.rhs_dias, opt.depth, rel);
    std::vector<ProbeWitness> out;
    for (auto& l : lhs)
        for (auto& r : rhs) {
            Implication i{l, r};
            if (kr_valid(i)) continue;
            bool holds = std::all_of(frames.begin(), frames.end(), [&](const Frame& f) { return frame_validates(f, i); });
            if (!holds) continue;
            for (auto& a : algebras)
                if (auto v = slo_refutation(a, i)) {
                    out.push_back({i, a, *v});
                    break;
                }
            if (static_cast<int>(out.size()) >= opt.max_witnesses) return out;
        }
    return out;
}

} // namespace spikit
