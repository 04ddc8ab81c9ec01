#include "spikit/kripke.hpp"

#include <algorithm>
#include <numeric>

#include "spikit/text.hpp"

namespace spikit {

Frame::Frame(int n) {
    for (int i = 0; i < n; ++i) add_point();
}

int Frame::add_point(std::string name) {
    if (n_ >= kMaxPoints) throw CapError("frames are limited to 64 points");
    if (name.empty()) name = "w" + std::to_string(n_);
    names_.push_back(std::move(name));
    for (auto& [r, rows] : rels_) rows.push_back(0);
    return n_++;
}

int Frame::find(std::string_view name) const {
    for (int i = 0; i < n_; ++i)
        if (names_[i] == name) return i;
    return -1;
}

int Frame::index_of(std::string_view name) const {
    int i = find(name);
    if (i < 0) throw Error("unknown point '" + std::string(name) + "'");
    return i;
}

int Frame::slot(Sym rel) const {
    for (std::size_t i = 0; i < rels_.size(); ++i)
        if (rels_[i].first == rel) return static_cast<int>(i);
    return -1;
}

void Frame::declare(Sym rel) {
    if (slot(rel) < 0) rels_.emplace_back(rel, std::vector<PSet>(n_, 0));
}

void Frame::add_edge(Sym rel, int from, int to) {
    if (from < 0 || from >= n_ || to < 0 || to >= n_) throw Error("edge endpoint out of range");
    declare(rel);
    rels_[slot(rel)].second[from] |= bit(to);
}

void Frame::remove_edge(Sym rel, int from, int to) {
    int s = slot(rel);
    if (s >= 0) rels_[s].second[from] &= ~bit(to);
}

PSet Frame::succ(Sym rel, int from) const {
    int s = slot(rel);
    return s < 0 ? 0 : rels_[s].second[from];
}

PSet Frame::pred(Sym rel, int to) const {
    int s = slot(rel);
    if (s < 0) return 0;
    PSet out = 0;
    for (int i = 0; i < n_; ++i)
        if (has(rels_[s].second[i], to)) out |= bit(i);
    return out;
}

PSet Frame::dia_plus(Sym rel, PSet x) const {
    int s = slot(rel);
    if (s < 0 || !x) return 0;
    PSet out = 0;
    const auto& rows = rels_[s].second;
    for (int i = 0; i < n_; ++i)
        if (rows[i] & x) out |= bit(i);
    return out;
}

void Frame::set_succ(Sym rel, int from, PSet s) {
    declare(rel);
    rels_[slot(rel)].second[from] = s & all();
}

std::vector<Sym> Frame::relations() const {
    std::vector<Sym> out;
    for (auto& [r, rows] : rels_) out.push_back(r);
    return out;
}

int Frame::edge_count() const {
    int c = 0;
    for (auto& [r, rows] : rels_)
        for (PSet s : rows) c += popcount(s);
    return c;
}

std::vector<std::pair<int, int>> Frame::edges(Sym rel) const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n_; ++i) for_each_bit(succ(rel, i), [&](int j) { out.emplace_back(i, j); });
    return out;
}

bool operator==(const Frame& a, const Frame& b) {
    if (a.n_ != b.n_) return false;
    auto rels = a.relations();
    for (Sym r : b.relations()) rels.push_back(r);
    for (Sym r : rels)
        for (int i = 0; i < a.n_; ++i)
            if (a.succ(r, i) != b.succ(r, i)) return false;
    return true;
}

bool subframe_edges(const Frame& a, const Frame& b) {
    if (a.n_ != b.n_) return false;
    for (Sym r : a.relations())
        for (int i = 0; i < a.n_; ++i)
            if (a.succ(r, i) & ~b.succ(r, i)) return false;
    return true;
}

// ---------------------------------------------------------------------------

PSet truth_set(const KripkeModel& m, const Formula& f) {
    switch (f.kind()) {
    case Kind::Top: return m.frame.all();
    case Kind::Bot: return 0;
    case Kind::Var: return m.val_of(f.sym()) & m.frame.all();
    case Kind::And: {
        PSet s = m.frame.all();
        for (auto& a : f.args()) {
            s &= truth_set(m, a);
            if (!s) break;
        }
        return s;
    }
    case Kind::Dia: return m.frame.dia_plus(f.sym(), truth_set(m, f.body()));
    }
    return 0;
}

bool satisfies(const KripkeModel& m, int w, const Formula& f) {
    if (w < 0 || w >= m.frame.size()) throw Error("unknown point " + std::to_string(w));
    return has(truth_set(m, f), w);
}

namespace {

void build_tree(TreeModel& t, const Formula& f, int node) {
    for (const auto& c : f.conjuncts()) {
        switch (c.kind()) {
        case Kind::Var: t.model.val[c.sym()] |= bit(node); break;
        case Kind::Dia: {
            int k = t.model.frame.add_point("t" + std::to_string(t.model.frame.size()));
            t.parent.push_back(node);
            t.parent_rel.push_back(c.sym());
            t.origin.push_back(-1);
            t.model.frame.add_edge(c.sym(), node, k);
            build_tree(t, c.body(), k);
            break;
        }
        case Kind::Bot: throw PreconditionError("tree_model: formula contains bot");
        default: break;
        }
    }
}

// Topological check from root; throws on cycles or unreachable points.
void check_rooted_acyclic(const Frame& fr, int root) {
    int n = fr.size();
    if (root < 0 || root >= n) throw Error("root out of range");
    std::vector<int> state(n, 0);
    PSet seen = 0;
    auto rels = fr.relations();
    std::function<void(int)> dfs = [&](int w) {
        state[w] = 1;
        seen |= bit(w);
        for (Sym r : rels) {
            PSet s = fr.succ(r, w);
            for_each_bit(s, [&](int v) {
                if (state[v] == 1) throw PreconditionError("cycle detected at point " + fr.name(v));
                if (state[v] == 0) dfs(v);
            });
        }
        state[w] = 2;
    };
    dfs(root);
    if (seen != fr.all()) throw PreconditionError("model is not rooted at " + fr.name(root));
}

} // namespace

TreeModel tree_model(const Formula& f) {
    TreeModel t;
    t.model.frame.add_point("t0");
    t.parent.push_back(-1);
    t.parent_rel.push_back(0);
    t.origin.push_back(-1);
    t.root = 0;
    build_tree(t, f, 0);
    return t;
}

Formula formula_of(const KripkeModel& m, int root) {
    check_rooted_acyclic(m.frame, root);
    std::vector<std::optional<Formula>> memo(m.frame.size());
    auto rels = m.frame.relations();
    std::function<Formula(int)> go = [&](int w) -> Formula {
        if (memo[w]) return *memo[w];
        std::vector<Formula> parts;
        for (auto& [v, s] : m.val)
            if (has(s, w)) parts.push_back(Formula::var(v));
        for (Sym r : rels) for_each_bit(m.frame.succ(r, w), [&](int u) { parts.push_back(Formula::dia(r, go(u))); });
        memo[w] = Formula::conj(std::move(parts));
        return *memo[w];
    };
    return go(root);
}

TreeModel unravel(const KripkeModel& m, int root) {
    check_rooted_acyclic(m.frame, root);
    TreeModel t;
    auto rels = m.frame.relations();
    std::function<int(int, int, Sym)> go = [&](int w, int par, Sym rel) -> int {
        int k = t.model.frame.add_point("t" + std::to_string(t.model.frame.size()));
        t.parent.push_back(par);
        t.parent_rel.push_back(rel);
        t.origin.push_back(w);
        if (par >= 0) t.model.frame.add_edge(rel, par, k);
        for (auto& [v, s] : m.val)
            if (has(s, w)) t.model.val[v] |= bit(k);
        for (Sym r : rels) for_each_bit(m.frame.succ(r, w), [&](int u) { go(u, k, r); });
        return k;
    };
    t.root = go(root, -1, 0);
    return t;
}

std::optional<TreeModel> as_tree(const KripkeModel& m, int root) {
    const Frame& fr = m.frame;
    int n = fr.size();
    std::vector<int> indeg(n, 0);
    auto rels = fr.relations();
    for (Sym r : rels)
        for (int i = 0; i < n; ++i) for_each_bit(fr.succ(r, i), [&](int j) { ++indeg[j]; });
    if (indeg[root] != 0) return std::nullopt;
    for (int i = 0; i < n; ++i)
        if (i != root && indeg[i] != 1) return std::nullopt;
    // BFS renumbering so that parents come first.
    TreeModel t;
    std::vector<int> newid(n, -1);
    std::vector<int> queue{root};
    newid[root] = 0;
    t.model.frame.add_point(fr.name(root));
    t.parent.push_back(-1);
    t.parent_rel.push_back(0);
    t.origin.push_back(root);
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
        int w = queue[qi];
        for (Sym r : rels) {
            for_each_bit(fr.succ(r, w), [&](int u) {
                if (newid[u] >= 0) return;
                newid[u] = t.model.frame.add_point(fr.name(u));
                t.parent.push_back(newid[w]);
                t.parent_rel.push_back(r);
                t.origin.push_back(u);
                t.model.frame.add_edge(r, newid[w], newid[u]);
                queue.push_back(u);
            });
        }
    }
    if (static_cast<int>(queue.size()) != n) return std::nullopt;
    for (auto& [v, s] : m.val)
        for_each_bit(s, [&](int w) { t.model.val[v] |= bit(newid[w]); });
    return t;
}

// ---------------------------------------------------------------------------
// Homomorphisms

bool for_each_hom(const Frame& src, const Frame& tgt, const std::vector<PSet>& allowed,
                  const std::function<bool(const HomMap&)>& fn) {
    int n = src.size();
    if (n == 0) return fn({});
    struct Edge {
        Sym rel;
        int other;
        bool out;  // true: x -> other, false: other -> x
    };
    std::vector<std::vector<Edge>> adj(n);
    for (Sym r : src.relations())
        for (int i = 0; i < n; ++i)
            for_each_bit(src.succ(r, i), [&](int j) {
                adj[i].push_back({r, j, true});
                if (j != i) adj[j].push_back({r, i, false});
            });
    std::vector<PSet> dom(n);
    for (int i = 0; i < n; ++i) dom[i] = (allowed.empty() || allowed[i] == ~PSet{0}) ? tgt.all() : allowed[i] & tgt.all();

    // Variable order: smallest domain first, then the point with most edges to
    // already ordered points, ties by out-degree.
    std::vector<int> order;
    std::vector<bool> placed(n, false);
    for (int k = 0; k < n; ++k) {
        int best = -1;
        long best_key = -1;
        for (int i = 0; i < n; ++i) {
            if (placed[i]) continue;
            long linked = 0, outdeg = 0;
            for (auto& e : adj[i]) {
                if (placed[e.other]) ++linked;
                if (e.out) ++outdeg;
            }
            long key = (k == 0 ? (64 - popcount(dom[i])) * 10000L : linked * 10000L) + outdeg * 10 + (popcount(dom[i]) == 1);
            if (key > best_key) best_key = key, best = i;
        }
        placed[best] = true;
        order.push_back(best);
    }

    // Transposed target rows, computed once per relation used.
    std::map<Sym, std::vector<PSet>> tpred;
    for (Sym r : src.relations()) {
        std::vector<PSet> rows(tgt.size(), 0);
        for (int t = 0; t < tgt.size(); ++t) for_each_bit(tgt.succ(r, t), [&](int u) { rows[u] |= bit(t); });
        tpred[r] = std::move(rows);
    }

    HomMap h(n, -1);
    std::function<bool(int)> go = [&](int k) -> bool {
        if (k == n) return fn(h);
        int x = order[k];
        PSet cand = dom[x];
        for (auto& e : adj[x]) {
            if (e.other == x) {
                // loop: the image must carry a loop
                PSet loops = 0;
                for_each_bit(cand, [&](int t) {
                    if (tgt.edge(e.rel, t, t)) loops |= bit(t);
                });
                cand &= loops;
                continue;
            }
            int y = h[e.other];
            if (y < 0) continue;
            cand &= e.out ? tpred[e.rel][y] : tgt.succ(e.rel, y);
        }
        bool cont = true;
        for_each_bit(cand, [&](int t) {
            if (!cont) return;
            h[x] = t;
            cont = go(k + 1);
        });
        h[x] = -1;
        return cont;
    };
    return go(0);
}

std::vector<PSet> tree_candidates(const TreeModel& t, const Frame& tgt, const std::vector<PSet>& allowed) {
    int n = t.size();
    std::vector<PSet> cand(n);
    for (int i = 0; i < n; ++i) cand[i] = allowed.empty() ? tgt.all() : allowed[i] & tgt.all();
    for (int i = n - 1; i >= 1; --i) cand[t.parent[i]] &= tgt.dia_plus(t.parent_rel[i], cand[i]);
    return cand;
}

namespace {

std::vector<PSet> label_constraints(const KripkeModel& src, const KripkeModel& tgt) {
    std::vector<PSet> allowed(src.frame.size(), tgt.frame.all());
    for (auto& [v, s] : src.val) {
        PSet img = tgt.val_of(v);
        for_each_bit(s & src.frame.all(), [&](int i) { allowed[i] &= img; });
    }
    return allowed;
}

} // namespace

std::optional<HomMap> find_homomorphism(const TreeModel& src, const KripkeModel& tgt, std::pair<int, int> anchor) {
    if (anchor.first != src.root) return find_homomorphism(src.model, tgt, anchor);
    auto allowed = label_constraints(src.model, tgt);
    allowed[src.root] &= bit(anchor.second);
    auto cand = tree_candidates(src, tgt.frame, allowed);
    if (!has(cand[src.root], anchor.second)) return std::nullopt;
    HomMap h(src.size(), -1);
    h[src.root] = anchor.second;
    for (int i = 0; i < src.size(); ++i) {
        if (i == src.root) continue;
        PSet c = tgt.frame.succ(src.parent_rel[i], h[src.parent[i]]) & cand[i];
        h[i] = std::countr_zero(c);
    }
    return h;
}

std::optional<HomMap> find_homomorphism(const KripkeModel& src, const KripkeModel& tgt, std::pair<int, int> anchor) {
    auto allowed = label_constraints(src, tgt);
    allowed[anchor.first] &= bit(anchor.second);
    std::optional<HomMap> found;
    for_each_hom(src.frame, tgt.frame, allowed, [&](const HomMap& h) {
        found = h;
        return false;
    });
    return found;
}

bool is_frame_homomorphism(const Frame& src, const Frame& tgt, const HomMap& h) {
    if (static_cast<int>(h.size()) != src.size()) return false;
    for (int x : h)
        if (x < 0 || x >= tgt.size()) return false;
    for (Sym r : src.relations())
        for (auto [a, b] : src.edges(r))
            if (!tgt.edge(r, h[a], h[b])) return false;
    return true;
}

bool is_homomorphism(const KripkeModel& src, const KripkeModel& tgt, const HomMap& h) {
    if (!is_frame_homomorphism(src.frame, tgt.frame, h)) return false;
    for (auto& [v, s] : src.val) {
        bool ok = true;
        for_each_bit(s & src.frame.all(), [&](int i) { ok &= has(tgt.val_of(v), h[i]); });
        if (!ok) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Validity

bool kr_valid(const Implication& i) {
    if (contains_bot(i.lhs)) return true;
    if (contains_bot(i.rhs)) return false;
    auto t = tree_model(i.lhs);
    return satisfies(t.model, t.root, i.rhs);
}

namespace {

// Enumerates homomorphisms of a tree into fr with the root inside roots.
template <class F>
bool for_each_tree_hom(const TreeModel& t, const Frame& fr, PSet roots, F&& fn) {
    int n = t.size();
    HomMap h(n, -1);
    std::function<bool(int)> go = [&](int i) -> bool {
        if (i == n) return fn(h);
        PSet cand = fr.succ(t.parent_rel[i], h[t.parent[i]]);
        bool cont = true;
        for_each_bit(cand, [&](int x) {
            if (!cont) return;
            h[i] = x;
            cont = go(i + 1);
        });
        return cont;
    };
    bool cont = true;
    for_each_bit(roots, [&](int w) {
        if (!cont) return;
        h[0] = w;
        cont = go(1);
    });
    return cont;
}

bool validates_from(const Frame& fr, const Implication& i, PSet roots) {
    if (contains_bot(i.lhs)) return true;
    auto lt = tree_model(i.lhs);
    if (contains_bot(i.rhs)) {
        // rhs is never true, so i holds iff the lhs is never satisfied.
        auto cand = tree_candidates(lt, fr, {});
        return (cand[0] & roots) == 0;
    }
    auto rt = tree_model(i.rhs);
    std::vector<std::pair<Sym, PSet>> lhs_labels(lt.model.val.begin(), lt.model.val.end());
    return for_each_tree_hom(lt, fr, roots, [&](const HomMap& f) {
        std::vector<PSet> allowed(rt.size(), fr.all());
        for (auto& [v, s] : rt.model.val) {
            PSet img = 0;
            for_each_bit(lt.model.val_of(v), [&](int k) { img |= bit(f[k]); });
            for_each_bit(s, [&](int u) { allowed[u] &= img; });
        }
        auto cand = tree_candidates(rt, fr, allowed);
        return has(cand[0], f[0]);
    });
}

} // namespace

bool frame_validates(const Frame& fr, const Implication& i) { return validates_from(fr, i, fr.all()); }

bool frame_validates_at(const Frame& fr, const Implication& i, int w) { return validates_from(fr, i, bit(w)); }

bool model_validates(const KripkeModel& m, const Implication& i) {
    return (truth_set(m, i.lhs) & ~truth_set(m, i.rhs)) == 0;
}

bool frame_validates_rule(const Frame& fr, const Rule& r) {
    std::set<Sym> vs = vars_of(r.conclusion);
    for (auto& p : r.premises) {
        auto v = vars_of(p);
        vs.insert(v.begin(), v.end());
    }
    std::vector<Sym> vars(vs.begin(), vs.end());
    long bits = static_cast<long>(vars.size()) * fr.size();
    if (bits > 24) throw CapError("rule validity: too many valuations to enumerate");
    KripkeModel m{fr, {}};
    std::uint64_t total = std::uint64_t{1} << bits;
    for (std::uint64_t code = 0; code < total; ++code) {
        for (std::size_t k = 0; k < vars.size(); ++k)
            m.val[vars[k]] = (code >> (k * fr.size())) & fr.all();
        bool prem = std::all_of(r.premises.begin(), r.premises.end(),
                                [&](const Implication& p) { return model_validates(m, p); });
        if (prem && !model_validates(m, r.conclusion)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Text format

PSet parse_set(const Frame& fr, std::string_view s) {
    std::string body(text::trim(s));
    if (!body.empty() && body.front() == '{') {
        if (body.back() != '}') throw ParseError("unterminated point set", body.size());
        body = body.substr(1, body.size() - 2);
    }
    PSet out = 0;
    for (auto& tok : text::split(body, ", \t")) out |= bit(fr.index_of(tok));
    return out;
}

std::string render_set(const Frame& fr, PSet s) {
    std::vector<std::string> names;
    for_each_bit(s, [&](int i) { names.push_back(fr.name(i)); });
    return "{" + text::join(names, ",") + "}";
}

KripkeModel parse_model(const std::string& src) {
    KripkeModel m;
    bool have_points = false;
    std::size_t offset = 0;
    for (auto& line : text::lines(src)) {
        std::size_t here = offset;
        offset += line.size() + 1;
        if (line.empty()) continue;
        auto [key, value] = text::key_value(line);
        if (key.empty()) throw ParseError("expected 'key: value'", here);
        if (key == "points") {
            for (auto& p : text::split(value, ", \t")) {
                if (m.frame.find(p) >= 0) throw ParseError("duplicate point '" + p + "'", here);
                m.frame.add_point(p);
            }
            have_points = true;
        } else if (text::starts_with(key, "val ")) {
            if (!have_points) throw ParseError("'points:' must come first", here);
            Sym v = intern(text::trim(key.substr(4)));
            m.val[v] |= parse_set(m.frame, value);
        } else if (std::isupper(static_cast<unsigned char>(key[0]))) {
            if (!have_points) throw ParseError("'points:' must come first", here);
            Sym r = intern(key);
            m.frame.declare(r);
            for (auto& e : text::split(value, ",")) {
                auto arrow = e.find("->");
                if (arrow == std::string::npos) throw ParseError("expected 'a->b' in '" + e + "'", here);
                int a = m.frame.find(text::trim(std::string_view(e).substr(0, arrow)));
                int b = m.frame.find(text::trim(std::string_view(e).substr(arrow + 2)));
                if (a < 0 || b < 0) throw ParseError("unknown point in edge '" + e + "'", here);
                m.frame.add_edge(r, a, b);
            }
        } else {
            throw ParseError("unknown key '" + key + "'", here);
        }
    }
    if (!have_points) throw ParseError("missing 'points:' line", 0);
    return m;
}

Frame parse_frame(const std::string& src) { return parse_model(src).frame; }

std::string render_frame(const Frame& fr) {
    std::vector<std::string> pts;
    for (int i = 0; i < fr.size(); ++i) pts.push_back(fr.name(i));
    std::string out = "points: " + text::join(pts, " ") + "\n";
    auto rels = fr.relations();
    std::sort(rels.begin(), rels.end(), [](Sym a, Sym b) { return name_of(a) < name_of(b); });
    for (Sym r : rels) {
        std::vector<std::string> es;
        for (auto [a, b] : fr.edges(r)) es.push_back(fr.name(a) + "->" + fr.name(b));
        out += name_of(r) + ": " + text::join(es, ", ") + "\n";
    }
    return out;
}

std::string render_model(const KripkeModel& m) {
    std::string out = render_frame(m.frame);
    std::vector<std::pair<std::string, PSet>> vals;
    for (auto& [v, s] : m.val) vals.emplace_back(name_of(v), s);
    std::sort(vals.begin(), vals.end());
    for (auto& [v, s] : vals) {
        std::vector<std::string> names;
        for_each_bit(s, [&](int i) { names.push_back(m.frame.name(i)); });
        out += "val " + v + ": " + text::join(names, " ") + "\n";
    }
    return out;
}

} // namespace spikit
