#include "spikit/horn.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <random>

#include "spikit/random.hpp"
#include "spikit/text.hpp"

namespace spikit {

namespace {

PSet reach_from(const Frame& g, int x) {
    PSet seen = bit(x), frontier = bit(x);
    auto rels = g.relations();
    while (frontier) {
        PSet next = 0;
        for_each_bit(frontier, [&](int w) {
            for (Sym r : rels) next |= g.succ(r, w);
        });
        frontier = next & ~seen;
        seen |= next;
    }
    return seen;
}

// Points strictly reachable from x (paths of length at least one).
PSet strictly_after(const Frame& g, int x) {
    PSet first = 0;
    for (Sym r : g.relations()) first |= g.succ(r, x);
    PSet out = 0;
    for_each_bit(first, [&](int w) { out |= reach_from(g, w); });
    return out;
}

} // namespace

void validate_profile(const Profile& p) {
    int n = p.g.size();
    if (n == 0) throw PreconditionError("profile frame is empty");
    if (p.u < 0 || p.u >= n || p.v < 0 || p.v >= n || p.root < 0 || p.root >= n)
        throw PreconditionError("profile point out of range");
    if (p.g.edge(p.s, p.u, p.v)) throw PreconditionError("profile edge is already present in G");
    if (reach_from(p.g, p.root) != p.g.all()) throw PreconditionError("profile frame is not rooted");
}

ProfileFlags profile_flags(const Profile& p) {
    ProfileFlags f;
    f.tree = as_tree(KripkeModel{p.g, {}}, p.root).has_value();
    f.rooted = p.u == p.root;
    f.leapfrog = p.g.succ(p.s, p.u) == 0;
    f.forward_looking = has(strictly_after(p.g, p.u), p.v);
    return f;
}

Implication iota_of_profile(const Profile& p) {
    auto tm = as_tree(KripkeModel{p.g, {}}, p.root);
    if (!tm) throw PreconditionError("iota_of_profile needs a tree-profile");
    const TreeModel& t = *tm;
    // map original points to tree nodes
    std::vector<int> node(p.g.size());
    for (int i = 0; i < t.size(); ++i) node[t.origin[i]] = i;
    int u = node[p.u], v = node[p.v];

    // path root = y0, ..., y_l = u
    std::vector<int> path;
    for (int x = u; x != 0; x = t.parent[x]) path.push_back(x);
    std::reverse(path.begin(), path.end());

    std::vector<int> var_of(t.size(), -1);
    int next = 0;
    for (int y : path)
        if (var_of[y] < 0) var_of[y] = next++;
    if (var_of[v] < 0) var_of[v] = next++;

    std::vector<Formula> sigma(t.size());
    for (int i = t.size() - 1; i >= 0; --i) {
        std::vector<Formula> parts;
        if (var_of[i] >= 0) parts.push_back(Formula::var(nth_var(var_of[i])));
        for (int j = i + 1; j < t.size(); ++j)
            if (t.parent[j] == i) parts.push_back(Formula::dia(t.parent_rel[j], sigma[j]));
        sigma[i] = Formula::conj(std::move(parts));
    }

    if (path.empty()) return {sigma[0], Formula::dia(p.s, Formula::var(nth_var(var_of[v])))};
    Formula rhs = Formula::conj(Formula::var(nth_var(var_of[u])),
                                Formula::dia(p.s, Formula::var(nth_var(var_of[v]))));
    for (int k = static_cast<int>(path.size()) - 1; k >= 0; --k) {
        int y = path[k];
        if (y != u) rhs = Formula::conj(Formula::var(nth_var(var_of[y])), rhs);
        rhs = Formula::dia(t.parent_rel[y], rhs);
    }
    return {sigma[0], rhs};
}

Implication iota_prime_of_profile(const Profile& p) {
    if (!profile_flags(p).forward_looking)
        throw PreconditionError("iota_prime_of_profile needs a forward-looking profile");
    KripkeModel m{p.g, {}};
    for (int x = 0; x < p.g.size(); ++x) m.val[intern("p" + std::to_string(x + 1))] = bit(x);
    KripkeModel m2 = m;
    m2.frame.add_edge(p.s, p.u, p.v);
    return {formula_of(m, p.root), formula_of(m2, p.root)};
}

// ---------------------------------------------------------------------------
// Closure

Frame closure(const ProfileSet& pi, const Frame& fr, unsigned seed, ClosureStats& stats) {
    Frame f = fr;
    stats = {};
    struct NewEdge {
        Sym rel;
        int a, b;
    };
    std::deque<NewEdge> work;
    std::mt19937 rng(seed);

    auto fire = [&](const Profile& p, const std::vector<PSet>& allowed, std::vector<NewEdge>& out) {
        for_each_hom(p.g, f, allowed, [&](const HomMap& h) {
            if (!f.edge(p.s, h[p.u], h[p.v])) out.push_back({p.s, h[p.u], h[p.v]});
            return true;
        });
    };
    auto commit = [&](std::vector<NewEdge>& found) {
        if (seed) std::shuffle(found.begin(), found.end(), rng);
        for (auto& e : found) {
            if (f.edge(e.rel, e.a, e.b)) continue;
            f.add_edge(e.rel, e.a, e.b);
            ++stats.added;
            work.push_back(e);
        }
    };

    std::vector<NewEdge> found;
    for (const auto& p : pi) {
        found.clear();
        fire(p, {}, found);
        commit(found);
    }
    while (!work.empty()) {
        ++stats.rounds;
        NewEdge e;
        if (seed) {
            std::uniform_int_distribution<std::size_t> pick(0, work.size() - 1);
            auto it = work.begin() + static_cast<long>(pick(rng));
            e = *it;
            work.erase(it);
        } else {
            e = work.front();
            work.pop_front();
        }
        // Re-match only the homomorphisms that send some G-edge onto the new edge.
        for (const auto& p : pi) {
            for (auto [x, y] : p.g.edges(e.rel)) {
                if (x == y && e.a != e.b) continue;
                std::vector<PSet> allowed(p.g.size(), f.all());
                allowed[x] &= bit(e.a);
                allowed[y] &= bit(e.b);
                found.clear();
                fire(p, allowed, found);
                commit(found);
            }
        }
    }
    return f;
}

Frame closure(const ProfileSet& pi, const Frame& fr, unsigned seed) {
    ClosureStats s;
    return closure(pi, fr, seed, s);
}

bool horn_entails(const ProfileSet& pi, const Implication& i) {
    if (contains_bot(i.lhs)) return true;
    if (contains_bot(i.rhs)) return false;
    auto t = tree_model(i.lhs);
    KripkeModel m{closure(pi, t.model.frame), t.model.val};
    return satisfies(m, t.root, i.rhs);
}

// ---------------------------------------------------------------------------
// Stability

StabilityVerdict check_stability(const ProfileSet& pi, int max_tree_size) {
    if (max_tree_size < 1) throw PreconditionError("stability bound must be at least 1");
    StabilityVerdict out;
    out.bound = max_tree_size;
    std::vector<Sym> rels;
    for (auto& p : pi) {
        for (Sym r : p.g.relations())
            if (std::find(rels.begin(), rels.end(), r) == rels.end()) rels.push_back(r);
        if (std::find(rels.begin(), rels.end(), p.s) == rels.end()) rels.push_back(p.s);
    }
    const int nr = static_cast<int>(rels.size());
    for (int n = 1; n <= max_tree_size; ++n) {
        // parent[i] < i and a relation label per non-root node
        std::vector<int> parent(n, 0), label(n, 0);
        std::function<bool(int)> go = [&](int i) -> bool {
            if (i == n) {
                Frame t(n);
                for (Sym r : rels) t.declare(r);
                for (int k = 1; k < n; ++k) t.add_edge(rels[label[k]], parent[k], k);
                Frame c = closure(pi, t);
                for (std::size_t pk = 0; pk < pi.size(); ++pk) {
                    bool found = false;
                    for_each_hom(pi[pk].g, c, {}, [&](const HomMap& h) {
                        if (is_frame_homomorphism(pi[pk].g, t, h)) return true;
                        out.counterexample = true;
                        out.tree = t;
                        out.profile = pk;
                        out.hom = h;
                        found = true;
                        return false;
                    });
                    if (found) return true;
                }
                return false;
            }
            for (int par = 0; par < i; ++par)
                for (int l = 0; l < nr; ++l) {
                    parent[i] = par;
                    label[i] = l;
                    if (go(i + 1)) return true;
                }
            return false;
        };
        if (go(1)) return out;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Presets and text format

Profile named_profile(const std::string& name, Sym r) {
    Profile p;
    p.s = r;
    if (name == "refl") {
        p.g = Frame(1);
        p.g.declare(r);
    } else if (name == "trans") {
        p.g = Frame(3);
        p.g.add_edge(r, 0, 1);
        p.g.add_edge(r, 1, 2);
        p.u = 0;
        p.v = 2;
    } else if (name == "sym") {
        p.g = Frame(2);
        p.g.add_edge(r, 0, 1);
        p.u = 1;
        p.v = 0;
    } else if (name == "eucl") {
        p.g = Frame(3);
        p.g.add_edge(r, 0, 1);
        p.g.add_edge(r, 0, 2);
        p.u = 1;
        p.v = 2;
    } else {
        return named_profile(name);
    }
    return p;
}

Profile named_profile(const std::string& name) {
    Sym R = intern("R"), S = intern("S");
    Profile p;
    if (name == "pi1") {
        p.g = Frame(3);
        p.g.add_edge(R, 0, 1);
        p.g.add_edge(R, 1, 2);
        p.g.declare(S);
        p.s = S;
        p.u = 1;
        p.v = 2;
    } else if (name == "pi2") {
        Sym Q = intern("Q"), T = intern("T");
        p.g = Frame(6);  // x u w v w1 v1
        p.g.add_edge(Q, 0, 1);
        p.g.add_edge(T, 1, 2);
        p.g.add_edge(T, 2, 3);
        p.g.add_edge(R, 1, 4);
        p.g.add_edge(S, 4, 5);
        p.s = S;
        p.u = 1;
        p.v = 3;
    } else if (name == "pi3") {
        p.g = Frame(3);
        p.g.add_edge(S, 0, 1);
        p.g.add_edge(R, 1, 2);
        p.s = S;
        p.u = 1;
        p.v = 2;
    } else if (name == "refl" || name == "trans" || name == "sym" || name == "eucl") {
        return named_profile(name, R);
    } else {
        throw Error("unknown profile preset '" + name + "'");
    }
    return p;
}

namespace {

Profile finish_block(const std::vector<std::string>& frame_lines, const std::string& root_name,
                     const std::string& profile_line) {
    Profile p;
    p.g = parse_frame(text::join(frame_lines, "\n"));
    auto parts = text::split(profile_line, " \t");
    if (parts.size() != 3) throw ParseError("expected 'profile: S u v'", 0);
    p.s = intern(parts[0]);
    p.g.declare(p.s);
    p.u = p.g.index_of(parts[1]);
    p.v = p.g.index_of(parts[2]);
    if (!root_name.empty()) {
        p.root = p.g.index_of(root_name);
    } else {
        p.root = -1;
        for (int x = 0; x < p.g.size() && p.root < 0; ++x)
            if (reach_from(p.g, x) == p.g.all()) p.root = x;
        if (p.root < 0) throw PreconditionError("profile frame is not rooted");
    }
    validate_profile(p);
    return p;
}

} // namespace

ProfileSet parse_profile_set(const std::string& src) {
    ProfileSet out;
    std::vector<std::string> frame_lines;
    std::string root;
    for (auto& line : text::lines(src)) {
        if (line.empty() || line == "---") continue;
        auto [key, value] = text::key_value(line);
        if (key == "root") {
            root = value;
        } else if (key == "profile") {
            out.push_back(finish_block(frame_lines, root, value));
            frame_lines.clear();
            root.clear();
        } else {
            frame_lines.push_back(line);
        }
    }
    if (!frame_lines.empty() || !root.empty()) throw ParseError("profile block without a 'profile:' line", src.size());
    return out;
}

Profile parse_profile(const std::string& src) {
    auto set = parse_profile_set(src);
    if (set.size() != 1) throw ParseError("expected exactly one profile block", 0);
    return set.front();
}

std::string render_profile(const Profile& p) {
    std::string out = render_frame(p.g);
    out += "root: " + p.g.name(p.root) + "\n";
    out += "profile: " + name_of(p.s) + " " + p.g.name(p.u) + " " + p.g.name(p.v) + "\n";
    return out;
}

} // namespace spikit
