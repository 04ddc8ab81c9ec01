#include "spikit/calculus.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <unordered_map>

#include "spikit/text.hpp"

namespace spikit {

namespace {

const Sym kP = intern("p");
const Sym kQ = intern("q");

std::optional<Axiom> axiom_from_name(std::string_view s) {
    if (s == "refl") return Axiom::Refl;
    if (s == "top") return Axiom::Top;
    if (s == "comm") return Axiom::Comm;
    if (s == "proj") return Axiom::Proj;
    return std::nullopt;
}

} // namespace

std::string axiom_name(Axiom a) {
    switch (a) {
    case Axiom::Refl: return "refl";
    case Axiom::Top: return "top";
    case Axiom::Comm: return "comm";
    case Axiom::Proj: return "proj";
    }
    return "?";
}

Implication axiom_implication(Axiom a) {
    Formula p = Formula::var(kP), q = Formula::var(kQ);
    switch (a) {
    case Axiom::Refl: return {p, p};
    case Axiom::Top: return {p, Formula::top()};
    // Canonical forms identify both sides; kept so that derivations may cite it.
    case Axiom::Comm: return {Formula::conj(p, q), Formula::conj(q, p)};
    case Axiom::Proj: return {Formula::conj(p, q), p};
    }
    return {p, p};
}

std::vector<std::optional<Implication>> step_conclusions(const std::vector<Implication>& sigma,
                                                         const Derivation& d) {
    std::vector<std::optional<Implication>> out;
    out.reserve(d.size());
    auto ref = [&](int k, int at) -> const std::optional<Implication>& {
        if (k < 0 || k >= at)
            throw DerivationError("step " + std::to_string(at + 1) + " refers to step " + std::to_string(k + 1) +
                                  ", which does not precede it");
        return out[k];
    };
    for (int at = 0; at < static_cast<int>(d.size()); ++at) {
        const Step& s = d[at];
        std::optional<Implication> c;
        switch (s.kind) {
        case StepKind::Axiom:
            c = substitute(axiom_implication(s.axiom), s.subst);
            break;
        case StepKind::Premise:
            if (s.premise < 0 || s.premise >= static_cast<int>(sigma.size()))
                throw DerivationError("step " + std::to_string(at + 1) + " cites premise " +
                                      std::to_string(s.premise) + " of " + std::to_string(sigma.size()));
            c = substitute(sigma[s.premise], s.subst);
            break;
        case StepKind::Cut: {
            auto& a = ref(s.i, at);
            auto& b = ref(s.j, at);
            if (a && b && a->rhs == b->lhs) c = Implication{a->lhs, b->rhs};
            break;
        }
        case StepKind::Adj: {
            auto& a = ref(s.i, at);
            auto& b = ref(s.j, at);
            if (a && b && a->lhs == b->lhs) c = Implication{a->lhs, Formula::conj(a->rhs, b->rhs)};
            break;
        }
        case StepKind::Mono: {
            auto& a = ref(s.i, at);
            if (a) c = Implication{Formula::dia(s.rel, a->lhs), Formula::dia(s.rel, a->rhs)};
            break;
        }
        }
        if (c && s.claim && !(*c == *s.claim)) c.reset();
        out.push_back(std::move(c));
    }
    return out;
}

bool check_derivation(const std::vector<Implication>& sigma, const Derivation& d, const Implication& target) {
    if (d.empty()) return false;
    auto cs = step_conclusions(sigma, d);
    for (auto& c : cs)
        if (!c) return false;
    return *cs.back() == target;
}

// ---------------------------------------------------------------------------
// Bounded search

namespace {

// Cap on premise instances per premise; larger spaces fall back to the target's
// variables and top as the only substituends.
constexpr std::size_t kInstanceCap = 20000;

struct Universe {
    std::vector<Formula> forms;
    std::unordered_map<std::string, int> index;
    // Sorted ids of the conjuncts of each formula, in a separate id space.
    std::vector<std::vector<int>> conj_ids;
    std::unordered_map<std::string, int> conj_index;

    int add(const Formula& f) {
        auto [it, fresh] = index.emplace(f.str(), static_cast<int>(forms.size()));
        if (!fresh) return it->second;
        forms.push_back(f);
        std::vector<int> ids;
        for (auto& c : f.conjuncts()) {
            auto [ct, cf] = conj_index.emplace(c.str(), static_cast<int>(conj_index.size()));
            ids.push_back(ct->second);
        }
        std::sort(ids.begin(), ids.end());
        conj_ids.push_back(std::move(ids));
        return it->second;
    }
    void add_all(const Formula& f) {
        for (auto& s : subformulas(f)) add(s);
    }
    int find(const Formula& f) const {
        auto it = index.find(f.str());
        return it == index.end() ? -1 : it->second;
    }
    int size() const { return static_cast<int>(forms.size()); }
};

struct Instance {
    int premise;
    Substitution subst;
    int lhs, rhs;
};

struct Just {
    StepKind kind;
    Axiom axiom = Axiom::Refl;
    int instance = -1;
    std::pair<int, int> x{-1, -1}, y{-1, -1};
    Sym rel = 0;
};

void for_each_assignment(const std::vector<Sym>& vars, const std::vector<Formula>& pool,
                         const std::function<void(const Substitution&)>& fn) {
    Substitution m;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
        if (k == vars.size()) {
            fn(m);
            return;
        }
        for (auto& f : pool) {
            m[vars[k]] = f;
            rec(k + 1);
        }
    };
    rec(0);
}

class Search {
public:
    Search(const std::vector<Implication>& sigma, const Implication& target) : sigma_(sigma) {
        u_.add(Formula::top());
        u_.add_all(target.lhs);
        u_.add_all(target.rhs);
        std::vector<Formula> pool = u_.forms;
        std::vector<Formula> small{Formula::top()};
        for (Sym v : vars_of(target)) small.push_back(Formula::var(v));

        for (int k = 0; k < static_cast<int>(sigma.size()); ++k) {
            auto vs = vars_of(sigma[k]);
            std::vector<Sym> vars(vs.begin(), vs.end());
            double count = 1;
            for (std::size_t i = 0; i < vars.size(); ++i) count *= static_cast<double>(pool.size());
            const auto& use = count > static_cast<double>(kInstanceCap) ? small : pool;
            for_each_assignment(vars, use, [&](const Substitution& m) {
                Implication inst = substitute(sigma[k], m);
                u_.add_all(inst.lhs);
                u_.add_all(inst.rhs);
                instances_.push_back({k, m, u_.find(inst.lhs), u_.find(inst.rhs)});
            });
        }
        for (auto& f : u_.forms)
            for (Sym r : relations_of(f)) rels_.push_back(r);
        for (auto& i : sigma)
            for (Sym r : relations_of(i)) rels_.push_back(r);
        std::sort(rels_.begin(), rels_.end());
        rels_.erase(std::unique(rels_.begin(), rels_.end()), rels_.end());

        n_ = u_.size();
        just_.assign(static_cast<std::size_t>(n_) * n_, -1);
        out_.assign(n_, {});
        index_dias();
        index_decompositions();
    }

    std::optional<Derivation> run(const Implication& target, int depth) {
        int a = u_.find(target.lhs), b = u_.find(target.rhs);
        auto done = [&] { return proven(a, b); };

        seed();
        for (int round = 2; round <= depth && !done(); ++round)
            if (!expand()) break;
        if (!done()) return std::nullopt;

        Derivation d;
        std::map<std::pair<int, int>, int> emitted;
        emit({a, b}, d, emitted);
        return d;
    }

private:
    bool proven(int a, int b) const { return just_[idx(a, b)] >= 0; }
    std::size_t idx(int a, int b) const { return static_cast<std::size_t>(a) * n_ + b; }

    void index_dias() {
        for (Sym r : rels_) {
            auto& t = dia_[r];
            t.assign(n_, -1);
            for (int a = 0; a < n_; ++a) t[a] = u_.find(Formula::dia(r, u_.forms[a]));
        }
    }

    // For every conjunction w in the universe, the pairs (b, c) of universe
    // members with b & c = w.
    void index_decompositions() {
        decomp_.assign(n_, {});
        for (int w = 0; w < n_; ++w) {
            const auto& cw = u_.conj_ids[w];
            if (cw.size() < 2 || cw.size() > 63) continue;
            std::vector<std::pair<int, std::uint64_t>> cand;
            for (int b = 0; b < n_; ++b) {
                const auto& cb = u_.conj_ids[b];
                if (b == w || cb.empty() || !std::includes(cw.begin(), cw.end(), cb.begin(), cb.end())) continue;
                std::uint64_t mask = 0;
                for (int id : cb) mask |= std::uint64_t{1} << (std::lower_bound(cw.begin(), cw.end(), id) - cw.begin());
                cand.push_back({b, mask});
            }
            std::uint64_t full = (std::uint64_t{1} << cw.size()) - 1;
            for (std::size_t i = 0; i < cand.size(); ++i)
                for (std::size_t j = i + 1; j < cand.size(); ++j)
                    if ((cand[i].second | cand[j].second) == full) decomp_[w].push_back({cand[i].first, cand[j].first});
        }
    }

    bool add(int a, int b, Just j) {
        if (proven(a, b)) return false;
        just_[idx(a, b)] = static_cast<int>(justs_.size());
        justs_.push_back(j);
        out_[a].push_back(b);
        return true;
    }

    void seed() {
        int top = u_.find(Formula::top());
        for (int a = 0; a < n_; ++a) {
            add(a, a, {StepKind::Axiom, Axiom::Refl});
            add(a, top, {StepKind::Axiom, Axiom::Top});
        }
        for (int a = 0; a < n_; ++a) {
            const auto& ca = u_.conj_ids[a];
            if (ca.size() < 2) continue;
            for (int b = 0; b < n_; ++b) {
                const auto& cb = u_.conj_ids[b];
                if (b != a && !cb.empty() && std::includes(ca.begin(), ca.end(), cb.begin(), cb.end()))
                    add(a, b, {StepKind::Axiom, Axiom::Proj});
            }
        }
        for (int k = 0; k < static_cast<int>(instances_.size()); ++k) {
            Just j{StepKind::Premise};
            j.instance = k;
            add(instances_[k].lhs, instances_[k].rhs, j);
        }
    }

    // One round: every rule applied once to the pairs proven so far.
    bool expand() {
        std::vector<std::tuple<int, int, Just>> fresh;
        std::vector<char> queued(just_.size(), 0);
        auto push = [&](int a, int b, Just j) {
            if (proven(a, b) || queued[idx(a, b)]) return;
            queued[idx(a, b)] = 1;
            fresh.emplace_back(a, b, j);
        };
        for (int a = 0; a < n_; ++a) {
            for (int b : out_[a]) {
                if (b == a) continue;
                for (int c : out_[b]) {
                    if (c == b) continue;
                    Just j{StepKind::Cut};
                    j.x = {a, b};
                    j.y = {b, c};
                    push(a, c, j);
                }
                for (Sym r : rels_) {
                    int da = dia_[r][a], db = dia_[r][b];
                    if (da < 0 || db < 0) continue;
                    Just j{StepKind::Mono};
                    j.x = {a, b};
                    j.rel = r;
                    push(da, db, j);
                }
            }
            for (int w = 0; w < n_; ++w)
                for (auto [b, c] : decomp_[w])
                    if (proven(a, b) && proven(a, c)) {
                        Just j{StepKind::Adj};
                        j.x = {a, b};
                        j.y = {a, c};
                        push(a, w, j);
                    }
        }
        for (auto& [a, b, j] : fresh) add(a, b, j);
        return !fresh.empty();
    }

    int emit(std::pair<int, int> p, Derivation& d, std::map<std::pair<int, int>, int>& emitted) {
        if (auto it = emitted.find(p); it != emitted.end()) return it->second;
        const Just& j = justs_[just_[idx(p.first, p.second)]];
        const Formula& a = u_.forms[p.first];
        const Formula& b = u_.forms[p.second];
        Step s;
        s.kind = j.kind;
        switch (j.kind) {
        case StepKind::Axiom:
            s.axiom = j.axiom;
            if (j.axiom == Axiom::Proj)
                s.subst = {{kP, b}, {kQ, a}};
            else
                s.subst = {{kP, a}};
            break;
        case StepKind::Premise:
            s.premise = instances_[j.instance].premise;
            s.subst = instances_[j.instance].subst;
            break;
        case StepKind::Cut:
        case StepKind::Adj:
            s.i = emit(j.x, d, emitted);
            s.j = emit(j.y, d, emitted);
            break;
        case StepKind::Mono:
            s.i = emit(j.x, d, emitted);
            s.rel = j.rel;
            break;
        }
        s.claim = Implication{a, b};
        d.push_back(std::move(s));
        int at = static_cast<int>(d.size()) - 1;
        emitted[p] = at;
        return at;
    }

    const std::vector<Implication>& sigma_;
    Universe u_;
    std::vector<Instance> instances_;
    std::vector<Sym> rels_;
    int n_ = 0;
    std::vector<int> just_;
    std::vector<Just> justs_;
    std::vector<std::vector<int>> out_;
    std::map<Sym, std::vector<int>> dia_;
    std::vector<std::vector<std::pair<int, int>>> decomp_;
};

} // namespace

std::optional<Derivation> prove_bounded(const std::vector<Implication>& sigma, const Implication& target,
                                        int depth) {
    if (depth < 1) throw PreconditionError("prove_bounded needs depth >= 1");
    Search s(sigma, target);
    return s.run(target, depth);
}

std::optional<std::pair<Derivation, Derivation>> derive_equiv(const std::vector<Implication>& sigma,
                                                              const Formula& f, const Formula& g, int depth) {
    auto there = prove_bounded(sigma, {f, g}, depth);
    if (!there) return std::nullopt;
    auto back = prove_bounded(sigma, {g, f}, depth);
    if (!back) return std::nullopt;
    return std::make_pair(std::move(*there), std::move(*back));
}

// ---------------------------------------------------------------------------
// Text format

namespace {

int parse_int(const std::string& s, std::size_t off) {
    try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParseError("expected a number, got '" + s + "'", off);
}

Substitution parse_subst(std::string_view body, std::size_t off) {
    Substitution m;
    for (auto& item : text::split(body, ",")) {
        auto eq = item.find(":=");
        if (eq == std::string::npos) throw ParseError("substitution item without ':=': '" + item + "'", off);
        auto var = std::string(text::trim(std::string_view(item).substr(0, eq)));
        if (var.empty()) throw ParseError("substitution item without a variable", off);
        try {
            m[intern(var)] = parse_formula(std::string_view(item).substr(eq + 2));
        } catch (const ParseError& e) {
            throw ParseError(std::string("bad formula in substitution: ") + e.what(), off);
        }
    }
    return m;
}

std::string render_subst(const Substitution& m) {
    std::vector<std::string> parts;
    for (auto& [v, f] : m) parts.push_back(name_of(v) + ":=" + f.str());
    return "[" + text::join(parts, ", ") + "]";
}

} // namespace

Derivation parse_derivation(const std::string& src) {
    Derivation d;
    std::size_t off = 0;
    for (auto& raw : text::lines(src)) {
        std::size_t line_off = off;
        off += raw.size() + 1;
        auto line = std::string(text::trim(raw));
        if (line.empty()) continue;

        auto colon = line.find(':');
        if (colon == std::string::npos) throw ParseError("expected 'n: step'", line_off);
        int num = parse_int(std::string(text::trim(std::string_view(line).substr(0, colon))), line_off);
        if (num != static_cast<int>(d.size()) + 1)
            throw ParseError("step numbered " + std::to_string(num) + ", expected " + std::to_string(d.size() + 1),
                             line_off);
        std::string rest = line.substr(colon + 1);

        Step s;
        if (auto c = rest.find("::"); c != std::string::npos) {
            try {
                s.claim = parse_implication(std::string_view(rest).substr(c + 2));
            } catch (const ParseError& e) {
                throw ParseError(std::string("bad claim: ") + e.what(), line_off);
            }
            rest.resize(c);
        }
        std::string subst_text;
        bool has_subst = false;
        if (auto lb = rest.find('['); lb != std::string::npos) {
            auto rb = rest.find(']', lb);
            if (rb == std::string::npos) throw ParseError("unclosed '['", line_off);
            subst_text = rest.substr(lb + 1, rb - lb - 1);
            if (!text::trim(std::string_view(rest).substr(rb + 1)).empty())
                throw ParseError("text after substitution", line_off);
            rest.resize(lb);
            has_subst = true;
        }
        auto words = text::split(rest, " \t");
        if (words.empty()) throw ParseError("empty step", line_off);
        auto need = [&](std::size_t n) {
            if (words.size() != n) throw ParseError("wrong number of arguments for '" + words[0] + "'", line_off);
        };
        const std::string& op = words[0];
        if (op == "axiom") {
            need(2);
            auto a = axiom_from_name(words[1]);
            if (!a) throw ParseError("unknown axiom '" + words[1] + "'", line_off);
            s.kind = StepKind::Axiom;
            s.axiom = *a;
        } else if (op == "premise") {
            need(2);
            s.kind = StepKind::Premise;
            s.premise = parse_int(words[1], line_off);
        } else if (op == "cut" || op == "adj") {
            need(3);
            s.kind = op == "cut" ? StepKind::Cut : StepKind::Adj;
            s.i = parse_int(words[1], line_off) - 1;
            s.j = parse_int(words[2], line_off) - 1;
        } else if (op == "mono") {
            need(3);
            s.kind = StepKind::Mono;
            s.rel = intern(words[1]);
            s.i = parse_int(words[2], line_off) - 1;
        } else {
            throw ParseError("unknown rule '" + op + "'", line_off);
        }
        if (has_subst) {
            if (s.kind != StepKind::Axiom && s.kind != StepKind::Premise)
                throw ParseError("'" + op + "' takes no substitution", line_off);
            s.subst = parse_subst(subst_text, line_off);
        }
        d.push_back(std::move(s));
    }
    return d;
}

std::string render_derivation(const Derivation& d) {
    std::string out;
    for (std::size_t k = 0; k < d.size(); ++k) {
        const Step& s = d[k];
        out += std::to_string(k + 1) + ": ";
        switch (s.kind) {
        case StepKind::Axiom: out += "axiom " + axiom_name(s.axiom) + " " + render_subst(s.subst); break;
        case StepKind::Premise: out += "premise " + std::to_string(s.premise) + " " + render_subst(s.subst); break;
        case StepKind::Cut: out += "cut " + std::to_string(s.i + 1) + " " + std::to_string(s.j + 1); break;
        case StepKind::Adj: out += "adj " + std::to_string(s.i + 1) + " " + std::to_string(s.j + 1); break;
        case StepKind::Mono: out += "mono " + name_of(s.rel) + " " + std::to_string(s.i + 1); break;
        }
        if (s.claim) out += " :: " + s.claim->str();
        out += "\n";
    }
    return out;
}

} // namespace spikit
