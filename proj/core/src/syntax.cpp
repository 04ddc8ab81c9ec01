#include "spikit/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace spikit {

namespace {

struct InternTable {
    std::shared_mutex mu;
    std::deque<std::string> names;
    std::unordered_map<std::string, Sym> ids;
};

InternTable& table() {
    static InternTable t;
    return t;
}

} // namespace

Sym intern(std::string_view name) {
    auto& t = table();
    {
        std::shared_lock lk(t.mu);
        auto it = t.ids.find(std::string(name));
        if (it != t.ids.end()) return it->second;
    }
    std::unique_lock lk(t.mu);
    auto [it, fresh] = t.ids.emplace(std::string(name), static_cast<Sym>(t.names.size()));
    if (fresh) t.names.emplace_back(name);
    return it->second;
}

const std::string& name_of(Sym s) {
    auto& t = table();
    std::shared_lock lk(t.mu);
    if (s >= t.names.size()) throw Error("unknown symbol id " + std::to_string(s));
    return t.names[s];
}

struct FormulaNode {
    Kind kind = Kind::Top;
    Sym sym = 0;
    std::vector<Formula> args;  // And: conjuncts, Dia: single body
    std::string text;
    int size = 1;
    int depth = 0;
};

namespace {

std::shared_ptr<const FormulaNode> make_leaf(Kind k, Sym s, std::string text) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = k;
    n->sym = s;
    n->text = std::move(text);
    return n;
}

const std::shared_ptr<const FormulaNode>& top_node() {
    static const auto n = make_leaf(Kind::Top, 0, "top");
    return n;
}

const std::shared_ptr<const FormulaNode>& bot_node() {
    static const auto n = make_leaf(Kind::Bot, 0, "bot");
    return n;
}

} // namespace

Formula::Formula() : node_(top_node()) {}

Formula Formula::top() { return Formula(top_node()); }
Formula Formula::bot() { return Formula(bot_node()); }

Formula Formula::var(Sym v) { return Formula(make_leaf(Kind::Var, v, name_of(v))); }

Formula Formula::conj(std::vector<Formula> parts) {
    std::vector<Formula> flat;
    flat.reserve(parts.size());
    for (auto& p : parts) {
        switch (p.kind()) {
        case Kind::Top: break;
        case Kind::Bot: return bot();
        case Kind::And:
            for (auto& c : p.args()) flat.push_back(c);
            break;
        default: flat.push_back(std::move(p));
        }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return top();
    if (flat.size() == 1) return flat.front();

    auto n = std::make_shared<FormulaNode>();
    n->kind = Kind::And;
    n->size = 1;
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (i) n->text += " & ";
        n->text += flat[i].str();
        n->size += flat[i].tree_size() - 1;
        n->depth = std::max(n->depth, flat[i].depth());
    }
    n->args = std::move(flat);
    return Formula(std::move(n));
}

Formula Formula::dia(Sym rel, const Formula& body) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = Kind::Dia;
    n->sym = rel;
    n->text = "<" + name_of(rel) + ">";
    if (body.kind() == Kind::And)
        n->text += "(" + body.str() + ")";
    else
        n->text += body.str();
    n->size = body.tree_size() + 1;
    n->depth = body.depth() + 1;
    n->args.push_back(body);
    return Formula(std::move(n));
}

Kind Formula::kind() const { return node_->kind; }
Sym Formula::sym() const { return node_->sym; }
const std::vector<Formula>& Formula::args() const { return node_->args; }
const Formula& Formula::body() const { return node_->args.front(); }
const std::string& Formula::str() const { return node_->text; }
int Formula::tree_size() const { return node_->size; }
int Formula::depth() const { return node_->depth; }

std::vector<Formula> Formula::conjuncts() const {
    if (kind() == Kind::And) return args();
    if (kind() == Kind::Top) return {};
    return {*this};
}

bool operator==(const Formula& a, const Formula& b) {
    return a.node_ == b.node_ || a.node_->text == b.node_->text;
}

namespace {
// Variables sort before diamonds; within a kind the rendering decides.
int rank(Kind k) {
    switch (k) {
    case Kind::Top: return 0;
    case Kind::Var: return 1;
    case Kind::Dia: return 2;
    case Kind::And: return 3;
    case Kind::Bot: return 4;
    }
    return 5;
}
} // namespace

bool operator<(const Formula& a, const Formula& b) {
    int ra = rank(a.node_->kind), rb = rank(b.node_->kind);
    if (ra != rb) return ra < rb;
    return a.node_->text < b.node_->text;
}

std::size_t FormulaHash::operator()(const Formula& f) const { return std::hash<std::string>()(f.str()); }

Signature::Signature(std::vector<std::string> rels, bool bot) : bot_(bot) {
    for (auto& r : rels) add(r);
}

Sym Signature::add(Sym rel) {
    if (!has(rel)) rels_.push_back(rel);
    return rel;
}

bool Signature::has(Sym rel) const { return std::find(rels_.begin(), rels_.end(), rel) != rels_.end(); }

// ---------------------------------------------------------------------------
// Parsing

namespace {

class Parser {
public:
    Parser(std::string_view text, Signature& sig) : s_(text), sig_(sig) {}

    Formula formula() {
        std::vector<Formula> parts{atom()};
        while (peek() == '&') {
            ++pos_;
            parts.push_back(atom());
        }
        return Formula::conj(std::move(parts));
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool at_end() { return peek() == '\0'; }
    std::size_t pos() const { return pos_; }

    bool eat(std::string_view tok) {
        skip_ws();
        if (s_.substr(pos_, tok.size()) == tok) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

private:
    std::string ident() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        return std::string(s_.substr(start, pos_ - start));
    }

    Formula atom() {
        char c = peek();
        std::size_t start = pos_;
        if (c == '(') {
            ++pos_;
            Formula f = formula();
            if (peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return f;
        }
        if (c == '<') {
            ++pos_;
            Sym rel;
            if (peek() == '>') {
                rel = intern("R");
            } else {
                if (!std::isupper(static_cast<unsigned char>(peek())))
                    throw ParseError("relation names start with an uppercase letter", pos_);
                rel = intern(ident());
            }
            if (peek() != '>') throw ParseError("expected '>'", pos_);
            ++pos_;
            sig_.add(rel);
            return Formula::dia(rel, atom());
        }
        if (std::islower(static_cast<unsigned char>(c))) {
            std::string id = ident();
            if (id == "top") return Formula::top();
            if (id == "bot") {
                if (!sig_.bot_dialect()) throw ParseError("'bot' needs the bot dialect", start);
                return Formula::bot();
            }
            return Formula::var(id);
        }
        if (c == '\0') throw ParseError("unexpected end of input", pos_);
        throw ParseError(std::string("unexpected character '") + c + "'", pos_);
    }

    std::string_view s_;
    Signature& sig_;
    std::size_t pos_ = 0;
};

} // namespace

Formula parse_formula(std::string_view text, Signature& sig) {
    Parser p(text, sig);
    Formula f = p.formula();
    if (!p.at_end()) throw ParseError("trailing input", p.pos());
    return f;
}

Implication parse_implication(std::string_view text, Signature& sig) {
    auto arrow = text.find("=>");
    if (arrow == std::string_view::npos) throw ParseError("missing '=>'", text.size());
    Parser lp(text.substr(0, arrow), sig);
    Formula lhs = lp.formula();
    if (!lp.at_end()) throw ParseError("trailing input", lp.pos());
    Parser rp(text.substr(arrow + 2), sig);
    Formula rhs = rp.formula();
    if (!rp.at_end()) throw ParseError("trailing input", arrow + 2 + rp.pos());
    return {lhs, rhs};
}

Formula parse_formula(std::string_view text) {
    Signature sig({}, true);
    return parse_formula(text, sig);
}

Implication parse_implication(std::string_view text) {
    Signature sig({}, true);
    return parse_implication(text, sig);
}

Rule parse_rule(std::string_view text, Signature& sig) {
    Rule r;
    auto slash = text.find('/');
    std::string_view concl = text;
    if (slash != std::string_view::npos) {
        std::string_view prem = text.substr(0, slash);
        concl = text.substr(slash + 1);
        std::size_t start = 0;
        while (start <= prem.size()) {
            auto semi = prem.find(';', start);
            auto piece = prem.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start);
            if (piece.find_first_not_of(" \t") != std::string_view::npos)
                r.premises.push_back(parse_implication(piece, sig));
            if (semi == std::string_view::npos) break;
            start = semi + 1;
        }
    }
    r.conclusion = parse_implication(concl, sig);
    return r;
}

// ---------------------------------------------------------------------------
// Rewriting

Formula canonicalize(const Formula& f) {
    switch (f.kind()) {
    case Kind::And: {
        std::vector<Formula> parts;
        for (auto& a : f.args()) parts.push_back(canonicalize(a));
        return Formula::conj(std::move(parts));
    }
    case Kind::Dia: return Formula::dia(f.sym(), canonicalize(f.body()));
    default: return f;
    }
}

Formula substitute(const Formula& f, const Substitution& m) {
    switch (f.kind()) {
    case Kind::Var: {
        auto it = m.find(f.sym());
        return it == m.end() ? f : it->second;
    }
    case Kind::And: {
        std::vector<Formula> parts;
        for (auto& a : f.args()) parts.push_back(substitute(a, m));
        return Formula::conj(std::move(parts));
    }
    case Kind::Dia: return Formula::dia(f.sym(), substitute(f.body(), m));
    default: return f;
    }
}

Implication substitute(const Implication& i, const Substitution& m) {
    return {substitute(i.lhs, m), substitute(i.rhs, m)};
}

namespace {

void walk(const Formula& f, const std::function<void(const Formula&)>& fn) {
    fn(f);
    for (auto& a : f.args()) walk(a, fn);
}

int count_var(const Formula& f, Sym v) {
    int n = 0;
    walk(f, [&](const Formula& g) { n += g.kind() == Kind::Var && g.sym() == v; });
    return n;
}

} // namespace

std::set<Sym> vars_of(const Formula& f) {
    std::set<Sym> out;
    walk(f, [&](const Formula& g) {
        if (g.kind() == Kind::Var) out.insert(g.sym());
    });
    return out;
}

std::set<Sym> vars_of(const Implication& i) {
    auto a = vars_of(i.lhs);
    auto b = vars_of(i.rhs);
    a.insert(b.begin(), b.end());
    return a;
}

std::set<Sym> relations_of(const Formula& f) {
    std::set<Sym> out;
    walk(f, [&](const Formula& g) {
        if (g.kind() == Kind::Dia) out.insert(g.sym());
    });
    return out;
}

std::set<Sym> relations_of(const Implication& i) {
    auto a = relations_of(i.lhs);
    auto b = relations_of(i.rhs);
    a.insert(b.begin(), b.end());
    return a;
}

bool contains_bot(const Formula& f) {
    bool found = false;
    walk(f, [&](const Formula& g) { found |= g.kind() == Kind::Bot; });
    return found;
}

std::vector<Formula> subformulas(const Formula& f) {
    std::set<Formula> seen;
    walk(f, [&](const Formula& g) { seen.insert(g); });
    return {seen.begin(), seen.end()};
}

ImplicationClass classify(const Implication& i) {
    ImplicationClass c;
    auto vs = vars_of(i);
    c.variable_free = vs.empty();
    c.left_variable_linear = true;
    for (Sym v : vars_of(i.rhs))
        if (count_var(i.lhs, v) != 1) c.left_variable_linear = false;
    c.bot_free = !contains_bot(i.lhs) && !contains_bot(i.rhs);
    return c;
}

namespace {

Formula replace_bot(const Formula& f, const Formula& by) {
    switch (f.kind()) {
    case Kind::Bot: return by;
    case Kind::And: {
        std::vector<Formula> parts;
        for (auto& a : f.args()) parts.push_back(replace_bot(a, by));
        return Formula::conj(std::move(parts));
    }
    case Kind::Dia: return Formula::dia(f.sym(), replace_bot(f.body(), by));
    default: return f;
    }
}

Formula drop_fresh(const Formula& f, Sym fresh) {
    switch (f.kind()) {
    case Kind::Dia:
        if (f.sym() == fresh) return Formula::bot();
        return Formula::dia(f.sym(), drop_fresh(f.body(), fresh));
    case Kind::And: {
        std::vector<Formula> parts;
        for (auto& a : f.args()) parts.push_back(drop_fresh(a, fresh));
        return Formula::conj(std::move(parts));
    }
    default: return f;
    }
}

} // namespace

std::vector<Implication> bot_translate(const std::vector<Implication>& s, Sym fresh, BotMode mode) {
    if (mode != BotMode::Drop) {
        for (auto& i : s)
            if (relations_of(i).count(fresh))
                throw PreconditionError("relation " + name_of(fresh) + " already used");
    }
    std::vector<Implication> out;
    Formula marker = Formula::dia(fresh, Formula::top());
    switch (mode) {
    case BotMode::Drop:
        for (auto& i : s) out.push_back({drop_fresh(i.lhs, fresh), drop_fresh(i.rhs, fresh)});
        return out;
    case BotMode::Lift:
        for (auto& i : s) out.push_back({replace_bot(i.lhs, marker), replace_bot(i.rhs, marker)});
        return out;
    case BotMode::Eliminate: break;
    }
    std::set<Sym> used_vars, rels;
    for (auto& i : s) {
        out.push_back({replace_bot(i.lhs, marker), replace_bot(i.rhs, marker)});
        auto v = vars_of(i);
        used_vars.insert(v.begin(), v.end());
        auto r = relations_of(i);
        rels.insert(r.begin(), r.end());
    }
    // The "bot below everything" axiom needs a variable; pick the first unused
    // one among p, q, r, ... so that the output reads like hand-written input.
    Sym v = 0;
    for (int k = 0;; ++k) {
        std::string cand = k < 11 ? std::string(1, static_cast<char>('p' + k)) : "x" + std::to_string(k);
        v = intern(cand);
        if (!used_vars.count(v)) break;
    }
    out.push_back({marker, Formula::var(v)});
    for (Sym r : rels) out.push_back({Formula::dia(r, marker), marker});
    return out;
}

} // namespace spikit
