#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "spikit/error.hpp"

namespace spikit {

// Interned name of a variable or a relation.
using Sym = std::uint32_t;

// Interns a name in the process-wide table. Safe to call from several threads.
Sym intern(std::string_view name);
// The name behind a symbol. The reference stays valid for the process lifetime.
const std::string& name_of(Sym s);

enum class Kind : std::uint8_t { Top, Bot, Var, And, Dia };

struct FormulaNode;

// An sp-formula in canonical form. Immutable, cheap to copy, compared by its
// rendering (which is canonical, so equal rendering means equal formula).
class Formula {
public:
    Formula();  // top

    static Formula top();
    static Formula bot();
    static Formula var(Sym v);
    static Formula var(std::string_view v) { return var(intern(v)); }
    static Formula conj(std::vector<Formula> parts);
    static Formula conj(const Formula& a, const Formula& b) { return conj(std::vector<Formula>{a, b}); }
    static Formula dia(Sym rel, const Formula& body);
    static Formula dia(std::string_view rel, const Formula& body) { return dia(intern(rel), body); }

    Kind kind() const;
    // Variable name for Var, relation for Dia.
    Sym sym() const;
    // Conjuncts for And (at least two, none of them And or Top).
    const std::vector<Formula>& args() const;
    // Argument of a Dia.
    const Formula& body() const;

    const std::string& str() const;
    // Number of diamonds plus one, i.e. the point count of the tree model.
    int tree_size() const;
    // Maximal nesting of diamonds.
    int depth() const;

    bool is_top() const { return kind() == Kind::Top; }
    // Conjuncts as a list: args() for And, empty for Top, the formula itself otherwise.
    std::vector<Formula> conjuncts() const;

    friend bool operator==(const Formula& a, const Formula& b);
    friend bool operator<(const Formula& a, const Formula& b);
    friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

struct FormulaHash {
    std::size_t operator()(const Formula& f) const;
};

// sigma => tau
struct Implication {
    Formula lhs;
    Formula rhs;

    std::string str() const { return lhs.str() + " => " + rhs.str(); }
    friend bool operator==(const Implication& a, const Implication& b) {
        return a.lhs == b.lhs && a.rhs == b.rhs;
    }
    friend bool operator<(const Implication& a, const Implication& b) {
        if (a.lhs != b.lhs) return a.lhs < b.lhs;
        return a.rhs < b.rhs;
    }
};

// premises / conclusion. An empty premise list is the conclusion itself.
struct Rule {
    std::vector<Implication> premises;
    Implication conclusion;
};

// Ordered relation names plus the bot-dialect switch.
class Signature {
public:
    Signature() = default;
    explicit Signature(std::vector<std::string> rels, bool bot = false);

    // Registers a relation if new; returns its symbol.
    Sym add(Sym rel);
    Sym add(std::string_view rel) { return add(intern(rel)); }
    bool has(Sym rel) const;
    const std::vector<Sym>& relations() const { return rels_; }
    bool bot_dialect() const { return bot_; }
    void set_bot_dialect(bool on) { bot_ = on; }

private:
    std::vector<Sym> rels_;
    bool bot_ = false;
};

Formula parse_formula(std::string_view text, Signature& sig);
Implication parse_implication(std::string_view text, Signature& sig);
// Convenience overloads that use a throwaway signature with bot enabled.
Formula parse_formula(std::string_view text);
Implication parse_implication(std::string_view text);
// "prem1 ; prem2 / concl" or just "concl".
Rule parse_rule(std::string_view text, Signature& sig);

Formula canonicalize(const Formula& f);

using Substitution = std::map<Sym, Formula>;
Formula substitute(const Formula& f, const Substitution& m);
Implication substitute(const Implication& i, const Substitution& m);

std::set<Sym> vars_of(const Formula& f);
std::set<Sym> vars_of(const Implication& i);
std::set<Sym> relations_of(const Formula& f);
std::set<Sym> relations_of(const Implication& i);
bool contains_bot(const Formula& f);
// Every subformula including f itself, deduplicated.
std::vector<Formula> subformulas(const Formula& f);

struct ImplicationClass {
    bool variable_free = false;
    bool left_variable_linear = false;
    bool bot_free = false;
};
ImplicationClass classify(const Implication& i);

enum class BotMode { Eliminate, Lift, Drop };
// Eliminate: the whole-set translation that removes bot using a fresh relation.
// Lift and Drop act on each implication separately.
std::vector<Implication> bot_translate(const std::vector<Implication>& s, Sym fresh, BotMode mode);

} // namespace spikit
