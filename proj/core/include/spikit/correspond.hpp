#pragma once

#include <string>
#include <vector>

#include "spikit/horn.hpp"
#include "spikit/kripke.hpp"

namespace spikit {

// First-order sentences over the frame signature. Variables are plain strings:
// x<i> stands for point i of the antecedent tree, y<j> for point j of the
// consequent tree (existential).
struct FO {
    enum class Op { Verum, Falsum, Atom, Eq, And, Or, Implies, Forall, Exists };

    Op op = Op::Verum;
    Sym rel = 0;                     // Atom
    std::string a, b;                // Atom, Eq
    std::vector<std::string> vars;   // Forall, Exists
    std::vector<FO> kids;            // And, Or (any arity), Implies (2), quantifiers (1)

    static FO verum() { return {}; }
    static FO falsum();
    static FO atom(Sym rel, std::string a, std::string b);
    static FO eq(std::string a, std::string b);
    // n-ary connectives flatten and drop units; a single operand is returned as is.
    static FO conj(std::vector<FO> parts);
    static FO disj(std::vector<FO> parts);
    static FO implies(FO lhs, FO rhs);
    // Quantifiers over an empty block return the body unchanged.
    static FO forall(std::vector<std::string> vars, FO body);
    static FO exists(std::vector<std::string> vars, FO body);

    bool is_verum() const { return op == Op::Verum; }
    bool is_falsum() const { return op == Op::Falsum; }
    std::string str() const;

    friend bool operator==(const FO& x, const FO& y) = default;
};

std::vector<std::string> free_vars(const FO& s);

// Tarskian evaluation on a finite frame. Throws Error on a free variable.
bool eval_fo(const Frame& fr, const FO& s);

// The global correspondent of a bot-free implication.
FO correspondent(const Implication& i);
// Same sentence unfolded into one disjunct per choice of antecedent points for
// the variables of the consequent. Throws CapError past 4096 disjuncts.
FO correspondent_dnf(const Implication& i);

// Universal closure of (diagram of G -> S(x_u, x_v)).
FO phi_of_profile(const Profile& p);

} // namespace spikit
