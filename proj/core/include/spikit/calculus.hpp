#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikit/syntax.hpp"

namespace spikit {

// A step refers to an earlier step or to a premise that does not exist.
class DerivationError : public Error {
public:
    using Error::Error;
};

enum class Axiom { Refl, Top, Comm, Proj };
enum class StepKind { Axiom, Premise, Cut, Adj, Mono };

std::string axiom_name(Axiom a);
// The axiom as an implication over the variables p and q.
Implication axiom_implication(Axiom a);

struct Step {
    StepKind kind = StepKind::Axiom;
    Axiom axiom = Axiom::Refl;  // Axiom
    int premise = 0;            // Premise: index into sigma
    Substitution subst;         // Axiom, Premise; unmapped variables stay put
    int i = 0;                  // Cut, Adj, Mono: earlier steps (0-based)
    int j = 0;                  // Cut, Adj
    Sym rel = 0;                // Mono
    // Conclusion the author asserts. Checked when present.
    std::optional<Implication> claim;
};

using Derivation = std::vector<Step>;

// Conclusion of every step, nullopt from the first step that does not apply
// (a cut whose middle terms differ, an adjunction with different antecedents,
// a claim that does not match). Throws DerivationError for bad references.
std::vector<std::optional<Implication>> step_conclusions(const std::vector<Implication>& sigma,
                                                         const Derivation& d);

// True iff every step checks and the last conclusion is the target.
// Throws DerivationError for bad references.
bool check_derivation(const std::vector<Implication>& sigma, const Derivation& d, const Implication& target);

// Saturation search over a finite universe of formulas built from the target and
// the premises instantiated with the target's subformulas. depth bounds the
// nesting of rule applications. nullopt means nothing was found, not that the
// target is underivable.
std::optional<Derivation> prove_bounded(const std::vector<Implication>& sigma, const Implication& target,
                                        int depth);

std::optional<std::pair<Derivation, Derivation>> derive_equiv(const std::vector<Implication>& sigma,
                                                              const Formula& f, const Formula& g, int depth);

// Numbered lines, e.g. "3: axiom proj [p:=<>q, q:=<>p]", "4: cut 3 2", "5: mono R 4".
// Step numbers in the text are 1-based; an optional ":: lhs => rhs" suffix is the claim.
Derivation parse_derivation(const std::string& text);
std::string render_derivation(const Derivation& d);

} // namespace spikit
