#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spikit/kripke.hpp"
#include "spikit/slo.hpp"
#include "spikit/syntax.hpp"

namespace spikit {

// ---------------------------------------------------------------------------
// Normal forms

enum class NfTheory { FunN, EquivN, Lin };

struct NormalFormSet {
    std::vector<Formula> forms;  // sorted, no duplicates
    NfTheory theory = NfTheory::Lin;
    int n = 0;

    Formula conj() const { return Formula::conj(forms); }
};

// Cap on the size of a fun_n normal form set (it can grow binomially).
inline constexpr std::size_t kNormalFormCap = 20000;

// Throws PreconditionError for multimodal or bot-containing input and CapError
// when a fun_n set outgrows kNormalFormCap.
NormalFormSet normal_forms(const Formula& f, NfTheory theory, int n = 1);

bool decide_fun_n(const Implication& i, int n);
bool decide_equiv_n(const Implication& i, int n);
bool decide_lin(const Implication& i);

// ---------------------------------------------------------------------------
// Linearisations of a tree model

// (u, left, right): u sees both, neither sees the other.
struct RDefect {
    int u = -1;
    int left = -1;
    int right = -1;
};

// Defect of rel with u as close to the root as possible, ties by point order.
std::optional<RDefect> find_defect(const Frame& fr, Sym rel, int root);

// Leaves of the defect-resolution tree, left branch first. Starts from the
// reflexive-transitive closure of the tree. fn returning false stops.
void for_each_linearisation(const TreeModel& t, const std::function<bool(const KripkeModel&)>& fn);
std::vector<KripkeModel> linearisations(const TreeModel& t);

// ---------------------------------------------------------------------------
// Brute-force oracles

// A model on fr refuting i at `world`, with the least valuation that makes the
// antecedent true there.
struct Refutation {
    KripkeModel model;
    int world = 0;
};
std::optional<Refutation> refute_on_frame(const Frame& fr, const Implication& i);

struct KrVerdict {
    bool holds = true;  // holds on every frame up to the bound
    std::optional<Refutation> countermodel;
    int bound = 0;
    long frames_checked = 0;
};

// Enumerates every frame with at most max_points points over the relations of
// sigma and i (or R when there are none). Throws CapError past 2^22 frames per size.
KrVerdict brute_force_kr(const std::vector<Implication>& sigma, const Implication& i, int max_points);

struct SloVerdict {
    bool holds = true;
    std::optional<FiniteSLO> algebra;
    SloValuation valuation;
    int bound = 0;
    long algebras_checked = 0;
};

// Enumerates the SLO pool up to max_elems elements. Normal algebras only when
// bot occurs in the input.
SloVerdict brute_force_slo(const std::vector<Implication>& sigma, const Implication& i, int max_elems);

// ---------------------------------------------------------------------------
// Generated axioms

enum class AxiomFamily { FunN, DepthN, WidthN, EquivNTheory, LinTheory };

AxiomFamily axiom_family_from_name(const std::string& name);
std::string axiom_family_name(AxiomFamily f);
// A single implication for fun_n, depth_n and width_n; a theory otherwise.
std::vector<Implication> gen_axiom(AxiomFamily family, int n);

// ---------------------------------------------------------------------------
// Completeness probe

struct ProbeOptions {
    int vars = 2;
    int depth = 2;
    int lhs_dias = 3;
    int rhs_dias = 2;
    int frame_points = 3;
    int algebra_elems = 4;
    int max_witnesses = 1;
};

struct ProbeWitness {
    Implication implication;
    FiniteSLO algebra;
    SloValuation valuation;
};

// Implications that hold on every frame for sigma up to the frame bound but
// fail in some algebra for sigma. Empirical only.
std::vector<ProbeWitness> completeness_probe(const std::vector<Implication>& sigma, const ProbeOptions& opt = {});

// All canonical unimodal formulas over the first `vars` variables with at most
// max_dias diamonds and modal depth at most depth.
std::vector<Formula> enumerate_formulas(int vars, int max_dias, int depth, Sym rel);

} // namespace spikit
