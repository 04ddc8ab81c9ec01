#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spikit/correspond.hpp"
#include "spikit/kripke.hpp"

namespace spikit {

// Largest carrier a FiniteSLO may have. Filters and embeddings stay at 64.
inline constexpr int kMaxAlgebraElements = 4096;

// Finite meet-semilattice with monotone operators. Elements are 0..size()-1.
// The order is derived from the meet table (a <= b iff a & b = a).
class FiniteSLO {
public:
    FiniteSLO() = default;
    // Builds the algebra from an explicit meet table. Does not check the axioms;
    // call check_slo_axioms for that.
    FiniteSLO(std::vector<std::string> names, std::vector<std::vector<int>> meet, int top);

    int size() const { return static_cast<int>(names_.size()); }
    int top() const { return top_; }
    std::optional<int> bottom() const { return bottom_; }
    void set_bottom(std::optional<int> b) { bottom_ = b; }

    int meet(int a, int b) const { return meet_[a][b]; }
    bool leq(int a, int b) const { return meet_[a][b] == a; }
    // Throws Error for a relation without a table.
    int dia(Sym rel, int a) const;
    bool has_dia(Sym rel) const { return dia_.count(rel) != 0; }
    void set_dia(Sym rel, std::vector<int> table);
    std::vector<Sym> relations() const;
    const std::vector<int>& dia_table(Sym rel) const;

    const std::string& name(int a) const { return names_.at(a); }
    int index_of(std::string_view name) const;

    // Point sets of the elements when the algebra comes from a frame.
    const std::vector<PSet>& sets() const { return sets_; }
    void set_sets(std::vector<PSet> s) { sets_ = std::move(s); }

    const std::vector<std::vector<int>>& meet_table() const { return meet_; }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<int>> meet_;
    int top_ = 0;
    std::optional<int> bottom_;
    std::map<Sym, std::vector<int>> dia_;
    std::vector<PSet> sets_;
};

using SloValuation = std::map<Sym, int>;

// Empty iff the algebra is an SLO (and a normal one when a bottom is set).
std::vector<std::string> check_slo_axioms(const FiniteSLO& a);

int eval_term(const FiniteSLO& a, const Formula& f, const SloValuation& v);
bool slo_validates(const FiniteSLO& a, const Implication& i);
bool slo_validates(const FiniteSLO& a, const std::vector<Implication>& theory);
// Valuation making the implication fail, if there is one.
std::optional<SloValuation> slo_refutation(const FiniteSLO& a, const Implication& i);
bool slo_validates_rule(const FiniteSLO& a, const Rule& r);

// Cap on frame points for complex_algebra (carrier 2^n).
inline constexpr int kComplexAlgebraCap = 6;
FiniteSLO complex_algebra(const Frame& fr, int cap = kComplexAlgebraCap);
// Subalgebra of the complex algebra on the given family. Throws Error naming the
// witness when the family is not closed.
FiniteSLO slo_from_admissible(const Frame& fr, const std::vector<PSet>& family);
// Least family containing the given sets, W, and closed under intersections and dia+.
std::vector<PSet> close_family(const Frame& fr, const std::vector<PSet>& family);

// A filter as a set of elements (bit i = element i).
using Filter = PSet;
std::vector<Filter> filters(const FiniteSLO& a);
Filter principal_filter(const FiniteSLO& a, int c);

// Bottoms are only matched when both algebras record one.
bool slo_isomorphic(const FiniteSLO& a, const FiniteSLO& b);

// ---------------------------------------------------------------------------
// Embeddings

enum class Recipe {
    ElementClassic,
    ElementSymmetric,
    IdentityRel,
    FunctionalFilter,
    FuncommProperFilter,
    Pi1Iterative,
    TruncatedChain,
};

std::string recipe_name(Recipe r);
Recipe recipe_from_name(const std::string& name);
std::vector<Recipe> all_recipes();

struct Embedding {
    FiniteSLO source;
    Frame target;
    std::vector<PSet> map;  // element -> point set
    Recipe recipe = Recipe::ElementClassic;
    int chain = 0;          // n for truncated_chain
};

struct RecipeOptions {
    int chain = 1;  // truncated_chain: the n of <>^n p => q
    // Relation names used by the bimodal recipes.
    Sym r = intern("R");
    Sym s = intern("S");
    Sym z = intern("Z");
};

// Theory a source algebra must validate for the recipe (rel list = algebra signature).
std::vector<Implication> recipe_precondition(Recipe r, const std::vector<Sym>& rels, const RecipeOptions& opt = {});
// First-order property the target frame is guaranteed to have.
FO recipe_guarantee(Recipe r, const std::vector<Sym>& rels, const RecipeOptions& opt = {});

// Throws PreconditionError when the algebra misses the recipe's theory and
// Error when the built map fails verification.
Embedding embed(const FiniteSLO& a, Recipe r, const RecipeOptions& opt = {});

// Empty when e is an embedding; otherwise a description of the first defect.
std::string embedding_defect(const Embedding& e);
bool verify_embedding(const Embedding& e);

// ---------------------------------------------------------------------------
// Small-instance pool

// Every finite lattice with at most max_elements elements, up to isomorphism.
// Element 0 is the bottom and the last element is the top.
std::vector<FiniteSLO> lattices(int max_elements);

// Calls fn for every SLO on a lattice with at most max_elements elements and one
// monotone operator per relation. With normal = true only operators fixing the
// bottom are produced and the bottom is recorded. Returning false stops early.
void for_each_slo(int max_elements, const std::vector<Sym>& rels, bool normal,
                  const std::function<bool(const FiniteSLO&)>& fn);

// ---------------------------------------------------------------------------
// Text format

FiniteSLO parse_slo(const std::string& text);
std::string render_slo(const FiniteSLO& a);

} // namespace spikit
