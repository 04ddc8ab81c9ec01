#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikit/syntax.hpp"

namespace spikit {

// A set of frame points. Frames are capped at 64 points so one word suffices.
using PSet = std::uint64_t;
inline constexpr int kMaxPoints = 64;

inline PSet bit(int i) { return PSet{1} << i; }
inline bool has(PSet s, int i) { return (s >> i) & 1U; }
inline int popcount(PSet s) { return std::popcount(s); }
inline PSet full_set(int n) { return n >= 64 ? ~PSet{0} : (PSet{1} << n) - 1; }

template <class F>
void for_each_bit(PSet s, F&& fn) {
    while (s) {
        int i = std::countr_zero(s);
        fn(i);
        s &= s - 1;
    }
}

// Finite frame. Each relation stores one successor set per point.
class Frame {
public:
    Frame() = default;
    explicit Frame(int n);

    int size() const { return n_; }
    PSet all() const { return full_set(n_); }

    int add_point(std::string name = {});
    const std::string& name(int i) const { return names_.at(i); }
    void set_name(int i, std::string name) { names_.at(i) = std::move(name); }
    // Index of a named point, or -1.
    int find(std::string_view name) const;
    int index_of(std::string_view name) const;  // throws on unknown

    // Declares a relation without edges.
    void declare(Sym rel);
    void add_edge(Sym rel, int from, int to);
    void remove_edge(Sym rel, int from, int to);
    bool edge(Sym rel, int from, int to) const { return has(succ(rel, from), to); }
    PSet succ(Sym rel, int from) const;
    PSet pred(Sym rel, int to) const;
    // Points with at least one rel-successor inside x.
    PSet dia_plus(Sym rel, PSet x) const;
    void set_succ(Sym rel, int from, PSet s);

    // Declared relations in declaration order.
    std::vector<Sym> relations() const;
    bool declares(Sym rel) const { return slot(rel) >= 0; }
    int edge_count() const;
    std::vector<std::pair<int, int>> edges(Sym rel) const;

    // Same points and the same edges for every relation (undeclared = empty).
    friend bool operator==(const Frame& a, const Frame& b);
    // Every edge of a is an edge of b (same point count required).
    friend bool subframe_edges(const Frame& a, const Frame& b);

private:
    int slot(Sym rel) const;
    int n_ = 0;
    std::vector<std::string> names_;
    std::vector<std::pair<Sym, std::vector<PSet>>> rels_;
};

struct KripkeModel {
    Frame frame;
    std::map<Sym, PSet> val;

    PSet val_of(Sym v) const {
        auto it = val.find(v);
        return it == val.end() ? 0 : it->second;
    }
};

// Tree model of a formula. Points are numbered so that parent < child.
struct TreeModel {
    KripkeModel model;
    int root = 0;
    std::vector<int> parent;      // -1 at the root
    std::vector<Sym> parent_rel;  // relation of the edge from the parent
    std::vector<int> origin;      // point of the model this node was built from, if any
    int size() const { return model.frame.size(); }
};

// Truth set of f in m.
PSet truth_set(const KripkeModel& m, const Formula& f);
bool satisfies(const KripkeModel& m, int w, const Formula& f);

TreeModel tree_model(const Formula& f);
// for_r of a rooted acyclic model.
Formula formula_of(const KripkeModel& m, int root);
// Path unfolding from root. Requires the same as formula_of.
TreeModel unravel(const KripkeModel& m, int root);

// Views a rooted tree-shaped frame as a TreeModel (nullopt if it is not one:
// every non-root point needs exactly one incoming edge and all must be reachable).
std::optional<TreeModel> as_tree(const KripkeModel& m, int root);

using HomMap = std::vector<int>;

// Calls fn for every frame homomorphism of src into tgt that maps point i into
// allowed[i] (empty allowed = unconstrained). Returning false from fn stops the
// enumeration. Returns false iff stopped early.
bool for_each_hom(const Frame& src, const Frame& tgt, const std::vector<PSet>& allowed,
                  const std::function<bool(const HomMap&)>& fn);

// Candidate sets for a tree source: cand[i] = targets that node i can be
// mapped to such that the subtree below i maps homomorphically inside allowed.
std::vector<PSet> tree_candidates(const TreeModel& t, const Frame& tgt, const std::vector<PSet>& allowed);

// Model homomorphism respecting the anchor (src point, tgt point).
std::optional<HomMap> find_homomorphism(const TreeModel& src, const KripkeModel& tgt, std::pair<int, int> anchor);
std::optional<HomMap> find_homomorphism(const KripkeModel& src, const KripkeModel& tgt, std::pair<int, int> anchor);
bool is_homomorphism(const KripkeModel& src, const KripkeModel& tgt, const HomMap& h);
bool is_frame_homomorphism(const Frame& src, const Frame& tgt, const HomMap& h);

bool kr_valid(const Implication& i);
bool frame_validates(const Frame& fr, const Implication& i);
// Validity of i at the single point w (every valuation).
bool frame_validates_at(const Frame& fr, const Implication& i, int w);
bool model_validates(const KripkeModel& m, const Implication& i);
bool frame_validates_rule(const Frame& fr, const Rule& r);

// Line-based text format:
//   points: w0 w1 w2
//   R: w0->w1, w1->w2
//   val p: w0 w2
KripkeModel parse_model(const std::string& text);
Frame parse_frame(const std::string& text);
std::string render_frame(const Frame& fr);
std::string render_model(const KripkeModel& m);
// Set of points rendered as "{a,b}".
std::string render_set(const Frame& fr, PSet s);
// Parses "{a,b}" or "a b" into a point set.
PSet parse_set(const Frame& fr, std::string_view text);

} // namespace spikit
