#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikit/kripke.hpp"

namespace spikit {

// One element of Z: a point of every source frame and a point of the target.
struct ZTuple {
    std::vector<int> xs;
    int y = -1;

    friend bool operator==(const ZTuple&, const ZTuple&) = default;
    friend auto operator<=>(const ZTuple&, const ZTuple&) = default;
};

// (F_i, g_i) >>_Z (G, h, w)
struct SimulationWitness {
    std::vector<Frame> sources;
    std::vector<HomMap> g;  // tree -> sources[i]
    Frame tree;
    Frame target;
    HomMap h;  // tree -> target
    int anchor = 0;
    std::vector<ZTuple> z;
};

// Which of the three conditions failed, if any.
struct SimulationCheck {
    bool s1 = true;
    bool s2 = true;
    bool s3 = true;
    std::string detail;

    bool ok() const { return s1 && s2 && s3; }
};

// Throws PreconditionError when a map is not a homomorphism or a tuple has the
// wrong arity or an out-of-range point.
SimulationCheck check_simulation(const SimulationWitness& sw);
bool verify_simulation(const SimulationWitness& sw);

// (s3) by brute force over every subset of the tree. Throws CapError past 12
// tree points. check_simulation uses an equivalent direct test instead.
bool s3_exhaustive(const SimulationWitness& sw);

// The premise of the pointwise criterion: (F_i, f_i) >>_Z (G, id, v) for all v.
bool verify_pointwise(const std::vector<Frame>& sources, const std::vector<HomMap>& f, const Frame& g,
                      const std::vector<ZTuple>& z);

// Rooted trees with at most max_points points, edges labelled by rels, one per
// isomorphism class. Point 0 is the root and parents precede children.
std::vector<Frame> labelled_trees(int max_points, const std::vector<Sym>& rels);

struct WitnessSearch {
    int bound = 0;
    long trees = 0;
    long homs = 0;
    std::vector<SimulationWitness> witnesses;  // one per (tree, h)
    std::optional<SimulationWitness> failure;  // tree and h for which nothing was found

    bool ok() const { return !failure; }
};

// For every tree up to tree_bound points and every h into g, looks for source
// homomorphisms and the largest Z meeting (s2) and (s3), then checks (s1).
// Success certifies the simulation only for trees up to the bound.
WitnessSearch search_witness(const std::vector<Frame>& sources, const Frame& g, int tree_bound);

// Text form: frame blocks introduced by "source <name>", "target" and "tree",
// followed by "anchor: w", "Z: (x0,y0)->v0, ..." and maps "g1: w->x0, ...",
// "h: w->v0". With no tree block the file describes the pointwise criterion and
// the g maps go from the target to the sources.
struct WitnessFile {
    std::vector<std::string> source_names;
    SimulationWitness witness;
    bool pointwise = false;
};
WitnessFile parse_witness(const std::string& text);
std::string render_witness(const WitnessFile& w);
// verify_pointwise or verify_simulation, whichever the file describes.
bool verify_witness_file(const WitnessFile& w);

} // namespace spikit
