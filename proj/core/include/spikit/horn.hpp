#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spikit/kripke.hpp"

namespace spikit {

// (G, S, u, v): a finite rooted frame G together with a missing S-edge u -> v.
// It stands for the universal Horn condition "every copy of G has the S-edge".
struct Profile {
    Frame g;
    int root = 0;
    Sym s = 0;
    int u = 0;
    int v = 0;
};

using ProfileSet = std::vector<Profile>;

// Throws PreconditionError when (u,v) is already an S-edge or G is not rooted.
void validate_profile(const Profile& p);

struct ProfileFlags {
    bool tree = false;
    bool rooted = false;
    bool leapfrog = false;
    bool forward_looking = false;
};
ProfileFlags profile_flags(const Profile& p);

// The Horn implication determined by a tree-profile.
Implication iota_of_profile(const Profile& p);
// for(M) => for(M') with one variable p1, p2, ... per point and M' = M plus the S-edge.
Implication iota_prime_of_profile(const Profile& p);

// Least extension of fr satisfying every profile condition. seed != 0 shuffles
// the worklist order; the result must not depend on it.
Frame closure(const ProfileSet& pi, const Frame& fr, unsigned seed = 0);
// Number of edges the last closure call added. Mostly for tests and benchmarks.
struct ClosureStats {
    int added = 0;
    int rounds = 0;
};
Frame closure(const ProfileSet& pi, const Frame& fr, unsigned seed, ClosureStats& stats);

bool horn_entails(const ProfileSet& pi, const Implication& i);

struct StabilityVerdict {
    bool counterexample = false;
    int bound = 0;
    Frame tree;           // the tree T
    std::size_t profile = 0;
    HomMap hom;           // G -> closure(T) that is not a G -> T homomorphism
};
StabilityVerdict check_stability(const ProfileSet& pi, int max_tree_size = 4);

// Named presets over relation rel: refl, trans, sym, eucl, and the three
// illustrative profiles pi1, pi2, pi3 (which use fixed relation names).
Profile named_profile(const std::string& name, Sym rel);
Profile named_profile(const std::string& name);

// Profile block: a frame block followed by an optional "root: x" line and a
// terminating "profile: S u v" line. A set file is a sequence of such blocks.
Profile parse_profile(const std::string& text);
ProfileSet parse_profile_set(const std::string& text);
std::string render_profile(const Profile& p);

} // namespace spikit
