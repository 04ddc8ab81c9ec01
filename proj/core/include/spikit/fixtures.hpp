#pragma once

#include <string>
#include <vector>

#include "spikit/correspond.hpp"
#include "spikit/slo.hpp"
#include "spikit/syntax.hpp"

namespace spikit {

enum class FixtureKind { Theory, SloCounterexample, Frame, Profile, Simulation };

std::string fixture_kind_name(FixtureKind k);

// One catalogue entry as stored in fixtures/<name>.fix:
//
//   name: ex-3.1
//   kind: slo_counterexample
//   about: one line of description
//   theory: <>p => p
//   payload:
//     <indented SLO, frame, profile, witness or theory text>
//   claims:
//     validates <>p => p
//     refutes p & <>top => <>p at p=a
//
// Theory lists are separated by ';' and may name presets as @refl, @fun:2, ...
struct FixtureEntry {
    std::string name;
    FixtureKind kind = FixtureKind::Theory;
    std::string about;
    std::string theory;
    std::string payload;
    std::vector<std::string> claims;
};

FixtureEntry parse_fixture(const std::string& text);
std::string render_fixture(const FixtureEntry& e);

// SPIKIT_FIXTURE_DIR from the environment, else the source tree's fixtures/.
std::string fixture_dir();
// Throws Error for an unknown name.
FixtureEntry fixture(const std::string& name, const std::string& dir = fixture_dir());
// Sorted entry names.
std::vector<std::string> list_fixtures(const std::string& dir = fixture_dir());

struct ClaimResult {
    std::string claim;
    bool ok = false;
    bool bounded = false;  // checked on a finite slice only
    std::string detail;
};

struct FixtureReport {
    std::string name;
    std::vector<ClaimResult> results;
    // Set when the payload itself failed to load or a claim could not be read.
    std::string error;

    bool ok() const;
    int passed() const;
};

FixtureReport verify_entry(const FixtureEntry& e, const std::string& dir = fixture_dir());
FixtureReport verify_fixture(const std::string& name, const std::string& dir = fixture_dir());
// Every entry, one task per entry, reports in name order.
std::vector<FixtureReport> verify_all(const std::string& dir = fixture_dir());

// Presets: refl, trans, sym, eucl, dense, fun, wcon, qo, equiv, equiv', lin and
// the parametric fun:n, equiv:n, depth:n, width:n.
std::vector<Implication> theory_preset(const std::string& name);
// ';'-separated implications and @presets.
std::vector<Implication> parse_theory(const std::string& text);

// Named first-order frame properties over R, e.g. reflexive, functional:2,
// weakly-connected, cluster:3. Throws Error for an unknown name.
FO frame_property(const std::string& name);
std::vector<std::string> frame_property_names();

// The parametric algebras: g below a_0..a_n below top, every a_i sent to top.
FiniteSLO alt_fun_algebra(int n);
// The depth counterexample with chains a_k < b_k, c_k < a_{k+1} and side
// chains d_k, e_k.
FiniteSLO depth_algebra(int n);

// Bounded search for a frame with the property whose complex algebra receives
// an sp-embedding of a. The property is evaluated on frames over the
// algebra's relations; universal properties also prune partial frames.
struct EmbeddingSearch {
    bool found = false;
    int bound = 0;
    long maps = 0;  // point labellings tried
    Frame frame;
    std::vector<PSet> map;
};
EmbeddingSearch search_embedding(const FiniteSLO& a, const FO& property, int max_points);

} // namespace spikit
