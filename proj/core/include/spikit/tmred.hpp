#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spikit/kripke.hpp"
#include "spikit/slo.hpp"
#include "spikit/syntax.hpp"

namespace spikit {

struct Transition {
    std::string state;   // q'
    std::string symbol;  // a'
    char move = 'R';     // 'L' or 'R'
};

struct TuringMachine {
    std::vector<std::string> states;
    std::string start;
    std::string halt;
    std::vector<std::string> alphabet;
    std::string blank;
    // Keyed by (state, symbol), kept in declaration order for stable output.
    std::vector<std::pair<std::pair<std::string, std::string>, Transition>> delta;

    const Transition* find(const std::string& q, const std::string& a) const;
};

// Throws PreconditionError unless the start state is never a target, the halt
// state has no transitions, and all names are declared identifiers.
void validate_machine(const TuringMachine& m);

// "states: q0 q1 qh; blank: b; delta: q0 b -> q1 b R; q1 b -> qh b R"
// Optional "start:", "halt:" and "alphabet:" entries; by default the first state
// starts, the last halts, and the alphabet is the blank plus every symbol in delta.
// Newlines work as separators too.
TuringMachine parse_tm(const std::string& text);
std::string render_tm(const TuringMachine& m);

// Relation names used by the encoding.
namespace tmrel {
Sym next();
Sym step();
Sym head();
Sym left();
Sym right();
Sym fresh();  // the relation of the incompleteness trigger
Sym state(const std::string& q);
Sym symbol(const std::string& a);
} // namespace tmrel

struct EncodedAxiom {
    std::string label;
    Implication imp;
};

// E_M with a label per implication; the last entry is the incompleteness trigger,
// everything before it is E_M^0.
std::vector<EncodedAxiom> encode_labelled(const TuringMachine& m);
std::vector<Implication> encode(const TuringMachine& m);

struct Configuration {
    std::string state;
    std::vector<std::string> tape;  // grows to the right as the head visits cells
    int head = 0;

    std::string symbol_at(int cell, const std::string& blank) const;
};

struct SimResult {
    std::vector<Configuration> configs;  // configs[0] is the start
    bool halted = false;
    std::string violation;  // non-empty when the head left the tape or delta was undefined
};

SimResult simulate(const TuringMachine& m, int steps);

struct GridModel {
    KripkeModel model;
    int rows = 0;
    int cols = 0;
    int g = -1;
    int g2 = -1;  // the sink reached by the fresh relation
    SimResult sim;

    int d(int n, int m) const { return m * cols + n; }
};

// The computation truncated to rows configurations and cols cells. A halting
// machine contributes only the rows it reaches. Throws PreconditionError when
// the simulation reports a violation.
GridModel grid_frame(const TuringMachine& m, int rows, int cols);

struct GridReport {
    std::vector<std::string> failures;
    std::optional<int> halt_row;  // first row whose state is the halting one
    int axiom_checks = 0;

    bool ok() const { return failures.empty(); }
};

GridReport verify_grid(const TuringMachine& m, const GridModel& g, int interior_rows, int interior_cols);

struct SubalgebraReport {
    FiniteSLO algebra;
    bool validates_trigger = false;
    bool refutes_probe = false;
    Implication probe;  // <st_q0>top & <head>top & p & <fresh>top => <fresh>p
    SloValuation witness;
};

// Builds the subalgebra of all sets that contain d_{0,0} whenever they contain
// the fresh sink, on a rows x cols truncation, and evaluates the trigger and probe.
SubalgebraReport subalgebra_check(const TuringMachine& m, int rows = 3, int cols = 3);

} // namespace spikit
