#include "spikit/tmred.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <set>
#include <sstream>

#include "spikit/text.hpp"

namespace spikit {

namespace {

bool is_ident(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

Formula D(Sym r, const Formula& f) { return Formula::dia(r, f); }
Formula D(Sym r) { return Formula::dia(r, Formula::top()); }
Formula And(std::vector<Formula> parts) { return Formula::conj(std::move(parts)); }

const Sym P = intern("p");
const Sym Q = intern("q");

// Nesting of next/step diamonds: how far into the grid a formula looks. The
// other relations all end in a sink.
int grid_depth(const Formula& f) {
    switch (f.kind()) {
    case Kind::And: {
        int d = 0;
        for (auto& a : f.args()) d = std::max(d, grid_depth(a));
        return d;
    }
    case Kind::Dia: {
        int below = grid_depth(f.body());
        bool moves = f.sym() == tmrel::next() || f.sym() == tmrel::step();
        return below + (moves ? 1 : 0);
    }
    default:
        return 0;
    }
}

} // namespace

const Transition* TuringMachine::find(const std::string& q, const std::string& a) const {
    for (auto& [key, t] : delta)
        if (key.first == q && key.second == a) return &t;
    return nullptr;
}

void validate_machine(const TuringMachine& m) {
    auto fail = [](const std::string& msg) { throw PreconditionError("malformed machine: " + msg); };
    if (m.states.empty()) fail("no states");
    std::set<std::string> seen;
    for (auto& q : m.states) {
        if (!is_ident(q)) fail("bad state name '" + q + "'");
        if (!seen.insert(q).second) fail("state '" + q + "' listed twice");
    }
    seen.clear();
    for (auto& a : m.alphabet) {
        if (!is_ident(a)) fail("bad symbol name '" + a + "'");
        if (!seen.insert(a).second) fail("symbol '" + a + "' listed twice");
    }
    if (!contains(m.states, m.start)) fail("start state '" + m.start + "' is not a state");
    if (!contains(m.states, m.halt)) fail("halt state '" + m.halt + "' is not a state");
    if (m.start == m.halt) fail("start and halt state coincide");
    if (!contains(m.alphabet, m.blank)) fail("blank '" + m.blank + "' is not in the alphabet");
    std::set<std::pair<std::string, std::string>> keys;
    for (auto& [key, t] : m.delta) {
        const auto& [q, a] = key;
        if (!contains(m.states, q) || !contains(m.states, t.state)) fail("transition uses an undeclared state");
        if (!contains(m.alphabet, a) || !contains(m.alphabet, t.symbol)) fail("transition uses an undeclared symbol");
        if (t.move != 'L' && t.move != 'R') fail("moves must be L or R");
        if (q == m.halt) fail("the halt state has a transition");
        if (t.state == m.start) fail("the start state is the target of a transition");
        if (!keys.insert(key).second) fail("two transitions for (" + q + ", " + a + ")");
    }
}

TuringMachine parse_tm(const std::string& text) {
    TuringMachine m;
    std::optional<std::string> start, halt, blank;
    std::vector<std::string> alphabet;
    bool in_delta = false;
    std::size_t offset = 0;
    for (auto& line : text::lines(text)) {
        std::string body = line.substr(0, line.find('#'));
        for (auto& item : text::split(body, ";")) {
            auto [key, value] = text::key_value(item);
            if (key.empty() || key.find("->") != std::string::npos) {
                if (!in_delta) throw ParseError("expected 'key: value', got '" + item + "'", offset);
                value = item;
                key = "delta";
            } else {
                in_delta = key == "delta";
            }
            auto words = text::split(value, " \t,");
            if (key == "states") {
                m.states = words;
            } else if (key == "start" || key == "halt" || key == "blank") {
                if (words.size() != 1) throw ParseError("'" + key + "' takes one name", offset);
                (key == "start" ? start : key == "halt" ? halt : blank) = words[0];
            } else if (key == "alphabet") {
                alphabet = words;
            } else if (key == "delta") {
                if (words.empty()) continue;
                // q a -> q' a' M
                if (words.size() != 6 || words[2] != "->")
                    throw ParseError("transitions look like 'q a -> q2 a2 R', got '" + value + "'", offset);
                if (words[5] != "L" && words[5] != "R") throw ParseError("move must be L or R", offset);
                m.delta.push_back({{words[0], words[1]}, Transition{words[3], words[4], words[5][0]}});
            } else {
                throw ParseError("unknown key '" + key + "'", offset);
            }
        }
        offset += line.size() + 1;
    }
    if (m.states.empty()) throw ParseError("missing 'states:'", 0);
    if (!blank) throw ParseError("missing 'blank:'", 0);
    m.start = start.value_or(m.states.front());
    m.halt = halt.value_or(m.states.back());
    m.blank = *blank;
    if (alphabet.empty()) {
        alphabet.push_back(m.blank);
        for (auto& [key, t] : m.delta)
            for (auto* s : {&key.second, &t.symbol})
                if (!contains(alphabet, *s)) alphabet.push_back(*s);
    }
    m.alphabet = alphabet;
    validate_machine(m);
    return m;
}

std::string render_tm(const TuringMachine& m) {
    std::ostringstream out;
    out << "states: " << text::join(m.states, " ") << "\n";
    out << "start: " << m.start << "\n";
    out << "halt: " << m.halt << "\n";
    out << "alphabet: " << text::join(m.alphabet, " ") << "\n";
    out << "blank: " << m.blank << "\n";
    out << "delta:\n";
    for (auto& [key, t] : m.delta)
        out << "  " << key.first << " " << key.second << " -> " << t.state << " " << t.symbol << " " << t.move << "\n";
    return out.str();
}

namespace tmrel {
Sym next() { return intern("Next"); }
Sym step() { return intern("Step"); }
Sym head() { return intern("Head"); }
Sym left() { return intern("Left"); }
Sym right() { return intern("Right"); }
Sym fresh() { return intern("HaltR"); }
Sym state(const std::string& q) { return intern("St_" + q); }
Sym symbol(const std::string& a) { return intern("Sym_" + a); }
} // namespace tmrel

std::vector<EncodedAxiom> encode_labelled(const TuringMachine& m) {
    validate_machine(m);
    using namespace tmrel;
    const Sym nx = next(), st = step(), hd = head(), lf = left(), rt = right();
    const Formula p = Formula::var(P), q = Formula::var(Q);
    std::vector<EncodedAxiom> out;
    auto add = [&](std::string label, Formula lhs, Formula rhs) {
        out.push_back({std::move(label), Implication{std::move(lhs), std::move(rhs)}});
    };

    add("next-fun", And({D(nx, p), D(nx, q)}), D(nx, And({p, q})));
    add("step-fun", And({D(st, p), D(st, q)}), D(st, And({p, q})));
    add("next-step-comm", D(nx, D(st, p)), D(st, D(nx, p)));
    add("step-next-comm", D(st, D(nx, p)), D(nx, D(st, p)));

    const Formula halted = D(state(m.halt));
    add("no-halt", halted, p);
    std::vector<Sym> ops{nx, st, hd, lf, rt};
    for (auto& s : m.states) ops.push_back(state(s));
    for (auto& a : m.alphabet) ops.push_back(symbol(a));
    for (Sym r : ops) add("halt-back " + name_of(r), D(r, halted), halted);

    add("left-gen1", D(nx, D(lf)), D(lf));
    add("left-gen2", D(nx, D(hd)), D(lf));
    add("right-gen1", D(hd), D(nx, D(rt)));
    add("right-gen2", D(rt), D(nx, D(rt)));

    for (auto& s : m.states) {
        add("state-forward " + s, D(state(s)), D(nx, D(state(s))));
        add("state-back " + s, D(nx, D(state(s))), D(state(s)));
    }
    add("starts-blank", D(state(m.start)), D(symbol(m.blank)));

    for (auto& [key, t] : m.delta) {
        const auto& [s, a] = key;
        std::string tag = s + " " + a;
        if (t.move == 'L') {
            add("move-left " + tag, D(nx, And({D(state(s)), D(hd), D(symbol(a))})),
                D(st, And({D(state(t.state)), D(hd), D(nx, D(symbol(t.symbol)))})));
        } else {
            add("move-right " + tag, And({D(state(s)), D(hd), D(symbol(a))}),
                D(st, And({D(symbol(t.symbol)), D(state(t.state)), D(nx, D(hd))})));
        }
    }
    for (auto& a : m.alphabet) {
        add("no-change-left " + a, And({D(symbol(a)), D(lf)}), D(st, D(symbol(a))));
        add("no-change-right " + a, And({D(symbol(a)), D(rt)}), D(st, D(symbol(a))));
    }

    add("trigger", And({D(state(m.start)), D(hd), D(fresh(), p)}), p);
    return out;
}

std::vector<Implication> encode(const TuringMachine& m) {
    std::vector<Implication> out;
    for (auto& e : encode_labelled(m)) out.push_back(e.imp);
    return out;
}

std::string Configuration::symbol_at(int cell, const std::string& blank) const {
    return cell >= 0 && cell < static_cast<int>(tape.size()) ? tape[cell] : blank;
}

SimResult simulate(const TuringMachine& m, int steps) {
    if (steps < 0) throw PreconditionError("simulate: steps must be non-negative");
    validate_machine(m);
    SimResult r;
    Configuration c{m.start, {m.blank}, 0};
    r.configs.push_back(c);
    for (int k = 0; k < steps; ++k) {
        if (c.state == m.halt) break;
        const std::string a = c.symbol_at(c.head, m.blank);
        const Transition* t = m.find(c.state, a);
        if (!t) {
            r.violation = "no transition for (" + c.state + ", " + a + ") at step " + std::to_string(k);
            break;
        }
        if (t->move == 'L' && c.head == 0) {
            r.violation = "head moves left of the start cell at step " + std::to_string(k);
            break;
        }
        if (c.head >= static_cast<int>(c.tape.size())) c.tape.resize(c.head + 1, m.blank);
        c.tape[c.head] = t->symbol;
        c.state = t->state;
        c.head += t->move == 'L' ? -1 : 1;
        if (c.head >= static_cast<int>(c.tape.size())) c.tape.resize(c.head + 1, m.blank);
        r.configs.push_back(c);
    }
    r.halted = r.configs.back().state == m.halt;
    return r;
}

GridModel grid_frame(const TuringMachine& m, int rows, int cols) {
    if (rows < 1 || cols < 1) throw PreconditionError("grid_frame: rows and cols must be positive");
    if (rows * cols + 2 > kMaxPoints)
        throw CapError("grid of " + std::to_string(rows) + "x" + std::to_string(cols) + " exceeds the point cap");
    GridModel g;
    g.sim = simulate(m, rows - 1);
    if (!g.sim.violation.empty()) throw PreconditionError("grid_frame: " + g.sim.violation);
    g.rows = static_cast<int>(g.sim.configs.size());
    g.cols = cols;

    using namespace tmrel;
    Frame fr;
    for (int r = 0; r < g.rows; ++r)
        for (int n = 0; n < cols; ++n) fr.add_point("d" + std::to_string(n) + "_" + std::to_string(r));
    g.g = fr.add_point("g");
    g.g2 = fr.add_point("g2");

    for (Sym r : {next(), step(), head(), left(), right()}) fr.declare(r);
    for (auto& s : m.states) fr.declare(state(s));
    for (auto& a : m.alphabet) fr.declare(symbol(a));
    fr.declare(fresh());

    for (int r = 0; r < g.rows; ++r) {
        const Configuration& c = g.sim.configs[r];
        for (int n = 0; n < cols; ++n) {
            int x = g.d(n, r);
            if (n + 1 < cols) fr.add_edge(next(), x, g.d(n + 1, r));
            if (r + 1 < g.rows) fr.add_edge(step(), x, g.d(n, r + 1));
            fr.add_edge(state(c.state), x, g.g);
            fr.add_edge(symbol(c.symbol_at(n, m.blank)), x, g.g);
            if (n == c.head) fr.add_edge(head(), x, g.g);
            if (n < c.head) fr.add_edge(left(), x, g.g);
            if (n > c.head) fr.add_edge(right(), x, g.g);
        }
    }
    fr.add_edge(fresh(), g.d(0, 0), g.g2);
    g.model.frame = std::move(fr);
    return g;
}

GridReport verify_grid(const TuringMachine& m, const GridModel& g, int interior_rows, int interior_cols) {
    using namespace tmrel;
    GridReport rep;
    const Frame& fr = g.model.frame;
    auto at = [&](int n, int r) { return "d" + std::to_string(n) + "_" + std::to_string(r); };
    const int rows = std::min(interior_rows, g.rows);
    const int cols = std::min(interior_cols, g.cols);

    for (int r = 0; r < g.rows; ++r)
        if (fr.succ(state(m.halt), g.d(0, r))) {
            rep.halt_row = r;
            rep.failures.push_back("no-halt fails at row " + std::to_string(r));
            break;
        }

    auto dia_top = [&](Sym rel, int x) { return fr.succ(rel, x) != 0; };
    for (int r = 0; r < rows; ++r) {
        const Configuration& c = g.sim.configs[r];
        for (int n = 0; n < cols; ++n) {
            int x = g.d(n, r);
            // Only where both witnesses exist in the truncation.
            if (n + 1 >= g.cols || r + 1 >= g.rows) continue;
            if (fr.succ(next(), x) != bit(g.d(n + 1, r))) rep.failures.push_back("(i) next at " + at(n, r));
            if (c.state != m.halt && fr.succ(step(), x) != bit(g.d(n, r + 1)))
                rep.failures.push_back("(ii) step at " + at(n, r));
            if (!dia_top(state(c.state), x)) rep.failures.push_back("(iii) state at " + at(n, r));
            if (!dia_top(symbol(c.symbol_at(n, m.blank)), x)) rep.failures.push_back("(iv) symbol at " + at(n, r));
            if (n == c.head && !dia_top(head(), x)) rep.failures.push_back("(v) head at " + at(n, r));
            PSet ns = 0, sn = 0;
            for_each_bit(fr.succ(step(), x), [&](int y) { ns |= fr.succ(next(), y); });
            for_each_bit(fr.succ(next(), x), [&](int y) { sn |= fr.succ(step(), y); });
            if (ns != sn) rep.failures.push_back("commutativity fails at " + at(n, r));
        }
    }

    auto axioms = encode_labelled(m);
    axioms.pop_back();  // the trigger is not part of E_M^0
    std::vector<std::future<std::vector<std::string>>> jobs;
    std::vector<int> counts(axioms.size(), 0);
    for (std::size_t k = 0; k < axioms.size(); ++k) {
        jobs.push_back(std::async(std::launch::async, [&, k] {
            const auto& ax = axioms[k];
            int depth = std::max(grid_depth(ax.imp.lhs), grid_depth(ax.imp.rhs));
            std::vector<std::string> bad;
            for (int r = 0; r < g.rows; ++r)
                for (int n = 0; n < g.cols; ++n) {
                    bool inside = r < rows && n < cols;
                    bool margin = depth == 0 || (r + depth < g.rows && n + depth < g.cols);
                    if (!inside || !margin) continue;
                    ++counts[k];
                    if (!frame_validates_at(fr, ax.imp, g.d(n, r))) bad.push_back(ax.label + " fails at " + at(n, r));
                }
            return bad;
        }));
    }
    for (auto& j : jobs) {
        auto bad = j.get();
        rep.failures.insert(rep.failures.end(), bad.begin(), bad.end());
    }
    for (int c : counts) rep.axiom_checks += c;
    return rep;
}

SubalgebraReport subalgebra_check(const TuringMachine& m, int rows, int cols) {
    if (rows * cols + 2 > 11) throw CapError("the admissible-family check is limited to 11 points");
    GridModel g = grid_frame(m, rows, cols);
    const Frame& fr = g.model.frame;
    const int d00 = g.d(0, 0);
    std::vector<PSet> family;
    for (PSet s = 0; s <= fr.all(); ++s)
        if (!has(s, g.g2) || has(s, d00)) family.push_back(s);

    using namespace tmrel;
    SubalgebraReport rep;
    rep.algebra = slo_from_admissible(fr, family);
    const Formula p = Formula::var(P);
    rep.probe = Implication{And({D(state(m.start)), D(head()), p, D(fresh())}), D(fresh(), p)};
    rep.validates_trigger = slo_validates(rep.algebra, encode(m).back());

    const auto& sets = rep.algebra.sets();
    auto it = std::find(sets.begin(), sets.end(), bit(d00));
    if (it != sets.end()) {
        rep.witness = {{P, static_cast<int>(it - sets.begin())}};
        int lhs = eval_term(rep.algebra, rep.probe.lhs, rep.witness);
        int rhs = eval_term(rep.algebra, rep.probe.rhs, rep.witness);
        rep.refutes_probe = !rep.algebra.leq(lhs, rhs);
    }
    return rep;
}

} // namespace spikit
