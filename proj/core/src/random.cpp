#include "spikit/random.hpp"

namespace spikit {

Sym nth_var(int k) {
    static const char* names[] = {"p", "q", "r", "s", "t", "u"};
    if (k < 6) return intern(names[k]);
    return intern("p" + std::to_string(k));
}

namespace {

Formula gen(Rng& rng, const FormulaShape& shape, int depth, const std::vector<Sym>& rels) {
    std::uniform_int_distribution<int> width(1, shape.max_width);
    std::uniform_int_distribution<int> var(0, shape.vars - 1);
    std::uniform_int_distribution<int> rel(0, static_cast<int>(rels.size()) - 1);
    std::uniform_int_distribution<int> coin(0, 99);
    int w = width(rng);
    std::vector<Formula> parts;
    for (int i = 0; i < w; ++i) {
        int roll = coin(rng);
        if (depth > 0 && roll < 50)
            parts.push_back(Formula::dia(rels[rel(rng)], gen(rng, shape, depth - 1, rels)));
        else if (roll < 92 && shape.vars > 0)
            parts.push_back(Formula::var(nth_var(var(rng))));
        else
            parts.push_back(Formula::top());
    }
    return Formula::conj(std::move(parts));
}

} // namespace

Formula random_formula(Rng& rng, const FormulaShape& shape) {
    std::vector<Sym> rels = shape.relations;
    if (rels.empty()) rels.push_back(intern("R"));
    return gen(rng, shape, shape.max_depth, rels);
}

Implication random_implication(Rng& rng, const FormulaShape& shape) {
    Formula l = random_formula(rng, shape);
    Formula r = random_formula(rng, shape);
    return {l, r};
}

Frame random_frame(Rng& rng, int points, const std::vector<Sym>& relations, double density) {
    Frame fr(points);
    std::bernoulli_distribution edge(density);
    for (Sym r : relations) {
        fr.declare(r);
        for (int i = 0; i < points; ++i)
            for (int j = 0; j < points; ++j)
                if (edge(rng)) fr.add_edge(r, i, j);
    }
    return fr;
}

KripkeModel random_model(Rng& rng, int points, const std::vector<Sym>& relations, int vars, double density) {
    KripkeModel m{random_frame(rng, points, relations, density), {}};
    std::uniform_int_distribution<PSet> set(0, full_set(points));
    for (int k = 0; k < vars; ++k) m.val[nth_var(k)] = set(rng);
    return m;
}

} // namespace spikit
