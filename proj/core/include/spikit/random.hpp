#pragma once

// Seeded generators for the property tests, the oracles and the benchmarks.

#include <random>
#include <vector>

#include "spikit/kripke.hpp"
#include "spikit/syntax.hpp"

namespace spikit {

using Rng = std::mt19937_64;

struct FormulaShape {
    int max_depth = 3;
    int vars = 3;       // variables p, q, r, ...
    int max_width = 3;  // conjuncts per level
    std::vector<Sym> relations;  // defaults to {R}
};

// Variable name for index k: p, q, r, s, ...
Sym nth_var(int k);

Formula random_formula(Rng& rng, const FormulaShape& shape);
Implication random_implication(Rng& rng, const FormulaShape& shape);
// Each possible edge present with probability density.
Frame random_frame(Rng& rng, int points, const std::vector<Sym>& relations, double density = 0.35);
KripkeModel random_model(Rng& rng, int points, const std::vector<Sym>& relations, int vars, double density = 0.35);

} // namespace spikit
