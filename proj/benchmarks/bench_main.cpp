#include <benchmark/benchmark.h>

#include "spikit/calculus.hpp"
#include "spikit/correspond.hpp"
#include "spikit/deciders.hpp"
#include "spikit/fixtures.hpp"
#include "spikit/horn.hpp"
#include "spikit/random.hpp"
#include "spikit/slo.hpp"
#include "spikit/tmred.hpp"

using namespace spikit;

namespace {

const Sym R = intern("R");

Frame chain(int n) {
    Frame f(n);
    f.declare(R);
    for (int i = 0; i + 1 < n; ++i) f.add_edge(R, i, i + 1);
    return f;
}

std::vector<Implication> sample(int count, int depth, unsigned seed) {
    Rng rng(seed);
    FormulaShape shape;
    shape.max_depth = depth;
    std::vector<Implication> out;
    for (int k = 0; k < count; ++k) out.push_back(random_implication(rng, shape));
    return out;
}

} // namespace

static void BM_ClosureQuasiorderChain(benchmark::State& state) {
    ProfileSet pi{named_profile("refl"), named_profile("trans")};
    Frame f = chain(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(closure(pi, f));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ClosureQuasiorderChain)->RangeMultiplier(2)->Range(4, 32)->Complexity();

static void BM_HornEntails(benchmark::State& state) {
    ProfileSet pi{named_profile("eucl"), named_profile("trans")};
    auto imps = sample(64, 3, 11);
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(horn_entails(pi, i));
}
BENCHMARK(BM_HornEntails);

static void BM_Correspondent(benchmark::State& state) {
    auto imps = sample(64, 3, 13);
    Rng rng(17);
    auto fr = random_frame(rng, 4, {R}, 0.4);
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(eval_fo(fr, correspondent(i)));
}
BENCHMARK(BM_Correspondent);

static void BM_FrameValidates(benchmark::State& state) {
    auto imps = sample(64, 3, 19);
    Rng rng(23);
    auto fr = random_frame(rng, static_cast<int>(state.range(0)), {R}, 0.4);
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(frame_validates(fr, i));
}
BENCHMARK(BM_FrameValidates)->Arg(3)->Arg(5)->Arg(8);

static void BM_DecideLin(benchmark::State& state) {
    auto imps = sample(64, 3, 29);
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(decide_lin(i));
}
BENCHMARK(BM_DecideLin);

static void BM_DecideFunN(benchmark::State& state) {
    auto imps = sample(64, 3, 31);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(decide_fun_n(i, n));
}
BENCHMARK(BM_DecideFunN)->DenseRange(1, 3);

static void BM_DecideEquivN(benchmark::State& state) {
    auto imps = sample(64, 3, 37);
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state)
        for (auto& i : imps) benchmark::DoNotOptimize(decide_equiv_n(i, n));
}
BENCHMARK(BM_DecideEquivN)->DenseRange(2, 3);

// The oracle the deciders are tested against, for scale. The query is
// entailed, so every frame up to the bound is visited.
static void BM_BruteForceKr(benchmark::State& state) {
    std::vector<Implication> sigma{parse_implication("<><>p => <>p")};
    auto i = parse_implication("<><><>p => <>p");
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_kr(sigma, i, n).holds);
}
BENCHMARK(BM_BruteForceKr)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

static void BM_SloPoolValidation(benchmark::State& state) {
    std::vector<FiniteSLO> pool;
    for_each_slo(4, {R}, false, [&](const FiniteSLO& a) {
        pool.push_back(a);
        return true;
    });
    auto eucl = parse_implication("<>p & <>q => <>(p & <>q)");
    for (auto _ : state)
        for (auto& a : pool) benchmark::DoNotOptimize(slo_validates(a, eucl));
    state.counters["algebras"] = static_cast<double>(pool.size());
}
BENCHMARK(BM_SloPoolValidation);

static void BM_EmbedElementClassic(benchmark::State& state) {
    auto a = alt_fun_algebra(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(embed(a, Recipe::ElementClassic));
}
BENCHMARK(BM_EmbedElementClassic)->DenseRange(2, 4);

static void BM_ProveEuclidean(benchmark::State& state) {
    std::vector<Implication> sigma{parse_implication("p => <>p"), parse_implication("<>p & <>q => <>(p & q)")};
    auto target = parse_implication("<>p & <>q => <>(p & <>q)");
    for (auto _ : state) benchmark::DoNotOptimize(prove_bounded(sigma, target, 6));
}
BENCHMARK(BM_ProveEuclidean)->Unit(benchmark::kMillisecond);

static void BM_EmbeddingSearch(benchmark::State& state) {
    auto a = alt_fun_algebra(2);
    auto prop = frame_property("functional:2");
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(search_embedding(a, prop, n).found);
}
BENCHMARK(BM_EmbeddingSearch)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

static void BM_SubalgebraCheck(benchmark::State& state) {
    auto m = parse_tm("states: q0 q1 qh; blank: b; delta: q0 b -> q1 b R; q1 b -> q1 b R");
    for (auto _ : state) benchmark::DoNotOptimize(subalgebra_check(m, 3, 3).refutes_probe);
}
BENCHMARK(BM_SubalgebraCheck)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
