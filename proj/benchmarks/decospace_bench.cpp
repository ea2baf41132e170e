#include <benchmark/benchmark.h>

#include <vector>

#include "decospace/covering.hpp"
#include "decospace/criteria.hpp"
#include "decospace/frames.hpp"
#include "decospace/grid.hpp"
#include "decospace/testfields.hpp"

using namespace decospace;

namespace {

// Fields cache their transform, so each iteration rebuilds the field from the
// raw samples to time an actual FFT (plus one copy of the input vector).
void BM_dft_1d(benchmark::State& state) {
    GridSpec g(1, static_cast<int>(state.range(0)), 16.0);
    auto f = random_band_limited(g, 7);
    std::vector<cdouble> samples(f.space().begin(), f.space().end());
    for (auto _ : state) {
        auto fresh = SampledField::from_space(g, samples);
        benchmark::DoNotOptimize(fresh.freq().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_dft_1d)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_dft_2d(benchmark::State& state) {
    GridSpec g(2, static_cast<int>(state.range(0)), 8.0);
    auto f = random_band_limited(g, 7);
    std::vector<cdouble> samples(f.space().begin(), f.space().end());
    for (auto _ : state) {
        auto fresh = SampledField::from_space(g, samples);
        benchmark::DoNotOptimize(fresh.freq().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_dft_2d)->Arg(64)->Arg(256);

struct FramePipeline {
    GridSpec grid{1, 2048, 16.0};
    StructuredCovering cov = build_besov_covering(1);
    TruncatedIndexSet idx = truncate(cov, 24.0);
    FrameSystem sys = FrameSystem::create(cov, idx, grid, 0.0625, PrototypeSpec::gaussian(16.0));
    SampledField f = random_band_limited(grid, 7);
    CoefficientArray coeffs = analyze(f, sys);
};

void BM_frame_analyze(benchmark::State& state) {
    FramePipeline pipe;
    for (auto _ : state) {
        auto C = analyze(pipe.f, pipe.sys);
        benchmark::DoNotOptimize(C.values.data());
    }
}
BENCHMARK(BM_frame_analyze);

void BM_frame_synthesize(benchmark::State& state) {
    FramePipeline pipe;
    for (auto _ : state) {
        auto g = synthesize(pipe.coeffs, pipe.sys);
        benchmark::DoNotOptimize(g.space().data());
    }
}
BENCHMARK(BM_frame_synthesize);

void BM_schur_matrix_frame(benchmark::State& state) {
    auto cov = build_alpha_covering(1, 0.5, 1.0);
    auto idx = truncate(cov, static_cast<double>(state.range(0)));
    std::vector<PrototypeSpec> protos(idx.indices.size(), PrototypeSpec::gaussian(0.5));
    CriteriaParams prm;
    QuadratureSpec quad{64};
    for (auto _ : state) {
        auto M = schur_matrix_frame(cov, idx, protos, ModerateWeightSpec::one(), prm, quad);
        benchmark::DoNotOptimize(M.entries.data());
    }
    state.SetItemsProcessed(state.iterations() * idx.indices.size() * idx.indices.size());
}
BENCHMARK(BM_schur_matrix_frame)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
