// Microbenchmarks for the hot paths: partial traces, subset entropies and
// the full combinatorial-entropy pipeline on random states.

#include <benchmark/benchmark.h>

#include "entangle/measures.hpp"
#include "entangle/verify.hpp"

using namespace entangle;

namespace {

SystemShape qubits(int n) { return SystemShape(std::vector<int>(static_cast<std::size_t>(n), 2)); }

void BM_partial_trace_half(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PureState psi = random_pure_state(qubits(n), 7);
    std::uint64_t mask = (std::uint64_t{1} << (n / 2)) - 1;
    const PartySubset keep(mask, n);
    for (auto _ : state) {
        auto rho = partial_trace(psi, keep);
        benchmark::DoNotOptimize(rho.matrix().data());
    }
}
BENCHMARK(BM_partial_trace_half)->Arg(8)->Arg(10)->Arg(12);

void BM_subset_entropy(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PureState psi = random_pure_state(qubits(n), 11);
    const PartySubset subset(0b101, n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(subset_entropy(psi, subset));
    }
}
BENCHMARK(BM_subset_entropy)->Arg(8)->Arg(10)->Arg(12);

void BM_entanglement_combination(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PureState psi = random_pure_state(qubits(n), 23);
    for (auto _ : state) {
        auto ec = entanglement_combination(psi);
        benchmark::DoNotOptimize(ec.blocks.data());
    }
}
BENCHMARK(BM_entanglement_combination)->Arg(6)->Arg(8)->Arg(10);

void BM_ce_random(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const PureState psi = random_pure_state(qubits(n), 31);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ce(psi).ce);
    }
}
BENCHMARK(BM_ce_random)->Arg(6)->Arg(8)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
