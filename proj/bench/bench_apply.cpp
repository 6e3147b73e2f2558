#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>
#include <memory>

#include "csk/kernels.hpp"

namespace {

csk::GridFunction profile(std::size_t n) {
    auto v = csk::make_grid(-10, 10, n);
    for (std::size_t i = 0; i < n; ++i) v.values[i] = 1 + 0.3 * std::exp(-v.t(i) * v.t(i));
    v.decay_plus = v.decay_minus = 2;
    v.limit_plus = v.limit_minus = 1;
    return v;
}

const csk::Operator& op_for(const csk::GridFunction& v) {
    static const csk::ProblemParams pp{3, 0.5, 1.8};
    static thread_local std::size_t n = 0;
    static thread_local std::unique_ptr<csk::Operator> op;
    if (n != v.n()) {
        op = std::make_unique<csk::Operator>(csk::make_kernel(pp, csk::make_mode(0, 3)), v.h());
        n = v.n();
    }
    return *op;
}

void BM_apply_serial(benchmark::State& st) {
    const auto v = profile(static_cast<std::size_t>(st.range(0)));
    const auto& op = op_for(v);
    for (auto _ : st) benchmark::DoNotOptimize(op.apply_serial(v));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_apply_parallel(benchmark::State& st) {
    const auto v = profile(static_cast<std::size_t>(st.range(0)));
    const auto& op = op_for(v);
    st.counters["threads"] = omp_get_max_threads();
    for (auto _ : st) benchmark::DoNotOptimize(op.apply(v));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_apply_serial)->RangeMultiplier(2)->Range(512, 8192)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_apply_parallel)->RangeMultiplier(2)->Range(512, 8192)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
