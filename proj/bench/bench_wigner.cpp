#include <benchmark/benchmark.h>
#include <omp.h>

#include "orient/phase_space.hpp"
#include "orient/states.hpp"

using namespace orient;

namespace {

RotorState cat_state(int L) {
    CoherentSpec a;
    a.sigma = 1.0;
    a.center_angle = kPi;
    a.center_m = 4;
    CoherentSpec b = a;
    b.center_m = -4;
    const MBasisSpec basis(L, 1, 1);
    return superpose({coherent_state(a, basis), coherent_state(b, basis)}, {1.0, 1.0});
}

void BM_MomentumPath(benchmark::State& st, KernelBackend backend) {
    const int L = static_cast<int>(st.range(0));
    const RotorState s = cat_state(L);
    const GridSpec spec{{16, 2, 2}, MomentumWindow::symmetric(L, 1, 1)};
    for (auto _ : st) {
        benchmark::DoNotOptimize(wigner_from_m_basis(s, spec, backend));
    }
    st.counters["threads"] = backend == KernelBackend::parallel ? omp_get_max_threads() : 1;
    st.counters["points/s"] = benchmark::Counter(static_cast<double>(spec.angles.size() * spec.momenta.size()),
                                                 benchmark::Counter::kIsIterationInvariantRate);
}

void BM_AnglePath(benchmark::State& st) {
    const int j = static_cast<int>(st.range(0));
    const JKMBasisSpec b(j, std::pair{0, 0});
    const RotorState s = RotorState::normalized(b, CVector::Ones(static_cast<Eigen::Index>(b.dimension())));
    const GridSpec spec{{1, 32, 1}, MomentumWindow::symmetric(0, 40, 0)};
    for (auto _ : st) {
        benchmark::DoNotOptimize(wigner_from_angle_basis(s, spec));
    }
}

}  // namespace

BENCHMARK_CAPTURE(BM_MomentumPath, parallel, KernelBackend::parallel)->Arg(10)->Arg(14)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MomentumPath, serial_reference, KernelBackend::serial_reference)
    ->Arg(10)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AnglePath)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
