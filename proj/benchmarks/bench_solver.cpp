// Copyright 2026 The errmargin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "errmargin/instance.hpp"
#include "errmargin/mixed_bounds.hpp"
#include "errmargin/oracle.hpp"
#include "errmargin/strong_margin.hpp"
#include "errmargin/weak_solver.hpp"

namespace {

using namespace errmargin;

void BM_SolveWeak(benchmark::State &state) {
    Instance inst = instance_from_overlap(0.3, 0.9);
    double margins[] = {0.03, 0.15, 0.5};
    double m = margins[state.range(0)];
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_weak(inst, m));
    }
}
BENCHMARK(BM_SolveWeak)->Arg(0)->Arg(1)->Arg(2);

void BM_SolveStrong(benchmark::State &state) {
    Instance inst = instance_from_overlap(0.3, 0.9);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_strong(inst, 0.2));
    }
}
BENCHMARK(BM_SolveStrong);

void BM_CheckCertificate(benchmark::State &state) {
    Instance inst = instance_from_overlap(0.3, 0.9);
    Solution sol = solve_weak(inst, 0.15);
    for (auto _ : state) {
        benchmark::DoNotOptimize(check_certificate(inst.caller(), sol.povm, sol.cert));
    }
}
BENCHMARK(BM_CheckCertificate);

void BM_OraclePureWeak(benchmark::State &state) {
    Instance inst = instance_from_overlap(0.3, 0.9);
    SearchConfig cfg;
    cfg.coarse_grid = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle_pure_weak(inst, 0.15, cfg));
    }
}
BENCHMARK(BM_OraclePureWeak)->Arg(60)->Arg(180)->Unit(benchmark::kMillisecond);

void BM_Fidelity(benchmark::State &state) {
    DensityMatrix rho1 = DensityMatrix::qubit({0.3, -0.2, 0.5});
    DensityMatrix rho2 = DensityMatrix::qubit({-0.1, 0.4, 0.6});
    for (auto _ : state) {
        benchmark::DoNotOptimize(fidelity(rho1, rho2));
    }
}
BENCHMARK(BM_Fidelity);

}  // namespace

BENCHMARK_MAIN();
