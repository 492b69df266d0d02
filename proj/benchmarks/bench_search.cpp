// Copyright 2026 The slaforge Authors.
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

#include <random>
#include <string>
#include <vector>

#include "slaforge/search.hpp"
#include "slaforge/simulator.hpp"

namespace {

using namespace slaforge;

std::pair<ArrivalTrace, CapacityTrace> desk_trace() {
    Matrix<double> lambda(2, 2);
    lambda(0, 0) = 3.0;
    lambda(0, 1) = 2.0;
    lambda(1, 0) = 1.0;
    lambda(1, 1) = 2.0;
    const auto inst = build_instance({"k0", "k1"}, {"b0", "b1"}, lambda, Matrix<double>(2, 2, 1.0), 10.0, 1.0);
    return generate_synthetic_trace(inst, 365 * 3, 0.9, 808);
}

void BM_EvaluateBatch(benchmark::State& state) {
    const auto [arr, cap] = desk_trace();
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Policy> batch;
    for (int i = 0; i < 16; ++i) {
        std::vector<double> raw(search_dimension(PolicyClass::BoroughBudget, 2, 2));
        for (double& v : raw) v = u(gen);
        batch.push_back(policy_from_vector(PolicyClass::BoroughBudget, raw, arr, cap));
    }
    MetricsConfig m;
    m.risk = Matrix<double>(2, 2, 1.0);
    SimulationConfig cfg;
    cfg.review_period = 30;
    const auto threads = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_policy_batch(batch, arr, cap, cfg, m, 1, threads));
}
BENCHMARK(BM_EvaluateBatch)->Arg(1)->Arg(4)->UseRealTime();

void BM_Hypervolume(benchmark::State& state) {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Objectives> pts(static_cast<std::size_t>(state.range(0)));
    for (auto& p : pts) p = {u(gen), u(gen)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(pareto_filter(pts));
        benchmark::DoNotOptimize(hypervolume(pts, {1.0, 1.0}));
    }
}
BENCHMARK(BM_Hypervolume)->Arg(64)->Arg(4096);

void BM_DeskSearch(benchmark::State& state) {
    const auto [arr, cap] = desk_trace();
    MetricsConfig m;
    m.risk = Matrix<double>(2, 2, 1.0);
    m.sla_percentile = 90.0;
    SimulationConfig cfg;
    cfg.review_period = 30;
    cfg.fcfs_violation = 0.3;
    SearchConfig sc;
    sc.iterations = 10;
    sc.batch_size = 16;
    sc.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_search(arr, cap, cfg, m, sc));
}
BENCHMARK(BM_DeskSearch)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
