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

#include <string>
#include <vector>

#include "slaforge/metrics.hpp"
#include "slaforge/simulator.hpp"

namespace {

using namespace slaforge;

// Six categories in five boroughs at roughly 95% load for one year.
std::pair<ArrivalTrace, CapacityTrace> year_trace() {
    std::vector<std::string> cats;
    std::vector<std::string> bors;
    for (int k = 0; k < 6; ++k) cats.push_back("k" + std::to_string(k));
    for (int b = 0; b < 5; ++b) bors.push_back("b" + std::to_string(b));
    Matrix<double> lambda(6, 5, 2.0);
    const auto inst = build_instance(cats, bors, lambda, Matrix<double>(6, 5, 1.0), 63.0, 3.0);
    return generate_synthetic_trace(inst, 365, 0.95, 1);
}

void BM_BoroughYear(benchmark::State& state) {
    const auto [arr, cap] = year_trace();
    std::vector<double> raw(borough_vector_size(6, 5), 0.9);
    const auto policy = borough_policy_from_vector(raw, 6, 5);
    SimulationConfig cfg;
    cfg.review_period = 30;
    cfg.fcfs_violation = static_cast<double>(state.range(0)) / 10.0;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_borough_policy(arr, cap, policy, cfg));
    state.SetItemsProcessed(state.iterations() * arr.total_incidents());
}
BENCHMARK(BM_BoroughYear)->Arg(0)->Arg(3)->Arg(10);

void BM_CityYear(benchmark::State& state) {
    const auto [arr, cap] = year_trace();
    const auto policy = make_city_policy(Matrix<double>(6, 5, 1.0 / 30.0), arr, cap);
    SimulationConfig cfg;
    cfg.fcfs_violation = 0.3;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_city_policy(arr, cap, policy, cfg));
    state.SetItemsProcessed(state.iterations() * arr.total_incidents());
}
BENCHMARK(BM_CityYear);

void BM_Losses(benchmark::State& state) {
    const auto [arr, cap] = year_trace();
    std::vector<double> raw(borough_vector_size(6, 5), 0.9);
    SimulationConfig cfg;
    const auto out = simulate_borough_policy(arr, cap, borough_policy_from_vector(raw, 6, 5), cfg);
    MetricsConfig m;
    m.risk = Matrix<double>(6, 5, 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(compute_losses(out, m));
}
BENCHMARK(BM_Losses);

}  // namespace

BENCHMARK_MAIN();
