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

#include "slaforge/stylized.hpp"

namespace {

using namespace slaforge;

ProblemInstance make_instance(std::size_t K, std::size_t B) {
    std::vector<std::string> cats;
    std::vector<std::string> bors;
    for (std::size_t k = 0; k < K; ++k) cats.push_back("k" + std::to_string(k));
    for (std::size_t b = 0; b < B; ++b) bors.push_back("b" + std::to_string(b));
    Matrix<double> lambda(K, B);
    Matrix<double> risk(K, B);
    double total = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < B; ++b) {
            lambda(k, b) = 0.5 + static_cast<double>((3 * k + 5 * b) % 7);
            risk(k, b) = 1.0 + static_cast<double>((2 * k + b) % 5);
            total += lambda(k, b);
        }
    }
    return build_instance(cats, bors, lambda, risk, 1.2 * total, 3.0);
}

void BM_ExtremeEfficiency(benchmark::State& state) {
    const auto inst = make_instance(6, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_extreme_efficiency(inst));
}
BENCHMARK(BM_ExtremeEfficiency)->Arg(5)->Arg(50);

void BM_Weighted(benchmark::State& state) {
    const auto inst = make_instance(6, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(solve_weighted(inst, {0.5}));
}
BENCHMARK(BM_Weighted)->Arg(5)->Arg(50)->Arg(500);

void BM_GammaSweep(benchmark::State& state) {
    const auto inst = make_instance(6, 5);
    for (auto _ : state) {
        for (int s = 0; s <= 100; ++s) benchmark::DoNotOptimize(solve_weighted(inst, {s / 100.0}));
    }
}
BENCHMARK(BM_GammaSweep);

}  // namespace

BENCHMARK_MAIN();
