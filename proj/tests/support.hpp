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

#pragma once

// Test-only helpers and oracles. Nothing here calls the production solvers,
// simulators or loss functions; the oracles are deliberately naive.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "slaforge/matrix.hpp"
#include "slaforge/model.hpp"

namespace slaforge::testing {

inline std::vector<std::string> names(const char* prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

/// Row-major (category-major) values into a K x B matrix.
template <typename T>
Matrix<T> matrix(std::size_t rows, std::size_t cols, std::vector<T> values) {
    Matrix<T> m(rows, cols);
    for (std::size_t i = 0; i < values.size(); ++i) m.flat()[i] = values[i];
    return m;
}

inline ProblemInstance instance(std::size_t K, std::size_t B, std::vector<double> lambda,
                                std::vector<double> risk, double budget, double alpha) {
    return build_instance(names("k", K), names("b", B), matrix(K, B, std::move(lambda)),
                          matrix(K, B, std::move(risk)), budget, alpha);
}

/// Random instance in the acceptance ranges: lambda in [0.1,5],
/// r in [0.5,12], slack in [0.5,10], alpha in {1, -log 0.05}.
inline ProblemInstance random_instance(std::mt19937_64& gen, std::size_t K, std::size_t B) {
    std::uniform_real_distribution<double> lam(0.1, 5.0);
    std::uniform_real_distribution<double> risk(0.5, 12.0);
    std::uniform_real_distribution<double> slack(0.5, 10.0);
    std::vector<double> l(K * B);
    std::vector<double> r(K * B);
    double total = 0.0;
    for (auto& v : l) total += (v = lam(gen));
    for (auto& v : r) v = risk(gen);
    const double alpha = (gen() & 1) ? 1.0 : -std::log(0.05);
    return instance(K, B, std::move(l), std::move(r), total + slack(gen), alpha);
}

struct GridOptimum {
    double efficiency = std::numeric_limits<double>::infinity();  // min g
    double equity = std::numeric_limits<double>::infinity();      // min f (max cost)
    double balanced = std::numeric_limits<double>::infinity();    // min 0.5 g + 0.5 f
};

/// Exhaustive search over the slack simplex: every split of the slack into
/// K*B positive multiples of slack/steps, with z = alpha / x. Costs are
/// evaluated directly from lambda * r * z per pair.
inline GridOptimum grid_search(const ProblemInstance& inst, int steps) {
    const std::size_t K = inst.n_categories();
    const std::size_t B = inst.n_boroughs();
    const std::size_t n = K * B;
    const double delta = inst.slack() / steps;
    std::vector<double> weight(n);
    std::vector<std::size_t> borough(n);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < B; ++b) {
            weight[k * B + b] = inst.lambda(k, b) * inst.risk(k, b) * inst.tail_param();
            borough[k * B + b] = b;
        }
    }
    // cost of a pair holding i grid units of slack
    std::vector<double> inv(static_cast<std::size_t>(steps) + 1, 0.0);
    for (int i = 1; i <= steps; ++i) inv[static_cast<std::size_t>(i)] = 1.0 / (i * delta);

    GridOptimum best;
    std::vector<int> units(n, 1);
    std::vector<double> cost(B);
    auto evaluate = [&] {
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            cost[borough[i]] += weight[i] * inv[static_cast<std::size_t>(units[i])];
        double g = 0.0;
        double f = 0.0;
        for (double c : cost) {
            g += c;
            f = std::max(f, c);
        }
        best.efficiency = std::min(best.efficiency, g);
        best.equity = std::min(best.equity, f);
        best.balanced = std::min(best.balanced, 0.5 * g + 0.5 * f);
    };
    // Enumerate compositions of `steps` into n positive parts.
    auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == n) {
            units[pos] = remaining;
            evaluate();
            return;
        }
        const int max_here = remaining - static_cast<int>(n - pos - 1);
        for (int u = 1; u <= max_here; ++u) {
            units[pos] = u;
            self(self, pos + 1, remaining - u);
        }
    };
    if (steps >= static_cast<int>(n)) recurse(recurse, 0, steps);
    return best;
}

inline double relative_error(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

}  // namespace slaforge::testing
