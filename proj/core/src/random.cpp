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

#include "slaforge/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace slaforge {

std::uint64_t Rng::below(std::uint64_t n) {
    // Reject the tail above the largest multiple of n.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t v;
    do {
        v = engine_();
    } while (v >= limit);
    return v % n;
}

bool Rng::bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
}

std::size_t Rng::categorical(std::span<const double> weights) {
    double total = 0.0;
    std::size_t positive = 0;
    std::size_t last_positive = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            total += weights[i];
            ++positive;
            last_positive = i;
        }
    }
    if (positive <= 1) return last_positive;

    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        acc += weights[i];
        if (u < acc) return i;
    }
    return last_positive;
}

std::int64_t Rng::poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    constexpr double kPiece = 16.0;
    std::int64_t total = 0;
    double remaining = mean;
    while (remaining > 0.0) {
        const double m = std::min(remaining, kPiece);
        remaining -= m;
        // Inversion by sequential search.
        const double u = uniform();
        double p = std::exp(-m);
        double cdf = p;
        std::int64_t k = 0;
        while (u > cdf) {
            ++k;
            p *= m / static_cast<double>(k);
            cdf += p;
            if (k > 400) break;  // cdf rounding guard; P(k > 400) is ~0 for m <= 16
        }
        total += k;
    }
    return total;
}

double Rng::normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void multinomial(Rng& rng, std::int64_t n, std::span<const double> weights,
                 std::span<std::int64_t> counts_out) {
    std::fill(counts_out.begin(), counts_out.end(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const std::size_t j = rng.categorical(weights);
        if (j >= weights.size()) return;
        ++counts_out[j];
    }
}

}  // namespace slaforge
