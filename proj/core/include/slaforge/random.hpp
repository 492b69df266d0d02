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

#include <cstdint>
#include <random>
#include <span>

namespace slaforge {

/// Seeded random source used by every stochastic component.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. All variates are derived from raw engine output with the
/// methods below (std:: distributions are implementation-defined), so a
/// given seed reproduces the same stream on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n) by rejection (unbiased). n > 0.
    std::uint64_t below(std::uint64_t n);

    /// True with probability p. Consumes no randomness when p <= 0 or p >= 1.
    bool bernoulli(double p);

    /// Index drawn with probability weights[i] / sum(weights). Consumes no
    /// randomness when exactly one weight is positive. Returns
    /// weights.size() if no weight is positive.
    std::size_t categorical(std::span<const double> weights);

    /// Poisson variate, exact: sums Poisson(<= 16) pieces drawn by
    /// inversion.
    std::int64_t poisson(double mean);

    /// Standard normal by Box-Muller (one variate per call, no caching).
    double normal();

private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to derive independent child seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Multinomial(n, weights) by n sequential categorical draws. Counts for
/// zero-weight entries are always zero.
void multinomial(Rng& rng, std::int64_t n, std::span<const double> weights,
                 std::span<std::int64_t> counts_out);

}  // namespace slaforge
