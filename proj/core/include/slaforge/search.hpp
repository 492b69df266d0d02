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
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "slaforge/metrics.hpp"
#include "slaforge/model.hpp"
#include "slaforge/simulator.hpp"

namespace slaforge {

enum class PolicyClass { BoroughBudget, CityBudget };
enum class Sampler { SobolRandom, Evolutionary };

using Policy = std::variant<BoroughBudgetPolicy, CityBudgetPolicy>;

PolicyClass policy_class_of(const Policy& policy);

/// Runs the matching simulator for either policy class.
SimulationOutcome simulate_policy(const Policy& policy, const ArrivalTrace& arrivals,
                                  const CapacityTrace& capacity, const SimulationConfig& config);

/// Uniform budgets and GPS weights with every target fraction set to
/// `target` (borough class), or uniform global weights with derived
/// targets (city class).
Policy uniform_policy(PolicyClass cls, const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                      double target = 1.0);

/// Length of the raw search vector of a policy class.
std::size_t search_dimension(PolicyClass cls, std::size_t n_categories, std::size_t n_boroughs);

/// Maps a raw vector in [0,1]^d onto a policy. City GPS weights of pairs
/// that never see an arrival are zeroed before normalization.
Policy policy_from_vector(PolicyClass cls, std::span<const double> raw,
                          const ArrivalTrace& arrivals, const CapacityTrace& capacity);

struct Objectives {
    double g = 0.0;
    double f = 0.0;

    friend bool operator==(const Objectives&, const Objectives&) = default;
};

/// a dominates b: no worse in both objectives and strictly better in one.
bool dominates(const Objectives& a, const Objectives& b);

struct EvaluationResult {
    std::optional<Objectives> value;
    std::string error;  ///< set when the simulation of this policy failed
};

/// Seed of replicate r. Every policy in a batch sees the same replicate
/// seeds (common random numbers), so results depend only on the policy.
std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t replicate);

/// Simulates every policy `seeds_per_policy` times and averages (g, f).
/// Evaluations run concurrently on up to `threads` workers (0 = hardware
/// concurrency); results follow input order. A failing policy yields an
/// error entry without aborting the batch.
std::vector<EvaluationResult> evaluate_policy_batch(std::span<const Policy> policies,
                                                    const ArrivalTrace& arrivals,
                                                    const CapacityTrace& capacity,
                                                    const SimulationConfig& sim_config,
                                                    const MetricsConfig& metrics_config,
                                                    std::size_t seeds_per_policy = 1,
                                                    std::size_t threads = 0);

/// Indices (ascending) of the nondominated points; duplicates of a
/// nondominated point are all kept.
std::vector<std::size_t> pareto_filter(std::span<const Objectives> points);

/// Area dominated by the points inside the box bounded by `reference`
/// (2-D minimization), by a sorted sweep. Throws PointOutsideReference if a
/// point exceeds the reference in either coordinate.
double hypervolume(std::span<const Objectives> points, const Objectives& reference);

struct ParetoEntry {
    Policy policy;
    std::vector<double> raw;  ///< search vector the policy came from
    Objectives objectives;
    bool seed_averaged = false;
    std::size_t iteration = 0;
};

struct ParetoFront {
    std::vector<ParetoEntry> entries;  ///< sorted by g, then f
    Objectives reference;

    std::vector<Objectives> objectives() const;
    /// Indices of the entries with the smallest g and the smallest f.
    std::size_t most_efficient() const;
    std::size_t most_equitable() const;
};

struct SearchConfig {
    PolicyClass policy_class = PolicyClass::BoroughBudget;
    std::size_t batch_size = 64;
    std::size_t iterations = 50;
    std::size_t seeds_per_policy = 1;
    Sampler sampler = Sampler::Evolutionary;
    std::uint64_t seed = 0;
    double mutation_sigma = 0.1;
    std::size_t threads = 0;

    void validate() const;
};

struct SearchResult {
    ParetoFront front;
    std::vector<double> hypervolume_history;  ///< one value per iteration
    std::size_t evaluated = 0;
    std::size_t failed = 0;
};

/// Propose -> evaluate -> merge -> filter, `iterations` times. The first
/// batch is always quasi-random (scrambled Sobol); later batches come from
/// the configured sampler. The hypervolume reference is 1.1x the
/// componentwise max of the first batch. Throws NoFeasiblePolicy if no
/// proposal could be evaluated.
SearchResult run_search(const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                        const SimulationConfig& sim_config, const MetricsConfig& metrics_config,
                        const SearchConfig& search_config);

struct OutOfSampleReport {
    std::vector<EvaluationResult> policies;  ///< one per front entry, front order
    EvaluationResult baseline;
    /// policy / baseline per objective; absent when either side is missing
    /// or the baseline value is zero.
    std::vector<std::optional<Objectives>> relative;
    /// Recomputed on the new trace (not carried over from training).
    std::optional<std::size_t> most_efficient;
    std::optional<std::size_t> most_equitable;
};

OutOfSampleReport out_of_sample(const ParetoFront& front, const Policy& baseline,
                                const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                                const SimulationConfig& sim_config,
                                const MetricsConfig& metrics_config,
                                std::size_t seeds_per_policy = 1, std::size_t threads = 0);

}  // namespace slaforge
