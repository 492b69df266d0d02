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
#include <string>
#include <utility>
#include <vector>

#include "slaforge/matrix.hpp"
#include "slaforge/model.hpp"

namespace slaforge {

struct SimulationConfig {
    std::int64_t review_period = 7;  ///< D, days between drop reviews
    double fcfs_violation = 0.0;     ///< rho in [0,1]
    std::uint64_t seed = 0;
    std::size_t trace_repeats = 1;   ///< input year concatenated this many times

    /// Throws InvalidConfig on D < 1, rho outside [0,1] or zero repeats.
    void validate() const;
};

enum class Fate : std::uint8_t { Inspected, Dropped, Backlog };

struct IncidentOutcome {
    std::uint32_t category = 0;
    std::uint32_t borough = 0;
    std::int32_t region = -1;
    std::int32_t arrival_day = 0;  ///< 0-based, on the repeated timeline
    Fate fate = Fate::Backlog;
    std::int32_t fate_day = -1;    ///< inspection or drop day; -1 while in backlog

    std::int32_t delay() const { return fate_day - arrival_day; }

    friend bool operator==(const IncidentOutcome&, const IncidentOutcome&) = default;
};

/// Fate of every simulated incident, in arrival order.
struct SimulationOutcome {
    std::vector<std::string> categories;
    std::vector<std::string> boroughs;
    std::vector<std::string> regions;
    std::size_t horizon = 0;
    std::vector<IncidentOutcome> incidents;

    std::size_t n_categories() const { return categories.size(); }
    std::size_t n_boroughs() const { return boroughs.size(); }

    Matrix<std::int64_t> arrivals() const;
    Matrix<std::int64_t> count(Fate fate) const;
    /// Inspections performed on each day.
    std::vector<std::int64_t> daily_inspections() const;

    friend bool operator==(const SimulationOutcome&, const SimulationOutcome&) = default;
};

/// Decentralized simulation. Each day, in this order:
///  1. arrivals join their (category, borough) queue;
///  2. city capacity I^t is split over boroughs ~ Multinomial(I^t, C_b);
///  3. each borough splits its share over backlogged categories
///     ~ Multinomial(I_b, phi_kb / Phi_b(t)); draws beyond a queue's backlog
///     are re-drawn over the categories still backlogged, and capacity a
///     borough cannot use is pooled and re-split over boroughs that can,
///     by renormalized C_b;
///  4. each queue inspects its allocation uniformly at random among its
///     earliest ceil(rho * (B - I)) + I incidents;
///  5. on days with (t + 1) mod D == 0 every backlog incident is dropped
///     with probability 1 - p_kb.
/// Random draws are consumed in that order, boroughs before categories.
/// Throws TraceMisaligned or DimensionMismatch on inconsistent inputs.
SimulationOutcome simulate_borough_policy(const ArrivalTrace& arrivals,
                                          const CapacityTrace& capacity,
                                          const BoroughBudgetPolicy& policy,
                                          const SimulationConfig& config);

/// Centralized simulation: each arrival joins its queue with probability
/// p_kb and is dropped on arrival otherwise; daily capacity is drawn in
/// one multinomial over backlogged pairs with weights phi_kb; queue
/// selection follows the same rho rule. There is no review-period drop.
SimulationOutcome simulate_city_policy(const ArrivalTrace& arrivals,
                                       const CapacityTrace& capacity,
                                       const CityBudgetPolicy& policy,
                                       const SimulationConfig& config);

/// Target inspection fractions for a centralized policy:
/// p_kb = phi_kb * sum_t I^t / sum_t N_kb^t, clamped at 1. Weight freed by
/// clamped pairs is handed to the unclamped ones in proportion to their
/// phi, repeating until no new pair clamps. Throws ZeroArrivalPair when a
/// pair with phi > 0 has no arrivals.
Matrix<double> derive_city_inspection_fractions(const Matrix<double>& gps,
                                                const ArrivalTrace& arrivals,
                                                const CapacityTrace& capacity);

/// Builds a city policy from raw GPS weights, deriving the targets.
CityBudgetPolicy make_city_policy(const Matrix<double>& gps, const ArrivalTrace& arrivals,
                                  const CapacityTrace& capacity);

/// Poisson arrivals N^t_kb ~ Poisson(lambda_kb) and capacity
/// I^t ~ Poisson(C * utilization). Draws per day: pairs in canonical order,
/// then the capacity.
std::pair<ArrivalTrace, CapacityTrace> generate_synthetic_trace(const ProblemInstance& instance,
                                                                std::size_t days,
                                                                double utilization,
                                                                std::uint64_t seed);

}  // namespace slaforge
