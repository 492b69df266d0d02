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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slaforge/matrix.hpp"
#include "slaforge/simulator.hpp"

namespace slaforge {

enum class EquityKind { Range, MaxCost };

struct MetricsConfig {
    double sla_percentile = 50.0;  ///< percentile of inspection delays used as the SLA
    double drop_cost = 100.0;      ///< an uninspected incident costs this many days of delay
    EquityKind equity = EquityKind::Range;
    Matrix<double> risk;           ///< r_kb, categories x boroughs

    void validate(std::size_t n_categories, std::size_t n_boroughs) const;
};

/// Assigned risk levels for the six forestry request categories, used when
/// ingesting data with those category names.
std::optional<double> default_risk_level(const std::string& category);

struct PolicyMetrics {
    Matrix<std::optional<double>> z_hat;
    Matrix<std::optional<double>> p_hat;
    std::vector<double> borough_cost;
    double g = 0.0;
    double f = 0.0;
};

/// Nearest-rank percentile (the ceil(q n / 100)-th smallest) of the
/// inspection delays of each pair; absent for pairs without inspections.
Matrix<std::optional<double>> empirical_sla(const SimulationOutcome& outcome, double percentile);

/// Inspected / arrived per pair; incidents still in the backlog at the end
/// count as uninspected. Absent for pairs without arrivals.
Matrix<std::optional<double>> inspection_fractions(const SimulationOutcome& outcome);

/// Cost_b = sum_k N_kb [p_kb r_kb z_kb + drop_cost r_kb (1 - p_kb)],
/// g = sum_b Cost_b, and f either the per-category spread of r z across
/// boroughs (Range) or max_b Cost_b (MaxCost).
PolicyMetrics compute_losses(const SimulationOutcome& outcome, const MetricsConfig& config);

enum class GroupKey { Region, Borough };

/// The Cost_b formula evaluated per group instead of per borough: each
/// (category, borough) cell inside a group gets its own z and p. Incidents
/// without a region id are grouped under their borough name. Groups without
/// arrivals are absent.
std::map<std::string, double> group_costs(const SimulationOutcome& outcome, GroupKey key,
                                          const MetricsConfig& config);

}  // namespace slaforge
