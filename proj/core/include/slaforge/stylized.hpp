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

#include <vector>

#include "slaforge/model.hpp"

namespace slaforge {

/// Weight of the efficiency loss in L = gamma * g + (1 - gamma) * f.
struct WeightedObjectiveConfig {
    double gamma = 0.5;
};

/// Cost_b(z) = sum_k lambda_kb * r_kb * z_kb. Pairs with lambda*r = 0
/// contribute nothing (their z may be infinite).
std::vector<double> borough_cost_stylized(const ProblemInstance& instance, const Matrix<double>& z);

double efficiency_loss(const std::vector<double>& borough_cost);
double equity_loss(const std::vector<double>& borough_cost);

/// gamma = 1 closed form: slack split in proportion to sqrt(lambda * r)
/// across all pairs.
StylizedSolution solve_extreme_efficiency(const ProblemInstance& instance);

/// gamma = 0 closed form: borough slack proportional to
/// (sum_k sqrt(lambda * r))^2, which equalizes borough costs.
StylizedSolution solve_extreme_equity(const ProblemInstance& instance);

/// General gamma. Within a borough the slack is always split in proportion
/// to sqrt(lambda * r); across boroughs the remaining B-dimensional convex
/// problem is solved in epigraph form. For a fixed max level t the
/// efficiency part is an exact water-filling with floors A_b / t, and t is
/// located by bisection on the KKT condition that the multipliers of the
/// max constraints sum to 1 - gamma.
///
/// Throws DidNotConverge if the bracket cannot be closed within the
/// iteration cap or the KKT residual stays above 1e-6.
StylizedSolution solve_weighted(const ProblemInstance& instance,
                                const WeightedObjectiveConfig& config);

/// Weighted objective gamma * g + (1 - gamma) * f of a solution.
double weighted_objective(const StylizedSolution& solution, double gamma);

/// Two boroughs, one category only (WrongDimensions otherwise).
double price_of_equity(const ProblemInstance& instance);
double price_of_efficiency(const ProblemInstance& instance);

struct ResidualReport {
    double sla_tightness = 0.0;   ///< max |x z - alpha| over active pairs
    double gps_sum = 0.0;         ///< max(0, sum_k phi_kb - 1) over boroughs
    double budget_sum = 0.0;      ///< |sum_b C_b - C|
    double capacity_split = 0.0;  ///< max |C_b phi_kb - lambda_kb - x_kb|
    double positivity = 0.0;      ///< worst negative part of x, z, phi, C_b (x, z active only)
    double g = 0.0;               ///< recomputed efficiency loss
    double f = 0.0;               ///< recomputed equity loss

    double max_violation() const;
};

/// Checks a solution against the constraints of the original problem and
/// recomputes its losses. Never throws on infeasible input; shapes must
/// match (DimensionMismatch otherwise).
ResidualReport verify_solution(const ProblemInstance& instance, const StylizedSolution& solution);

}  // namespace slaforge
