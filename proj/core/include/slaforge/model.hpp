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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slaforge/matrix.hpp"

namespace slaforge {

/// Stylized queuing instance: Poisson arrivals per (category, borough),
/// risk ratings, a city-wide inspection budget and the SLA tail parameter
/// alpha = -log(tail probability).
class ProblemInstance {
public:
    const std::vector<std::string>& categories() const noexcept { return categories_; }
    const std::vector<std::string>& boroughs() const noexcept { return boroughs_; }
    std::size_t n_categories() const noexcept { return categories_.size(); }
    std::size_t n_boroughs() const noexcept { return boroughs_.size(); }

    const Matrix<double>& lambda() const noexcept { return lambda_; }
    const Matrix<double>& risk() const noexcept { return risk_; }
    double lambda(std::size_t k, std::size_t b) const { return lambda_(k, b); }
    double risk(std::size_t k, std::size_t b) const { return risk_(k, b); }
    double total_budget() const noexcept { return total_budget_; }
    double tail_param() const noexcept { return tail_param_; }

    double total_arrival_rate() const noexcept { return total_rate_; }
    /// C - sum(lambda), strictly positive.
    double slack() const noexcept { return total_budget_ - total_rate_; }

    friend ProblemInstance build_instance(std::vector<std::string> categories,
                                          std::vector<std::string> boroughs,
                                          Matrix<double> lambda, Matrix<double> risk,
                                          double total_budget, double tail_param);

private:
    ProblemInstance() = default;

    std::vector<std::string> categories_;
    std::vector<std::string> boroughs_;
    Matrix<double> lambda_;
    Matrix<double> risk_;
    double total_budget_ = 0.0;
    double tail_param_ = 0.0;
    double total_rate_ = 0.0;
};

/// Validates and builds an instance. Throws Error with DimensionMismatch,
/// NonPositiveSlack, NonPositiveRisk, NonPositiveTail or NegativeEntry.
ProblemInstance build_instance(std::vector<std::string> categories,
                               std::vector<std::string> boroughs, Matrix<double> lambda,
                               Matrix<double> risk, double total_budget, double tail_param);

/// Tail parameter for a target tail probability q in (0,1): -log(q).
double tail_param_from_probability(double tail_probability);

/// Design produced by the stylized optimizer. Entries with lambda*r = 0 are
/// inactive: they get no slack (x = 0, phi from lambda only) and z = +inf.
struct StylizedSolution {
    Matrix<double> z;
    Matrix<double> phi;
    std::vector<double> budgets;
    Matrix<double> x;
    Matrix<std::uint8_t> active;
    std::vector<double> borough_cost;
    double g = 0.0;
    double f = 0.0;
};

/// Decentralized policy: budget fractions per borough, per-borough GPS
/// weights and target inspection fractions.
class BoroughBudgetPolicy {
public:
    /// Validates shapes and ranges, then normalizes the budget vector and
    /// each borough's GPS column (all-zero groups become uniform).
    static BoroughBudgetPolicy from_parts(std::vector<double> budget_frac, Matrix<double> gps,
                                          Matrix<double> target_frac);

    std::size_t n_categories() const noexcept { return gps_.rows(); }
    std::size_t n_boroughs() const noexcept { return gps_.cols(); }
    const std::vector<double>& budget_frac() const noexcept { return budget_frac_; }
    const Matrix<double>& gps() const noexcept { return gps_; }
    const Matrix<double>& target_frac() const noexcept { return target_frac_; }

    /// Flattened parameters in the raw-vector layout of
    /// borough_policy_from_vector: budgets, GPS (borough-major), targets.
    std::vector<double> to_vector() const;

    friend bool operator==(const BoroughBudgetPolicy&, const BoroughBudgetPolicy&) = default;

private:
    BoroughBudgetPolicy() = default;
    std::vector<double> budget_frac_;
    Matrix<double> gps_;
    Matrix<double> target_frac_;
};

/// Centralized policy: one GPS weight per (category, borough) pair summing
/// to one over all pairs, plus target inspection fractions.
class CityBudgetPolicy {
public:
    static CityBudgetPolicy from_parts(Matrix<double> gps, Matrix<double> target_frac);

    std::size_t n_categories() const noexcept { return gps_.rows(); }
    std::size_t n_boroughs() const noexcept { return gps_.cols(); }
    const Matrix<double>& gps() const noexcept { return gps_; }
    const Matrix<double>& target_frac() const noexcept { return target_frac_; }

    /// GPS weights (borough-major) followed by targets.
    std::vector<double> to_vector() const;

    friend bool operator==(const CityBudgetPolicy&, const CityBudgetPolicy&) = default;

private:
    CityBudgetPolicy() = default;
    Matrix<double> gps_;
    Matrix<double> target_frac_;
};

/// Raw length for borough_policy_from_vector: B + K*B + K*B.
std::size_t borough_vector_size(std::size_t n_categories, std::size_t n_boroughs);

/// Maps a non-negative search vector onto a feasible Borough-budget policy.
/// Layout: B budget weights; K*B GPS weights grouped by borough (category
/// fastest); K*B inspection fractions in the same order.
BoroughBudgetPolicy borough_policy_from_vector(std::span<const double> raw,
                                               std::size_t n_categories,
                                               std::size_t n_boroughs);

/// Normalizes K*B raw GPS weights (borough-major) over all pairs.
Matrix<double> city_gps_from_vector(std::span<const double> raw, std::size_t n_categories,
                                    std::size_t n_boroughs);

/// One incident in an arrival trace. Days are 0-based.
struct IncidentRecord {
    std::int32_t day = 0;
    std::uint32_t category = 0;
    std::uint32_t borough = 0;
    std::int32_t region = -1;  ///< index into ArrivalTrace::regions(), -1 when unknown

    friend bool operator==(const IncidentRecord&, const IncidentRecord&) = default;
};

/// Daily incident counts by (category, borough), optionally backed by
/// incident-level records carrying a region id.
class ArrivalTrace {
public:
    /// counts is indexed [day][category][borough], flattened.
    static ArrivalTrace from_counts(std::vector<std::string> categories,
                                    std::vector<std::string> boroughs, std::size_t horizon,
                                    std::vector<std::int64_t> counts);
    /// Records must have day < horizon; they are stably sorted by day.
    static ArrivalTrace from_records(std::vector<std::string> categories,
                                     std::vector<std::string> boroughs, std::size_t horizon,
                                     std::vector<IncidentRecord> records,
                                     std::vector<std::string> regions = {});

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t n_categories() const noexcept { return categories_.size(); }
    std::size_t n_boroughs() const noexcept { return boroughs_.size(); }
    const std::vector<std::string>& categories() const noexcept { return categories_; }
    const std::vector<std::string>& boroughs() const noexcept { return boroughs_; }

    std::int64_t count(std::size_t day, std::size_t k, std::size_t b) const {
        return counts_[(day * n_categories() + k) * n_boroughs() + b];
    }
    /// Sum over all days for one pair.
    std::int64_t total(std::size_t k, std::size_t b) const { return totals_(k, b); }
    const Matrix<std::int64_t>& totals() const noexcept { return totals_; }
    std::int64_t total_incidents() const noexcept;

    bool has_records() const noexcept { return has_records_; }
    const std::vector<IncidentRecord>& records() const noexcept { return records_; }
    const std::vector<std::string>& regions() const noexcept { return regions_; }

    /// Concatenates the trace with itself `times` times.
    ArrivalTrace repeated(std::size_t times) const;

    friend bool operator==(const ArrivalTrace&, const ArrivalTrace&) = default;

private:
    ArrivalTrace() = default;
    void compute_totals();

    std::vector<std::string> categories_;
    std::vector<std::string> boroughs_;
    std::size_t horizon_ = 0;
    std::vector<std::int64_t> counts_;
    Matrix<std::int64_t> totals_;
    std::vector<IncidentRecord> records_;
    std::vector<std::string> regions_;
    bool has_records_ = false;
};

/// City-wide inspections performed per day.
class CapacityTrace {
public:
    explicit CapacityTrace(std::vector<std::int64_t> capacity);

    std::size_t horizon() const noexcept { return capacity_.size(); }
    std::int64_t at(std::size_t day) const { return capacity_[day]; }
    const std::vector<std::int64_t>& values() const noexcept { return capacity_; }
    std::int64_t total() const noexcept;

    CapacityTrace repeated(std::size_t times) const;

    friend bool operator==(const CapacityTrace&, const CapacityTrace&) = default;

private:
    std::vector<std::int64_t> capacity_;
};

}  // namespace slaforge
