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

#include "slaforge/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <tuple>
#include <utility>

#include "slaforge/error.hpp"

namespace slaforge {

void MetricsConfig::validate(std::size_t n_categories, std::size_t n_boroughs) const {
    if (!(sla_percentile > 0.0 && sla_percentile < 100.0)) {
        throw Error(ErrorKind::InvalidConfig, "SLA percentile must lie in (0,100)");
    }
    if (!(drop_cost > 0.0)) throw Error(ErrorKind::InvalidConfig, "drop cost must be positive");
    if (!risk.same_shape(n_categories, n_boroughs)) {
        throw Error(ErrorKind::DimensionMismatch, "risk matrix does not match the outcome");
    }
    for (double r : risk.flat()) {
        if (!(r > 0.0)) throw Error(ErrorKind::NonPositiveRisk, "risk level must be positive");
    }
}

std::optional<double> default_risk_level(const std::string& category) {
    static const std::array<std::pair<const char*, double>, 6> kLevels{{
        {"Hazard", 10.0},
        {"Illegal Tree Damage", 8.0},
        {"Other", 6.0},
        {"Prune", 4.0},
        {"Remove Tree", 8.0},
        {"Root/Sewer/Sidewalk", 4.0},
    }};
    for (const auto& [name, level] : kLevels) {
        if (category == name) return level;
    }
    return std::nullopt;
}

namespace {

// Delays and arrival count of one (category, borough) cell.
struct Cell {
    std::int64_t arrivals = 0;
    std::vector<std::int32_t> delays;
};

std::optional<double> nearest_rank(std::vector<std::int32_t>& delays, double percentile) {
    if (delays.empty()) return std::nullopt;
    const auto n = static_cast<double>(delays.size());
    auto rank = static_cast<std::size_t>(std::ceil(percentile * n / 100.0 - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, delays.size());
    std::nth_element(delays.begin(), delays.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     delays.end());
    return static_cast<double>(delays[rank - 1]);
}

std::optional<double> fraction(const Cell& c) {
    if (c.arrivals == 0) return std::nullopt;
    return static_cast<double>(c.delays.size()) / static_cast<double>(c.arrivals);
}

// N [p r z + drop r (1 - p)]; an absent z means nothing was inspected.
double cell_cost(const Cell& c, std::optional<double> z, double risk, double drop_cost) {
    if (c.arrivals == 0) return 0.0;
    const double p = *fraction(c);
    const double n = static_cast<double>(c.arrivals);
    const double served = z ? p * risk * *z : 0.0;
    return n * (served + drop_cost * risk * (1.0 - p));
}

Matrix<Cell> collect(const SimulationOutcome& outcome) {
    Matrix<Cell> cells(outcome.n_categories(), outcome.n_boroughs());
    for (const auto& inc : outcome.incidents) {
        Cell& c = cells(inc.category, inc.borough);
        ++c.arrivals;
        if (inc.fate == Fate::Inspected) c.delays.push_back(inc.delay());
    }
    return cells;
}

}  // namespace

Matrix<std::optional<double>> empirical_sla(const SimulationOutcome& outcome, double percentile) {
    if (!(percentile > 0.0 && percentile < 100.0)) {
        throw Error(ErrorKind::InvalidConfig, "percentile must lie in (0,100)");
    }
    Matrix<Cell> cells = collect(outcome);
    Matrix<std::optional<double>> z(cells.rows(), cells.cols());
    for (std::size_t i = 0; i < cells.size(); ++i)
        z.flat()[i] = nearest_rank(cells.flat()[i].delays, percentile);
    return z;
}

Matrix<std::optional<double>> inspection_fractions(const SimulationOutcome& outcome) {
    const Matrix<Cell> cells = collect(outcome);
    Matrix<std::optional<double>> p(cells.rows(), cells.cols());
    for (std::size_t i = 0; i < cells.size(); ++i) p.flat()[i] = fraction(cells.flat()[i]);
    return p;
}

PolicyMetrics compute_losses(const SimulationOutcome& outcome, const MetricsConfig& config) {
    const std::size_t K = outcome.n_categories();
    const std::size_t B = outcome.n_boroughs();
    config.validate(K, B);
    Matrix<Cell> cells = collect(outcome);

    PolicyMetrics m;
    m.z_hat = Matrix<std::optional<double>>(K, B);
    m.p_hat = Matrix<std::optional<double>>(K, B);
    m.borough_cost.assign(B, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < B; ++b) {
            Cell& c = cells(k, b);
            m.z_hat(k, b) = nearest_rank(c.delays, config.sla_percentile);
            m.p_hat(k, b) = fraction(c);
            m.borough_cost[b] += cell_cost(c, m.z_hat(k, b), config.risk(k, b), config.drop_cost);
        }
    }
    for (double c : m.borough_cost) m.g += c;

    if (config.equity == EquityKind::MaxCost) {
        m.f = B == 0 ? 0.0 : *std::max_element(m.borough_cost.begin(), m.borough_cost.end());
    } else {
        for (std::size_t k = 0; k < K; ++k) {
            double hi = -std::numeric_limits<double>::infinity();
            double lo = std::numeric_limits<double>::infinity();
            for (std::size_t b = 0; b < B; ++b) {
                if (!m.z_hat(k, b)) continue;
                const double rz = config.risk(k, b) * *m.z_hat(k, b);
                hi = std::max(hi, rz);
                lo = std::min(lo, rz);
            }
            if (hi >= lo) m.f += hi - lo;
        }
    }
    return m;
}

std::map<std::string, double> group_costs(const SimulationOutcome& outcome, GroupKey key,
                                          const MetricsConfig& config) {
    const std::size_t K = outcome.n_categories();
    const std::size_t B = outcome.n_boroughs();
    config.validate(K, B);

    auto group_of = [&](const IncidentOutcome& inc) -> const std::string& {
        if (key == GroupKey::Region && inc.region >= 0) {
            return outcome.regions[static_cast<std::size_t>(inc.region)];
        }
        return outcome.boroughs[inc.borough];
    };

    std::map<std::tuple<std::string, std::uint32_t, std::uint32_t>, Cell> cells;
    for (const auto& inc : outcome.incidents) {
        Cell& c = cells[{group_of(inc), inc.category, inc.borough}];
        ++c.arrivals;
        if (inc.fate == Fate::Inspected) c.delays.push_back(inc.delay());
    }

    std::map<std::string, double> cost;
    for (auto& [cell_key, c] : cells) {
        const auto& [group, k, b] = cell_key;
        const auto z = nearest_rank(c.delays, config.sla_percentile);
        cost[group] += cell_cost(c, z, config.risk(k, b), config.drop_cost);
    }
    return cost;
}

}  // namespace slaforge
