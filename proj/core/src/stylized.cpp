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

#include "slaforge/stylized.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "slaforge/error.hpp"

namespace slaforge {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kKktTolerance = 1e-6;
constexpr int kMaxIterations = 100000;

// sqrt(lambda * r) per pair.
Matrix<double> root_weights(const ProblemInstance& inst) {
    Matrix<double> w(inst.n_categories(), inst.n_boroughs());
    for (std::size_t k = 0; k < inst.n_categories(); ++k)
        for (std::size_t b = 0; b < inst.n_boroughs(); ++b)
            w(k, b) = std::sqrt(inst.lambda(k, b) * inst.risk(k, b));
    return w;
}

std::vector<double> column_sums(const Matrix<double>& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t k = 0; k < m.rows(); ++k)
        for (std::size_t b = 0; b < m.cols(); ++b) s[b] += m(k, b);
    return s;
}

// Builds the full design from per-borough slack, splitting each borough's
// slack across its categories in proportion to sqrt(lambda * r).
StylizedSolution assemble(const ProblemInstance& inst, const std::vector<double>& borough_slack) {
    const std::size_t K = inst.n_categories();
    const std::size_t B = inst.n_boroughs();
    const double alpha = inst.tail_param();
    const Matrix<double> w = root_weights(inst);
    const std::vector<double> wsum = column_sums(w);

    StylizedSolution sol;
    sol.z = Matrix<double>(K, B, kInf);
    sol.phi = Matrix<double>(K, B, 0.0);
    sol.x = Matrix<double>(K, B, 0.0);
    sol.active = Matrix<std::uint8_t>(K, B, 0);
    sol.budgets.assign(B, 0.0);

    for (std::size_t b = 0; b < B; ++b) {
        double budget = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            if (w(k, b) > 0.0 && wsum[b] > 0.0) {
                sol.x(k, b) = borough_slack[b] * (w(k, b) / wsum[b]);
                sol.z(k, b) = alpha / sol.x(k, b);
                sol.active(k, b) = 1;
            }
            budget += sol.x(k, b) + inst.lambda(k, b);
        }
        sol.budgets[b] = budget;
        if (budget > 0.0) {
            for (std::size_t k = 0; k < K; ++k)
                sol.phi(k, b) = (sol.x(k, b) + inst.lambda(k, b)) / budget;
        }
    }
    sol.borough_cost = borough_cost_stylized(inst, sol.z);
    sol.g = efficiency_loss(sol.borough_cost);
    sol.f = equity_loss(sol.borough_cost);
    return sol;
}

// A_b = (sum_k sqrt(lambda r))^2; the borough cost at slack X_b is alpha * A_b / X_b.
std::vector<double> borough_weights(const ProblemInstance& inst) {
    std::vector<double> a = column_sums(root_weights(inst));
    for (double& v : a) v *= v;
    return a;
}

// Solves sum_b max(A_b / t, s * sqrt(A_b)) = S for s >= 0 exactly and
// returns s. Requires sum_b A_b / t <= S.
double waterfill_level(const std::vector<double>& A, double t, double S) {
    std::vector<std::size_t> order(A.size());
    std::iota(order.begin(), order.end(), 0);
    // breakpoint where borough b switches from its floor to the free branch
    auto breakpoint = [&](std::size_t b) { return std::sqrt(A[b]) / t; };
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return breakpoint(i) < breakpoint(j); });

    double floor_sum = 0.0;
    for (double a : A) floor_sum += a / t;
    double free_sum = 0.0;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const std::size_t b = order[j];
        floor_sum -= A[b] / t;
        free_sum += std::sqrt(A[b]);
        const double s = std::max(0.0, (S - floor_sum) / free_sum);
        if (j + 1 == order.size() || s <= breakpoint(order[j + 1])) return s;
    }
    return 0.0;
}

}  // namespace

std::vector<double> borough_cost_stylized(const ProblemInstance& inst, const Matrix<double>& z) {
    if (!z.same_shape(inst.n_categories(), inst.n_boroughs())) {
        throw Error(ErrorKind::DimensionMismatch, "SLA matrix shape does not match instance");
    }
    std::vector<double> cost(inst.n_boroughs(), 0.0);
    for (std::size_t k = 0; k < inst.n_categories(); ++k) {
        for (std::size_t b = 0; b < inst.n_boroughs(); ++b) {
            const double lr = inst.lambda(k, b) * inst.risk(k, b);
            if (lr == 0.0) continue;
            if (!(z(k, b) > 0.0)) {
                throw Error(ErrorKind::NonPositiveSLA, "z(" + std::to_string(k) + "," +
                                                           std::to_string(b) +
                                                           ") = " + std::to_string(z(k, b)));
            }
            cost[b] += lr * z(k, b);
        }
    }
    return cost;
}

double efficiency_loss(const std::vector<double>& borough_cost) {
    return std::accumulate(borough_cost.begin(), borough_cost.end(), 0.0);
}

double equity_loss(const std::vector<double>& borough_cost) {
    if (borough_cost.empty()) return 0.0;
    return *std::max_element(borough_cost.begin(), borough_cost.end());
}

StylizedSolution solve_extreme_efficiency(const ProblemInstance& inst) {
    const std::vector<double> wsum = column_sums(root_weights(inst));
    const double total = std::accumulate(wsum.begin(), wsum.end(), 0.0);
    if (!(total > 0.0)) {
        throw Error(ErrorKind::AllRatesZero, "every lambda * r product is zero");
    }
    std::vector<double> slack(inst.n_boroughs());
    for (std::size_t b = 0; b < slack.size(); ++b) slack[b] = inst.slack() * (wsum[b] / total);
    return assemble(inst, slack);
}

StylizedSolution solve_extreme_equity(const ProblemInstance& inst) {
    const std::vector<double> A = borough_weights(inst);
    for (std::size_t b = 0; b < A.size(); ++b) {
        if (!(A[b] > 0.0)) {
            throw Error(ErrorKind::BoroughWithNoRisk,
                        "borough '" + inst.boroughs()[b] + "' has no incidents with positive risk");
        }
    }
    const double total = std::accumulate(A.begin(), A.end(), 0.0);
    std::vector<double> slack(A.size());
    for (std::size_t b = 0; b < A.size(); ++b) slack[b] = inst.slack() * (A[b] / total);
    return assemble(inst, slack);
}

StylizedSolution solve_weighted(const ProblemInstance& inst, const WeightedObjectiveConfig& config) {
    const double gamma = config.gamma;
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "gamma must lie in [0,1], got " + std::to_string(gamma));
    }
    const double S = inst.slack();
    const std::vector<double> A_all = borough_weights(inst);

    // Boroughs without risk take no slack and cost nothing.
    std::vector<std::size_t> idx;
    std::vector<double> A;
    for (std::size_t b = 0; b < A_all.size(); ++b) {
        if (A_all[b] > 0.0) {
            idx.push_back(b);
            A.push_back(A_all[b]);
        }
    }
    if (A.empty()) throw Error(ErrorKind::AllRatesZero, "every lambda * r product is zero");

    const double sum_a = std::accumulate(A.begin(), A.end(), 0.0);
    double sum_root = 0.0;
    for (double a : A) sum_root += std::sqrt(a);

    // Max level (A_b / X_b) at the equity optimum and at the efficiency optimum.
    const double t_eq = sum_a / S;
    double t_ef = 0.0;
    for (double a : A) t_ef = std::max(t_ef, std::sqrt(a) * sum_root / S);

    auto level_of = [&](double t) { return waterfill_level(A, t, S); };
    // Sum of max-constraint multipliers minus (1 - gamma); non-increasing in t.
    auto kkt_gap = [&](double t, double s) {
        double eta = 0.0;
        if (gamma > 0.0) {
            for (double a : A) {
                const double ratio = a / (s * s * t * t);
                if (ratio > 1.0) eta += gamma * (ratio - 1.0);
            }
        }
        return eta - (1.0 - gamma);
    };

    double lo = t_eq;
    double hi = std::max(t_ef, t_eq);
    int iter = 0;
    while (hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi) {
        if (++iter > kMaxIterations) {
            throw Error(ErrorKind::DidNotConverge, "bisection on the max level did not converge");
        }
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double s = level_of(mid);
        if (s > 0.0 && kkt_gap(mid, s) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    const double t = hi;
    const double s = level_of(t);
    std::vector<double> X(A.size());
    double sum_x = 0.0;
    for (std::size_t i = 0; i < A.size(); ++i) {
        X[i] = std::max(A[i] / t, s * std::sqrt(A[i]));
        sum_x += X[i];
    }
    // Primal feasibility, then dual: at an interior level the multipliers
    // must sum to 1 - gamma; at the equity end every borough is at the floor
    // and any split of the multipliers is admissible.
    double residual = std::abs(sum_x - S) / S;
    if (gamma > 0.0 && s > 0.0 && t > t_eq * (1.0 + 1e-12)) {
        residual = std::max(residual, std::abs(kkt_gap(t, s)));
    }
    if (!(residual <= kKktTolerance)) {
        throw Error(ErrorKind::DidNotConverge, "KKT residual " + std::to_string(residual));
    }

    std::vector<double> slack(inst.n_boroughs(), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i) slack[idx[i]] = X[i] * (S / sum_x);
    return assemble(inst, slack);
}

double weighted_objective(const StylizedSolution& solution, double gamma) {
    return gamma * solution.g + (1.0 - gamma) * solution.f;
}

namespace {

void require_two_by_one(const ProblemInstance& inst) {
    if (inst.n_categories() != 1 || inst.n_boroughs() != 2) {
        throw Error(ErrorKind::WrongDimensions,
                    "price formulas need exactly 1 category and 2 boroughs, got " +
                        std::to_string(inst.n_categories()) + "x" +
                        std::to_string(inst.n_boroughs()));
    }
}

}  // namespace

double price_of_equity(const ProblemInstance& inst) {
    require_two_by_one(inst);
    const double s1 = std::sqrt(inst.lambda(0, 0) * inst.risk(0, 0));
    const double s2 = std::sqrt(inst.lambda(0, 1) * inst.risk(0, 1));
    return inst.tail_param() * (s1 - s2) * (s1 - s2) / inst.slack();
}

double price_of_efficiency(const ProblemInstance& inst) {
    require_two_by_one(inst);
    double s1 = std::sqrt(inst.lambda(0, 0) * inst.risk(0, 0));
    double s2 = std::sqrt(inst.lambda(0, 1) * inst.risk(0, 1));
    if (s1 < s2) std::swap(s1, s2);
    return inst.tail_param() * s2 * (s1 - s2) / inst.slack();
}

double ResidualReport::max_violation() const {
    return std::max({sla_tightness, gps_sum, budget_sum, capacity_split, positivity});
}

ResidualReport verify_solution(const ProblemInstance& inst, const StylizedSolution& sol) {
    const std::size_t K = inst.n_categories();
    const std::size_t B = inst.n_boroughs();
    if (!sol.z.same_shape(K, B) || !sol.phi.same_shape(K, B) || !sol.x.same_shape(K, B) ||
        sol.budgets.size() != B) {
        throw Error(ErrorKind::DimensionMismatch, "solution shape does not match instance");
    }
    const bool has_mask = sol.active.same_shape(K, B);
    const double alpha = inst.tail_param();

    ResidualReport rep;
    std::vector<double> cost(B, 0.0);
    for (std::size_t b = 0; b < B; ++b) {
        double phi_sum = 0.0;
        rep.positivity = std::max(rep.positivity, std::max(0.0, -sol.budgets[b]));
        for (std::size_t k = 0; k < K; ++k) {
            const bool active = has_mask ? sol.active(k, b) != 0
                                         : inst.lambda(k, b) * inst.risk(k, b) > 0.0;
            phi_sum += sol.phi(k, b);
            rep.positivity = std::max(rep.positivity, std::max(0.0, -sol.phi(k, b)));
            rep.capacity_split =
                std::max(rep.capacity_split, std::abs(sol.budgets[b] * sol.phi(k, b) -
                                                      inst.lambda(k, b) - sol.x(k, b)));
            if (!active) continue;
            rep.positivity = std::max(rep.positivity, std::max(0.0, -sol.x(k, b)));
            rep.positivity = std::max(rep.positivity, std::max(0.0, -sol.z(k, b)));
            rep.sla_tightness =
                std::max(rep.sla_tightness, std::abs(sol.x(k, b) * sol.z(k, b) - alpha));
            cost[b] += inst.lambda(k, b) * inst.risk(k, b) * sol.z(k, b);
        }
        rep.gps_sum = std::max(rep.gps_sum, std::max(0.0, phi_sum - 1.0));
    }
    const double budget_total = std::accumulate(sol.budgets.begin(), sol.budgets.end(), 0.0);
    rep.budget_sum = std::abs(budget_total - inst.total_budget());
    rep.g = efficiency_loss(cost);
    rep.f = equity_loss(cost);
    return rep;
}

}  // namespace slaforge
