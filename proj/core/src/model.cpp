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

#include "slaforge/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slaforge/error.hpp"

namespace slaforge {

namespace {

void require_shape(const Matrix<double>& m, std::size_t rows, std::size_t cols,
                   const char* what) {
    if (!m.same_shape(rows, cols)) {
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + " is " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", expected " + std::to_string(rows) +
                        "x" + std::to_string(cols));
    }
}

// Normalizes in place to sum 1; an all-zero group becomes uniform.
template <typename It>
void normalize_group(It first, It last) {
    const auto n = std::distance(first, last);
    if (n == 0) return;
    double sum = 0.0;
    for (auto it = first; it != last; ++it) sum += *it;
    if (sum <= 0.0) {
        std::fill(first, last, 1.0 / static_cast<double>(n));
        return;
    }
    for (auto it = first; it != last; ++it) *it /= sum;
}

void check_non_negative(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::NegativeEntry,
                        std::string(what) + " has entry " + std::to_string(v));
        }
    }
}

void check_fractions(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::FractionOutOfRange,
                        std::string(what) + " has entry " + std::to_string(v));
        }
    }
}

void normalize_columns(Matrix<double>& m) {
    std::vector<double> col(m.rows());
    for (std::size_t b = 0; b < m.cols(); ++b) {
        for (std::size_t k = 0; k < m.rows(); ++k) col[k] = m(k, b);
        normalize_group(col.begin(), col.end());
        for (std::size_t k = 0; k < m.rows(); ++k) m(k, b) = col[k];
    }
}

// Raw GPS/target blocks are borough-major (category fastest).
Matrix<double> block_to_matrix(std::span<const double> block, std::size_t n_categories,
                               std::size_t n_boroughs) {
    Matrix<double> m(n_categories, n_boroughs);
    for (std::size_t b = 0; b < n_boroughs; ++b)
        for (std::size_t k = 0; k < n_categories; ++k) m(k, b) = block[b * n_categories + k];
    return m;
}

void append_block(std::vector<double>& out, const Matrix<double>& m) {
    for (std::size_t b = 0; b < m.cols(); ++b)
        for (std::size_t k = 0; k < m.rows(); ++k) out.push_back(m(k, b));
}

}  // namespace

ProblemInstance build_instance(std::vector<std::string> categories,
                               std::vector<std::string> boroughs, Matrix<double> lambda,
                               Matrix<double> risk, double total_budget, double tail_param) {
    const std::size_t K = categories.size();
    const std::size_t B = boroughs.size();
    if (K == 0 || B == 0) {
        throw Error(ErrorKind::DimensionMismatch, "instance needs at least one category and borough");
    }
    require_shape(lambda, K, B, "lambda");
    require_shape(risk, K, B, "risk");
    check_non_negative(lambda.flat(), "lambda");
    for (double r : risk.flat()) {
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw Error(ErrorKind::NonPositiveRisk, "risk rating " + std::to_string(r));
        }
    }
    if (!(tail_param > 0.0) || !std::isfinite(tail_param)) {
        throw Error(ErrorKind::NonPositiveTail, "alpha = " + std::to_string(tail_param));
    }
    const double rate = std::accumulate(lambda.flat().begin(), lambda.flat().end(), 0.0);
    if (!(total_budget > rate) || !std::isfinite(total_budget)) {
        throw Error(ErrorKind::NonPositiveSlack, "budget " + std::to_string(total_budget) +
                                                     " does not exceed total arrival rate " +
                                                     std::to_string(rate));
    }

    ProblemInstance inst;
    inst.categories_ = std::move(categories);
    inst.boroughs_ = std::move(boroughs);
    inst.lambda_ = std::move(lambda);
    inst.risk_ = std::move(risk);
    inst.total_budget_ = total_budget;
    inst.tail_param_ = tail_param;
    inst.total_rate_ = rate;
    return inst;
}

double tail_param_from_probability(double tail_probability) {
    if (!(tail_probability > 0.0 && tail_probability < 1.0)) {
        throw Error(ErrorKind::NonPositiveTail,
                    "tail probability must lie in (0,1), got " + std::to_string(tail_probability));
    }
    return -std::log(tail_probability);
}

BoroughBudgetPolicy BoroughBudgetPolicy::from_parts(std::vector<double> budget_frac,
                                                    Matrix<double> gps,
                                                    Matrix<double> target_frac) {
    const std::size_t K = gps.rows();
    const std::size_t B = gps.cols();
    if (budget_frac.size() != B || !target_frac.same_shape(K, B) || K == 0 || B == 0) {
        throw Error(ErrorKind::DimensionMismatch, "borough policy parts have inconsistent shapes");
    }
    check_non_negative(budget_frac, "budget fractions");
    check_non_negative(gps.flat(), "GPS weights");
    check_fractions(target_frac.flat(), "inspection fractions");

    BoroughBudgetPolicy p;
    normalize_group(budget_frac.begin(), budget_frac.end());
    normalize_columns(gps);
    p.budget_frac_ = std::move(budget_frac);
    p.gps_ = std::move(gps);
    p.target_frac_ = std::move(target_frac);
    return p;
}

std::vector<double> BoroughBudgetPolicy::to_vector() const {
    std::vector<double> out(budget_frac_);
    append_block(out, gps_);
    append_block(out, target_frac_);
    return out;
}

CityBudgetPolicy CityBudgetPolicy::from_parts(Matrix<double> gps, Matrix<double> target_frac) {
    const std::size_t K = gps.rows();
    const std::size_t B = gps.cols();
    if (!target_frac.same_shape(K, B) || K == 0 || B == 0) {
        throw Error(ErrorKind::DimensionMismatch, "city policy parts have inconsistent shapes");
    }
    check_non_negative(gps.flat(), "GPS weights");
    check_fractions(target_frac.flat(), "inspection fractions");
    normalize_group(gps.flat().begin(), gps.flat().end());

    CityBudgetPolicy p;
    p.gps_ = std::move(gps);
    p.target_frac_ = std::move(target_frac);
    return p;
}

std::vector<double> CityBudgetPolicy::to_vector() const {
    std::vector<double> out;
    append_block(out, gps_);
    append_block(out, target_frac_);
    return out;
}

std::size_t borough_vector_size(std::size_t n_categories, std::size_t n_boroughs) {
    return n_boroughs + 2 * n_categories * n_boroughs;
}

BoroughBudgetPolicy borough_policy_from_vector(std::span<const double> raw,
                                               std::size_t n_categories,
                                               std::size_t n_boroughs) {
    const std::size_t kb = n_categories * n_boroughs;
    if (raw.size() != borough_vector_size(n_categories, n_boroughs) || kb == 0) {
        throw Error(ErrorKind::DimensionMismatch,
                    "raw policy vector has length " + std::to_string(raw.size()) + ", expected " +
                        std::to_string(borough_vector_size(n_categories, n_boroughs)));
    }
    check_non_negative(raw, "raw policy vector");
    const auto budgets = raw.subspan(0, n_boroughs);
    const auto gps = raw.subspan(n_boroughs, kb);
    const auto targets = raw.subspan(n_boroughs + kb, kb);
    check_fractions(targets, "inspection fractions");

    return BoroughBudgetPolicy::from_parts({budgets.begin(), budgets.end()},
                                           block_to_matrix(gps, n_categories, n_boroughs),
                                           block_to_matrix(targets, n_categories, n_boroughs));
}

Matrix<double> city_gps_from_vector(std::span<const double> raw, std::size_t n_categories,
                                    std::size_t n_boroughs) {
    if (raw.size() != n_categories * n_boroughs || raw.empty()) {
        throw Error(ErrorKind::DimensionMismatch, "raw city GPS vector has wrong length");
    }
    check_non_negative(raw, "raw city GPS vector");
    Matrix<double> m = block_to_matrix(raw, n_categories, n_boroughs);
    normalize_group(m.flat().begin(), m.flat().end());
    return m;
}

// ---------------------------------------------------------------------------

ArrivalTrace ArrivalTrace::from_counts(std::vector<std::string> categories,
                                       std::vector<std::string> boroughs, std::size_t horizon,
                                       std::vector<std::int64_t> counts) {
    if (horizon == 0) throw Error(ErrorKind::DimensionMismatch, "arrival trace horizon is zero");
    if (categories.empty() || boroughs.empty() ||
        counts.size() != horizon * categories.size() * boroughs.size()) {
        throw Error(ErrorKind::DimensionMismatch, "arrival counts do not match horizon x K x B");
    }
    for (auto c : counts) {
        if (c < 0) throw Error(ErrorKind::NegativeEntry, "negative arrival count");
    }
    ArrivalTrace t;
    t.categories_ = std::move(categories);
    t.boroughs_ = std::move(boroughs);
    t.horizon_ = horizon;
    t.counts_ = std::move(counts);
    t.compute_totals();
    return t;
}

ArrivalTrace ArrivalTrace::from_records(std::vector<std::string> categories,
                                        std::vector<std::string> boroughs, std::size_t horizon,
                                        std::vector<IncidentRecord> records,
                                        std::vector<std::string> regions) {
    if (horizon == 0) throw Error(ErrorKind::DimensionMismatch, "arrival trace horizon is zero");
    const std::size_t K = categories.size();
    const std::size_t B = boroughs.size();
    if (K == 0 || B == 0) throw Error(ErrorKind::DimensionMismatch, "empty category/borough list");

    std::vector<std::int64_t> counts(horizon * K * B, 0);
    for (const auto& r : records) {
        if (r.day < 0 || static_cast<std::size_t>(r.day) >= horizon || r.category >= K ||
            r.borough >= B ||
            (r.region >= 0 && static_cast<std::size_t>(r.region) >= regions.size())) {
            throw Error(ErrorKind::DimensionMismatch, "incident record out of range");
        }
        ++counts[(static_cast<std::size_t>(r.day) * K + r.category) * B + r.borough];
    }
    std::stable_sort(records.begin(), records.end(),
                     [](const IncidentRecord& a, const IncidentRecord& b) { return a.day < b.day; });

    ArrivalTrace t;
    t.categories_ = std::move(categories);
    t.boroughs_ = std::move(boroughs);
    t.horizon_ = horizon;
    t.counts_ = std::move(counts);
    t.records_ = std::move(records);
    t.regions_ = std::move(regions);
    t.has_records_ = true;
    t.compute_totals();
    return t;
}

void ArrivalTrace::compute_totals() {
    const std::size_t K = n_categories();
    const std::size_t B = n_boroughs();
    totals_ = Matrix<std::int64_t>(K, B, 0);
    for (std::size_t d = 0; d < horizon_; ++d)
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t b = 0; b < B; ++b) totals_(k, b) += count(d, k, b);
}

std::int64_t ArrivalTrace::total_incidents() const noexcept {
    return std::accumulate(totals_.flat().begin(), totals_.flat().end(), std::int64_t{0});
}

ArrivalTrace ArrivalTrace::repeated(std::size_t times) const {
    if (times <= 1) return *this;
    ArrivalTrace t(*this);
    t.horizon_ = horizon_ * times;
    t.counts_.clear();
    t.counts_.reserve(counts_.size() * times);
    for (std::size_t i = 0; i < times; ++i)
        t.counts_.insert(t.counts_.end(), counts_.begin(), counts_.end());
    if (has_records_) {
        t.records_.clear();
        t.records_.reserve(records_.size() * times);
        for (std::size_t i = 0; i < times; ++i) {
            for (auto r : records_) {
                r.day += static_cast<std::int32_t>(i * horizon_);
                t.records_.push_back(r);
            }
        }
    }
    t.compute_totals();
    return t;
}

CapacityTrace::CapacityTrace(std::vector<std::int64_t> capacity) : capacity_(std::move(capacity)) {
    if (capacity_.empty()) throw Error(ErrorKind::DimensionMismatch, "capacity trace is empty");
    for (auto c : capacity_) {
        if (c < 0) throw Error(ErrorKind::NegativeCapacity, "capacity " + std::to_string(c));
    }
}

std::int64_t CapacityTrace::total() const noexcept {
    return std::accumulate(capacity_.begin(), capacity_.end(), std::int64_t{0});
}

CapacityTrace CapacityTrace::repeated(std::size_t times) const {
    if (times <= 1) return *this;
    std::vector<std::int64_t> v;
    v.reserve(capacity_.size() * times);
    for (std::size_t i = 0; i < times; ++i) v.insert(v.end(), capacity_.begin(), capacity_.end());
    return CapacityTrace(std::move(v));
}

}  // namespace slaforge
