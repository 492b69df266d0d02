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

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "slaforge/error.hpp"
#include "slaforge/model.hpp"
#include "support.hpp"

namespace slaforge {
namespace {

using testing::matrix;
using testing::names;

template <typename F>
ErrorKind kind_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no slaforge::Error thrown";
    return ErrorKind::IoError;
}

TEST(BuildInstance, MinimalFeasibleCase) {
    const auto inst = testing::instance(1, 1, {1.0}, {1.0}, 2.0, 1.0);
    EXPECT_DOUBLE_EQ(inst.slack(), 1.0);
    EXPECT_DOUBLE_EQ(inst.total_arrival_rate(), 1.0);
}

TEST(BuildInstance, ZeroSlackRejected) {
    EXPECT_EQ(kind_of([] { testing::instance(1, 1, {1.0}, {1.0}, 1.0, 1.0); }),
              ErrorKind::NonPositiveSlack);
}

TEST(BuildInstance, ShapeMismatchRejected) {
    EXPECT_EQ(kind_of([] {
                  build_instance(names("k", 2), names("b", 2), Matrix<double>(2, 2, 1.0),
                                 Matrix<double>(1, 2, 1.0), 10.0, 1.0);
              }),
              ErrorKind::DimensionMismatch);
}

TEST(BuildInstance, RejectsBadRiskTailAndRates) {
    EXPECT_EQ(kind_of([] { testing::instance(1, 1, {1.0}, {0.0}, 2.0, 1.0); }),
              ErrorKind::NonPositiveRisk);
    EXPECT_EQ(kind_of([] { testing::instance(1, 1, {1.0}, {1.0}, 2.0, 0.0); }),
              ErrorKind::NonPositiveTail);
    EXPECT_EQ(kind_of([] { testing::instance(1, 2, {-1.0, 1.0}, {1.0, 1.0}, 5.0, 1.0); }),
              ErrorKind::NegativeEntry);
}

TEST(TailParam, IsMinusLogProbability) {
    EXPECT_DOUBLE_EQ(tail_param_from_probability(0.05), -std::log(0.05));
    EXPECT_THROW(tail_param_from_probability(1.0), Error);
    EXPECT_THROW(tail_param_from_probability(0.0), Error);
}

TEST(BoroughPolicyFromVector, UniformBudgetNormalization) {
    // K = 1, B = 5
    std::vector<double> raw(borough_vector_size(1, 5), 1.0);
    const auto p = borough_policy_from_vector(raw, 1, 5);
    for (double c : p.budget_frac()) EXPECT_DOUBLE_EQ(c, 0.2);
}

TEST(BoroughPolicyFromVector, ProportionalGps) {
    // K = 3, B = 1: budget, gps (2,1,1), targets
    const std::vector<double> raw{1.0, 2.0, 1.0, 1.0, 0.5, 0.5, 0.5};
    const auto p = borough_policy_from_vector(raw, 3, 1);
    EXPECT_DOUBLE_EQ(p.gps()(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(p.gps()(1, 0), 0.25);
    EXPECT_DOUBLE_EQ(p.gps()(2, 0), 0.25);
}

TEST(BoroughPolicyFromVector, AllZeroGroupsBecomeUniform) {
    std::vector<double> raw(borough_vector_size(1, 4), 0.0);
    const auto p = borough_policy_from_vector(raw, 1, 4);
    for (double c : p.budget_frac()) EXPECT_DOUBLE_EQ(c, 0.25);
    for (std::size_t b = 0; b < 4; ++b) EXPECT_DOUBLE_EQ(p.gps()(0, b), 1.0);
}

TEST(BoroughPolicyFromVector, Errors) {
    std::vector<double> raw(borough_vector_size(2, 2), 0.5);
    raw[0] = -1.0;
    EXPECT_EQ(kind_of([&] { borough_policy_from_vector(raw, 2, 2); }), ErrorKind::NegativeEntry);
    raw[0] = 0.5;
    raw.back() = 1.5;
    EXPECT_EQ(kind_of([&] { borough_policy_from_vector(raw, 2, 2); }),
              ErrorKind::FractionOutOfRange);
    raw.pop_back();
    EXPECT_EQ(kind_of([&] { borough_policy_from_vector(raw, 2, 2); }),
              ErrorKind::DimensionMismatch);
}

TEST(BoroughPolicyFromVector, LayoutIsBoroughMajor) {
    // K = 2, B = 2; gps block (b0: k0,k1) (b1: k0,k1)
    const std::vector<double> raw{1, 3, 1, 3, 3, 1, 0.1, 0.2, 0.3, 0.4};
    const auto p = borough_policy_from_vector(raw, 2, 2);
    EXPECT_DOUBLE_EQ(p.budget_frac()[0], 0.25);
    EXPECT_DOUBLE_EQ(p.gps()(0, 0), 0.25);
    EXPECT_DOUBLE_EQ(p.gps()(1, 0), 0.75);
    EXPECT_DOUBLE_EQ(p.gps()(0, 1), 0.75);
    EXPECT_DOUBLE_EQ(p.target_frac()(1, 0), 0.2);
    EXPECT_DOUBLE_EQ(p.target_frac()(0, 1), 0.3);
    EXPECT_EQ(p.to_vector().size(), raw.size());
}

class PolicyProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(PolicyProperties, InvariantsIdempotenceAndScaleInvariance) {
    std::mt19937_64 gen(GetParam());
    std::uniform_int_distribution<std::size_t> dim(1, 5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t K = dim(gen);
    const std::size_t B = dim(gen);
    std::vector<double> raw(borough_vector_size(K, B));
    for (double& v : raw) v = u(gen);
    const auto p = borough_policy_from_vector(raw, K, B);

    const double budget_sum = std::accumulate(p.budget_frac().begin(), p.budget_frac().end(), 0.0);
    EXPECT_NEAR(budget_sum, 1.0, 1e-12);
    for (std::size_t b = 0; b < B; ++b) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += p.gps()(k, b);
        EXPECT_NEAR(s, 1.0, 1e-12);
    }
    for (double t : p.target_frac().flat()) {
        EXPECT_GE(t, 0.0);
        EXPECT_LE(t, 1.0);
    }

    const auto again = borough_policy_from_vector(p.to_vector(), K, B);
    for (std::size_t i = 0; i < raw.size(); ++i)
        EXPECT_NEAR(again.to_vector()[i], p.to_vector()[i], 1e-15);

    auto scaled = raw;
    const double c = 0.5 + 10.0 * u(gen);
    for (std::size_t b = 0; b < B; ++b) scaled[b] *= c;
    const auto q = borough_policy_from_vector(scaled, K, B);
    for (std::size_t b = 0; b < B; ++b) EXPECT_NEAR(q.budget_frac()[b], p.budget_frac()[b], 1e-15);
}

INSTANTIATE_TEST_SUITE_P(Random, PolicyProperties, ::testing::Range<std::uint64_t>(1, 51));

TEST(CityPolicy, GlobalNormalization) {
    const auto p = CityBudgetPolicy::from_parts(matrix<double>(1, 2, {2.0, 2.0}),
                                                matrix<double>(1, 2, {1.0, 1.0}));
    EXPECT_DOUBLE_EQ(p.gps()(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(p.gps()(0, 1), 0.5);
    const auto g = city_gps_from_vector(std::vector<double>{1.0, 3.0}, 1, 2);
    EXPECT_DOUBLE_EQ(g(0, 1), 0.75);
}

TEST(ArrivalTrace, CountsAndTotals) {
    // 2 days, K = 1, B = 2
    const auto t = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 2, {1, 2, 3, 0});
    EXPECT_EQ(t.count(1, 0, 0), 3);
    EXPECT_EQ(t.total(0, 0), 4);
    EXPECT_EQ(t.total(0, 1), 2);
    EXPECT_EQ(t.total_incidents(), 6);
    EXPECT_FALSE(t.has_records());
}

TEST(ArrivalTrace, RecordsAreConsistentWithCounts) {
    std::vector<IncidentRecord> rec{{1, 0, 1, 0}, {0, 0, 0, 1}, {1, 0, 1, -1}};
    const auto t = ArrivalTrace::from_records(names("k", 1), names("b", 2), 2, rec, {"r0", "r1"});
    EXPECT_TRUE(t.has_records());
    EXPECT_EQ(t.records().front().day, 0);
    EXPECT_EQ(t.count(1, 0, 1), 2);
    EXPECT_EQ(t.count(0, 0, 0), 1);
}

TEST(ArrivalTrace, RejectsBadInput) {
    EXPECT_EQ(kind_of([] { ArrivalTrace::from_counts(names("k", 1), names("b", 1), 0, {}); }),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { ArrivalTrace::from_counts(names("k", 1), names("b", 1), 1, {-1}); }),
              ErrorKind::NegativeEntry);
    EXPECT_EQ(kind_of([] {
                  ArrivalTrace::from_records(names("k", 1), names("b", 1), 1, {{1, 0, 0, -1}});
              }),
              ErrorKind::DimensionMismatch);
}

TEST(ArrivalTrace, RepeatedConcatenates) {
    const auto t = ArrivalTrace::from_counts(names("k", 1), names("b", 1), 2, {1, 2});
    const auto r = t.repeated(3);
    EXPECT_EQ(r.horizon(), 6u);
    EXPECT_EQ(r.count(4, 0, 0), 1);
    EXPECT_EQ(r.count(5, 0, 0), 2);
    EXPECT_EQ(r.total_incidents(), 9);
}

TEST(CapacityTrace, Validation) {
    EXPECT_EQ(kind_of([] { CapacityTrace(std::vector<std::int64_t>{}); }),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of([] { CapacityTrace(std::vector<std::int64_t>{1, -1}); }),
              ErrorKind::NegativeCapacity);
    const CapacityTrace c({5, 3});
    EXPECT_EQ(c.total(), 8);
    EXPECT_EQ(c.repeated(2).values(), (std::vector<std::int64_t>{5, 3, 5, 3}));
}

}  // namespace
}  // namespace slaforge
