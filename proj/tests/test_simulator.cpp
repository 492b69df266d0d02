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

#include <cmath>
#include <random>

#include "sim_checks.hpp"
#include "slaforge/error.hpp"
#include "slaforge/simulator.hpp"
#include "support.hpp"

namespace slaforge {
namespace {

using testing::matrix;
using testing::names;

ArrivalTrace single_queue(std::vector<std::int64_t> per_day) {
    const std::size_t T = per_day.size();
    return ArrivalTrace::from_counts(names("k", 1), names("b", 1), T, std::move(per_day));
}

BoroughBudgetPolicy single_borough_policy(double p) {
    return BoroughBudgetPolicy::from_parts({1.0}, Matrix<double>(1, 1, 1.0), Matrix<double>(1, 1, p));
}

std::vector<std::int32_t> delays(const SimulationOutcome& out) {
    std::vector<std::int32_t> d;
    for (const auto& inc : out.incidents)
        if (inc.fate == Fate::Inspected) d.push_back(inc.delay());
    return d;
}

TEST(BoroughSimulator, HandTraceServesEarliestFirst) {
    SimulationConfig cfg;
    cfg.review_period = 1'000'000;
    const auto out = simulate_borough_policy(single_queue({2, 1, 0}), CapacityTrace({1, 1, 1}),
                                             single_borough_policy(1.0), cfg);
    ASSERT_EQ(out.incidents.size(), 3u);
    EXPECT_EQ(delays(out), (std::vector<std::int32_t>{0, 1, 1}));
    EXPECT_EQ(out.incidents[0].fate_day, 0);
    EXPECT_EQ(out.incidents[1].fate_day, 1);
    EXPECT_EQ(out.incidents[2].fate_day, 2);
    EXPECT_EQ(out.count(Fate::Dropped)(0, 0), 0);
    EXPECT_EQ(out.count(Fate::Backlog)(0, 0), 0);
}

TEST(BoroughSimulator, HandTraceDropFiresAfterInspection) {
    SimulationConfig cfg;
    cfg.review_period = 1;
    const auto out = simulate_borough_policy(single_queue({2}), CapacityTrace({1}),
                                             single_borough_policy(0.0), cfg);
    ASSERT_EQ(out.incidents.size(), 2u);
    EXPECT_EQ(out.incidents[0].fate, Fate::Inspected);
    EXPECT_EQ(out.incidents[0].delay(), 0);
    EXPECT_EQ(out.incidents[1].fate, Fate::Dropped);
    EXPECT_EQ(out.incidents[1].fate_day, 0);
}

TEST(BoroughSimulator, EmptySystem) {
    const auto out = simulate_borough_policy(single_queue({0, 0, 0}), CapacityTrace({4, 4, 4}),
                                             single_borough_policy(1.0), {});
    EXPECT_TRUE(out.incidents.empty());
    EXPECT_EQ(out.daily_inspections(), (std::vector<std::int64_t>{0, 0, 0}));
}

TEST(BoroughSimulator, ReviewDaysFollowThePeriod) {
    // Two incidents per day, no capacity, p = 0: everything waiting at the
    // end of days 2 and 5 (0-based) is dropped there.
    SimulationConfig cfg;
    cfg.review_period = 3;
    const auto out = simulate_borough_policy(single_queue({2, 2, 2, 2, 2, 2, 2}),
                                             CapacityTrace({0, 0, 0, 0, 0, 0, 0}),
                                             single_borough_policy(0.0), cfg);
    for (const auto& inc : out.incidents) {
        if (inc.arrival_day <= 2) EXPECT_EQ(inc.fate_day, 2);
        if (inc.arrival_day >= 3 && inc.arrival_day <= 5) EXPECT_EQ(inc.fate_day, 5);
        if (inc.arrival_day == 6) EXPECT_EQ(inc.fate, Fate::Backlog);
    }
}

TEST(BoroughSimulator, RejectsMisalignedTraces) {
    try {
        simulate_borough_policy(single_queue({1, 1}), CapacityTrace({1}), single_borough_policy(1.0), {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TraceMisaligned);
    }
}

TEST(BoroughSimulator, CapacityGoesToBoroughsWithBacklog) {
    // All budget to borough 0, but only borough 1 has incidents: the unused
    // share is pooled and served there.
    const auto arrivals =
        ArrivalTrace::from_counts(names("k", 1), names("b", 2), 2, {0, 3, 0, 0});
    const auto policy = BoroughBudgetPolicy::from_parts(
        {1.0, 1e-9}, Matrix<double>(1, 2, 1.0), Matrix<double>(1, 2, 1.0));
    const auto out = simulate_borough_policy(arrivals, CapacityTrace({2, 2}), policy, {});
    EXPECT_EQ(out.daily_inspections(), (std::vector<std::int64_t>{2, 1}));
}

TEST(BoroughSimulator, RhoOneCanServeAnyBacklogEntry) {
    // With rho = 1 the whole backlog is eligible; over many seeds the last
    // arrival is sometimes chosen first.
    SimulationConfig cfg;
    cfg.fcfs_violation = 1.0;
    int late_first = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        cfg.seed = seed;
        const auto out = simulate_borough_policy(single_queue({5, 0}), CapacityTrace({0, 1}),
                                                 single_borough_policy(1.0), cfg);
        if (out.incidents[4].fate == Fate::Inspected) ++late_first;
    }
    EXPECT_GT(late_first, 0);
    EXPECT_LT(late_first, 50);
}

TEST(BoroughSimulator, TraceRepeatsAreDistinctIncidents) {
    SimulationConfig cfg;
    cfg.trace_repeats = 3;
    const auto out = simulate_borough_policy(single_queue({1, 0}), CapacityTrace({1, 0}),
                                             single_borough_policy(1.0), cfg);
    EXPECT_EQ(out.horizon, 6u);
    ASSERT_EQ(out.incidents.size(), 3u);
    EXPECT_EQ(out.incidents[2].arrival_day, 4);
    EXPECT_EQ(out.incidents[2].fate_day, 4);
}

TEST(CitySimulator, SinglePairMatchesBoroughSimulator) {
    const auto arrivals = single_queue({3, 0, 4, 1, 0, 2, 5, 0});
    const CapacityTrace cap({1, 2, 1, 0, 3, 1, 2, 2});
    const auto city = CityBudgetPolicy::from_parts(Matrix<double>(1, 1, 1.0), Matrix<double>(1, 1, 1.0));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        SimulationConfig cfg;
        cfg.seed = seed;
        cfg.fcfs_violation = 0.5;
        cfg.review_period = 1'000'000;
        EXPECT_EQ(simulate_city_policy(arrivals, cap, city, cfg),
                  simulate_borough_policy(arrivals, cap, single_borough_policy(1.0), cfg));
    }
}

TEST(CitySimulator, FullThinningDropsEverythingOnArrival) {
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 2, {1, 2, 3, 4});
    const auto city = CityBudgetPolicy::from_parts(Matrix<double>(1, 2, 1.0), Matrix<double>(1, 2, 0.0));
    const auto out = simulate_city_policy(arrivals, CapacityTrace({5, 5}), city, {});
    for (const auto& inc : out.incidents) {
        EXPECT_EQ(inc.fate, Fate::Dropped);
        EXPECT_EQ(inc.fate_day, inc.arrival_day);
    }
}

TEST(CitySimulator, GpsNormalizationInvariance) {
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 3, {2, 3, 1, 4, 0, 2});
    const CapacityTrace cap({2, 3, 2});
    const auto a = CityBudgetPolicy::from_parts(matrix<double>(1, 2, {2.0, 2.0}), Matrix<double>(1, 2, 1.0));
    const auto b = CityBudgetPolicy::from_parts(matrix<double>(1, 2, {0.5, 0.5}), Matrix<double>(1, 2, 1.0));
    SimulationConfig cfg;
    cfg.seed = 5;
    EXPECT_EQ(simulate_city_policy(arrivals, cap, a, cfg), simulate_city_policy(arrivals, cap, b, cfg));
}

TEST(CityFractions, DirectRatio) {
    // 1 category, 2 boroughs, 1 day carrying all totals.
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 1, {100, 100});
    const auto p = derive_city_inspection_fractions(matrix<double>(1, 2, {0.5, 0.5}), arrivals,
                                                    CapacityTrace({100}));
    EXPECT_DOUBLE_EQ(p(0, 0), 0.5);
    EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
}

TEST(CityFractions, ClampsAtOne) {
    const auto p = derive_city_inspection_fractions(Matrix<double>(1, 1, 1.0), single_queue({100}),
                                                    CapacityTrace({200}));
    EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
}

TEST(CityFractions, RedistributesClampedSurplus) {
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 1, {50, 100});
    const auto p = derive_city_inspection_fractions(matrix<double>(1, 2, {0.8, 0.2}), arrivals,
                                                    CapacityTrace({100}));
    EXPECT_DOUBLE_EQ(p(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(p(0, 1), 0.5);
    // Effective capacity used never exceeds the total.
    EXPECT_LE(p(0, 0) * 50 + p(0, 1) * 100, 100.0 + 1e-9);
}

TEST(CityFractions, ZeroArrivalPairRejected) {
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 2), 1, {10, 0});
    try {
        derive_city_inspection_fractions(matrix<double>(1, 2, {0.5, 0.5}), arrivals, CapacityTrace({5}));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::ZeroArrivalPair);
    }
}

TEST(SyntheticTrace, ZeroRatesGiveZeroArrivals) {
    const auto inst = testing::instance(1, 2, {0.0, 0.0}, {1.0, 1.0}, 3.0, 1.0);
    const auto [arr, cap] = generate_synthetic_trace(inst, 50, 0.5, 1);
    EXPECT_EQ(arr.total_incidents(), 0);
    EXPECT_EQ(cap.horizon(), 50u);
}

TEST(SyntheticTrace, SampleMeansMatchRates) {
    const auto inst = testing::instance(2, 1, {0.7, 3.0}, {1.0, 1.0}, 5.0, 1.0);
    const std::size_t T = 100000;
    const auto [arr, cap] = generate_synthetic_trace(inst, T, 0.8, 2);
    for (std::size_t k = 0; k < 2; ++k) {
        const double mean = static_cast<double>(arr.total(k, 0)) / T;
        const double lam = inst.lambda(k, 0);
        EXPECT_NEAR(mean, lam, 3.0 * std::sqrt(lam / T));
    }
    const double cap_mean = static_cast<double>(cap.total()) / T;
    EXPECT_NEAR(cap_mean, 4.0, 3.0 * std::sqrt(4.0 / T));
}

TEST(SyntheticTrace, DeterministicGivenSeed) {
    const auto inst = testing::instance(2, 2, {1, 2, 3, 4}, {1, 1, 1, 1}, 12.0, 1.0);
    const auto a = generate_synthetic_trace(inst, 30, 1.0, 9);
    const auto b = generate_synthetic_trace(inst, 30, 1.0, 9);
    const auto c = generate_synthetic_trace(inst, 30, 1.0, 10);
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
    EXPECT_FALSE(a.first == c.first);
}

// Randomized traces, policies, rho, D and seeds.
class SimulatorFuzz : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(SimulatorFuzz, InvariantsHold) {
    std::mt19937_64 gen(GetParam());
    std::uniform_int_distribution<std::size_t> dim(1, 3);
    std::uniform_int_distribution<std::int64_t> count(0, 4);
    std::uniform_int_distribution<std::int64_t> capd(0, 6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t K = dim(gen);
    const std::size_t B = dim(gen);
    const std::size_t T = 20 + gen() % 60;
    std::vector<std::int64_t> counts(T * K * B);
    for (auto& c : counts) c = count(gen);
    std::vector<std::int64_t> capv(T);
    for (auto& c : capv) c = capd(gen);
    const auto arrivals = ArrivalTrace::from_counts(names("k", K), names("b", B), T, counts);
    const CapacityTrace capacity(capv);

    SimulationConfig cfg;
    cfg.seed = gen();
    cfg.review_period = 1 + static_cast<std::int64_t>(gen() % 10);
    cfg.fcfs_violation = (gen() % 3 == 0) ? 0.0 : u(gen);
    cfg.trace_repeats = 1 + gen() % 2;

    std::vector<double> raw(borough_vector_size(K, B));
    for (double& v : raw) v = 0.05 + u(gen);
    for (std::size_t i = B + K * B; i < raw.size(); ++i) raw[i] = std::min(1.0, raw[i]);
    const auto policy = borough_policy_from_vector(raw, K, B);
    const Matrix<std::uint8_t> all(K, B, 1);

    const auto out = simulate_borough_policy(arrivals, capacity, policy, cfg);
    EXPECT_EQ(testing::check_conservation(out, arrivals, cfg.trace_repeats), "");
    EXPECT_EQ(testing::check_no_time_travel(out), "");
    EXPECT_EQ(testing::check_capacity(out, capacity, cfg.trace_repeats, all, true), "");
    if (cfg.fcfs_violation == 0.0) EXPECT_EQ(testing::check_fcfs(out, false), "");
    EXPECT_EQ(out, simulate_borough_policy(arrivals, capacity, policy, cfg));

    std::vector<double> city_raw(K * B);
    for (double& v : city_raw) v = 0.05 + u(gen);
    Matrix<double> target(K, B);
    for (double& t : target.flat()) t = u(gen);
    const auto city = CityBudgetPolicy::from_parts(city_gps_from_vector(city_raw, K, B), target);
    const auto cout = simulate_city_policy(arrivals, capacity, city, cfg);
    EXPECT_EQ(testing::check_conservation(cout, arrivals, cfg.trace_repeats), "");
    EXPECT_EQ(testing::check_no_time_travel(cout), "");
    EXPECT_EQ(testing::check_capacity(cout, capacity, cfg.trace_repeats, all, false), "");
    if (cfg.fcfs_violation == 0.0) EXPECT_EQ(testing::check_fcfs(cout, true), "");
    EXPECT_EQ(cout, simulate_city_policy(arrivals, capacity, city, cfg));
}

INSTANTIATE_TEST_SUITE_P(Random, SimulatorFuzz, ::testing::Range<std::uint64_t>(1, 101));

TEST(BoroughSimulator, BudgetSharesFollowBudgetFractions) {
    // Every borough always has more backlog than the whole day's capacity,
    // so the split is a plain multinomial.
    const std::size_t T = 20000;
    const std::int64_t I = 4;
    const auto arrivals = ArrivalTrace::from_counts(names("k", 1), names("b", 3), T,
                                                    std::vector<std::int64_t>(T * 3, I));
    const auto policy = BoroughBudgetPolicy::from_parts({0.5, 0.3, 0.2}, Matrix<double>(1, 3, 1.0),
                                                        Matrix<double>(1, 3, 0.0));
    SimulationConfig cfg;
    cfg.review_period = 1;
    cfg.seed = 77;
    const auto out = simulate_borough_policy(arrivals, CapacityTrace(std::vector<std::int64_t>(T, I)),
                                             policy, cfg);
    const auto ins = out.count(Fate::Inspected);
    const double n = static_cast<double>(T * I);
    for (std::size_t b = 0; b < 3; ++b) {
        const double c = policy.budget_frac()[b];
        EXPECT_NEAR(static_cast<double>(ins(0, b)), n * c, 4.0 * std::sqrt(n * c * (1 - c)));
    }
}

}  // namespace
}  // namespace slaforge
