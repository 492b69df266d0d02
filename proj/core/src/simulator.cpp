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

#include "slaforge/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "slaforge/error.hpp"
#include "slaforge/random.hpp"

namespace slaforge {

void SimulationConfig::validate() const {
    if (review_period < 1) {
        throw Error(ErrorKind::InvalidConfig, "review period must be >= 1 day");
    }
    if (!(fcfs_violation >= 0.0 && fcfs_violation <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "FCFS violation must lie in [0,1]");
    }
    if (trace_repeats < 1) throw Error(ErrorKind::InvalidConfig, "trace_repeats must be >= 1");
}

Matrix<std::int64_t> SimulationOutcome::arrivals() const {
    Matrix<std::int64_t> m(n_categories(), n_boroughs(), 0);
    for (const auto& inc : incidents) ++m(inc.category, inc.borough);
    return m;
}

Matrix<std::int64_t> SimulationOutcome::count(Fate fate) const {
    Matrix<std::int64_t> m(n_categories(), n_boroughs(), 0);
    for (const auto& inc : incidents) {
        if (inc.fate == fate) ++m(inc.category, inc.borough);
    }
    return m;
}

std::vector<std::int64_t> SimulationOutcome::daily_inspections() const {
    std::vector<std::int64_t> d(horizon, 0);
    for (const auto& inc : incidents) {
        if (inc.fate == Fate::Inspected) ++d[static_cast<std::size_t>(inc.fate_day)];
    }
    return d;
}

namespace {

// FIFO of incident ids supporting removal from anywhere inside a prefix.
class IncidentQueue {
public:
    std::size_t size() const { return ids_.size() - head_; }
    void push(std::uint32_t id) { ids_.push_back(id); }
    std::uint32_t at(std::size_t i) const { return ids_[head_ + i]; }

    // Removes the flagged entries among the first flags.size() ones,
    // keeping the rest in order.
    void remove_in_prefix(const std::vector<char>& flags) {
        std::size_t write = head_ + flags.size();
        for (std::size_t i = flags.size(); i-- > 0;) {
            if (!flags[i]) ids_[--write] = ids_[head_ + i];
        }
        head_ = write;
        if (head_ > 1024 && head_ * 2 > ids_.size()) {
            ids_.erase(ids_.begin(), ids_.begin() + static_cast<std::ptrdiff_t>(head_));
            head_ = 0;
        }
    }

private:
    std::vector<std::uint32_t> ids_;
    std::size_t head_ = 0;
};

std::int64_t window_size(double rho, std::int64_t backlog, std::int64_t take) {
    // ceil of rho * (B - I), guarded against representation error (0.3 * 10).
    const double extra = std::ceil(rho * static_cast<double>(backlog - take) - 1e-9);
    return std::min(backlog, take + std::max<std::int64_t>(0, static_cast<std::int64_t>(extra)));
}

// Shared day loop; the policy classes differ in admission, capacity
// allocation and review-period drops.
class Simulation {
public:
    Simulation(const ArrivalTrace& arrivals, const CapacityTrace& capacity,
               const SimulationConfig& config, std::size_t K, std::size_t B)
        : arrivals_(arrivals.repeated(config.trace_repeats)),
          capacity_(capacity.repeated(config.trace_repeats)),
          config_(config),
          rng_(config.seed),
          K_(K),
          B_(B),
          queues_(K * B) {
        config.validate();
        if (arrivals.horizon() != capacity.horizon()) {
            throw Error(ErrorKind::TraceMisaligned,
                        "arrival horizon " + std::to_string(arrivals.horizon()) +
                            " != capacity horizon " + std::to_string(capacity.horizon()));
        }
        if (arrivals.n_categories() != K || arrivals.n_boroughs() != B) {
            throw Error(ErrorKind::DimensionMismatch,
                        "policy shape does not match the arrival trace");
        }
        out_.categories = arrivals.categories();
        out_.boroughs = arrivals.boroughs();
        out_.regions = arrivals.regions();
        out_.horizon = arrivals_.horizon();
        out_.incidents.reserve(static_cast<std::size_t>(arrivals_.total_incidents()));
    }

    template <typename Admit, typename Allocate, typename Review>
    SimulationOutcome run(Admit&& admit, Allocate&& allocate, Review&& review) {
        Matrix<std::int64_t> alloc(K_, B_, 0);
        std::size_t next_record = 0;
        const auto& records = arrivals_.records();
        for (std::size_t day = 0; day < arrivals_.horizon(); ++day) {
            const auto d = static_cast<std::int32_t>(day);
            if (arrivals_.has_records()) {
                for (; next_record < records.size() && records[next_record].day == d; ++next_record) {
                    const auto& r = records[next_record];
                    arrive(d, r.category, r.borough, r.region, admit);
                }
            } else {
                for (std::size_t k = 0; k < K_; ++k)
                    for (std::size_t b = 0; b < B_; ++b)
                        for (std::int64_t n = arrivals_.count(day, k, b); n > 0; --n)
                            arrive(d, static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(b),
                                   -1, admit);
            }

            std::fill(alloc.flat().begin(), alloc.flat().end(), 0);
            allocate(capacity_.at(day), alloc);

            for (std::size_t b = 0; b < B_; ++b)
                for (std::size_t k = 0; k < K_; ++k)
                    if (alloc(k, b) > 0) inspect(d, k, b, alloc(k, b));

            review(d);
        }
        return std::move(out_);
    }

    std::int64_t backlog(std::size_t k, std::size_t b) const {
        return static_cast<std::int64_t>(queues_[k * B_ + b].size());
    }

    Rng& rng() { return rng_; }

    // Drops each backlog incident of (k,b) with probability 1 - p.
    void review_queue(std::int32_t day, std::size_t k, std::size_t b, double p) {
        if (p >= 1.0) return;
        IncidentQueue& q = queues_[k * B_ + b];
        std::vector<char> flags(q.size(), 0);
        for (std::size_t i = 0; i < flags.size(); ++i) {
            if (rng_.bernoulli(1.0 - p)) {
                flags[i] = 1;
                auto& inc = out_.incidents[q.at(i)];
                inc.fate = Fate::Dropped;
                inc.fate_day = day;
            }
        }
        q.remove_in_prefix(flags);
    }

private:
    template <typename Admit>
    void arrive(std::int32_t day, std::uint32_t k, std::uint32_t b, std::int32_t region,
                Admit& admit) {
        const auto id = static_cast<std::uint32_t>(out_.incidents.size());
        IncidentOutcome inc;
        inc.category = k;
        inc.borough = b;
        inc.region = region;
        inc.arrival_day = day;
        if (admit(k, b)) {
            queues_[k * B_ + b].push(id);
        } else {
            inc.fate = Fate::Dropped;
            inc.fate_day = day;
        }
        out_.incidents.push_back(inc);
    }

    void inspect(std::int32_t day, std::size_t k, std::size_t b, std::int64_t take) {
        IncidentQueue& q = queues_[k * B_ + b];
        const auto size = static_cast<std::int64_t>(q.size());
        const std::int64_t window = window_size(config_.fcfs_violation, size, take);
        std::vector<char> flags(static_cast<std::size_t>(window), 0);
        // Selection sampling: each position is kept with probability
        // needed / remaining, which yields a uniform subset of size take.
        std::int64_t needed = take;
        for (std::int64_t i = 0; i < window && needed > 0; ++i) {
            const std::int64_t remaining = window - i;
            const bool pick = needed == remaining ||
                              rng_.uniform() * static_cast<double>(remaining) <
                                  static_cast<double>(needed);
            if (pick) {
                flags[static_cast<std::size_t>(i)] = 1;
                --needed;
                auto& inc = out_.incidents[q.at(static_cast<std::size_t>(i))];
                inc.fate = Fate::Inspected;
                inc.fate_day = day;
            }
        }
        q.remove_in_prefix(flags);
    }

    ArrivalTrace arrivals_;
    CapacityTrace capacity_;
    SimulationConfig config_;
    Rng rng_;
    std::size_t K_;
    std::size_t B_;
    std::vector<IncidentQueue> queues_;
    SimulationOutcome out_;
};

}  // namespace

SimulationOutcome simulate_borough_policy(const ArrivalTrace& arrivals,
                                          const CapacityTrace& capacity,
                                          const BoroughBudgetPolicy& policy,
                                          const SimulationConfig& config) {
    const std::size_t K = policy.n_categories();
    const std::size_t B = policy.n_boroughs();
    Simulation sim(arrivals, capacity, config, K, B);
    const Matrix<double>& phi = policy.gps();
    const std::vector<double>& budget = policy.budget_frac();
    const Matrix<double>& target = policy.target_frac();

    std::vector<std::int64_t> remaining(K * B);
    std::vector<double> weights(K);
    std::vector<std::int64_t> draws(K);
    std::vector<double> borough_weights(B);

    // Serves up to n units in borough b from the unallocated backlog;
    // returns the units it could not place.
    auto serve_borough = [&](std::size_t b, std::int64_t n, Matrix<std::int64_t>& alloc) {
        std::span<double> w(weights.data(), K);
        std::span<std::int64_t> cnt(draws.data(), K);
        while (n > 0) {
            bool any = false;
            for (std::size_t k = 0; k < K; ++k) {
                w[k] = remaining[k * B + b] > 0 ? phi(k, b) : 0.0;
                any = any || w[k] > 0.0;
            }
            if (!any) return n;
            multinomial(sim.rng(), n, w, cnt);
            n = 0;
            for (std::size_t k = 0; k < K; ++k) {
                const std::int64_t take = std::min(cnt[k], remaining[k * B + b]);
                alloc(k, b) += take;
                remaining[k * B + b] -= take;
                n += cnt[k] - take;
            }
        }
        return std::int64_t{0};
    };
    auto servable = [&](std::size_t b) {
        for (std::size_t k = 0; k < K; ++k)
            if (remaining[k * B + b] > 0 && phi(k, b) > 0.0) return true;
        return false;
    };

    auto allocate = [&](std::int64_t capacity_today, Matrix<std::int64_t>& alloc) {
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t b = 0; b < B; ++b) remaining[k * B + b] = sim.backlog(k, b);

        std::vector<std::int64_t> per_borough(B);
        multinomial(sim.rng(), capacity_today, budget, per_borough);
        std::int64_t pool = 0;
        for (std::size_t b = 0; b < B; ++b) pool += serve_borough(b, per_borough[b], alloc);

        while (pool > 0) {
            bool any = false;
            for (std::size_t b = 0; b < B; ++b) {
                borough_weights[b] = servable(b) ? budget[b] : 0.0;
                any = any || borough_weights[b] > 0.0;
            }
            if (!any) break;
            multinomial(sim.rng(), pool, borough_weights, per_borough);
            pool = 0;
            for (std::size_t b = 0; b < B; ++b) pool += serve_borough(b, per_borough[b], alloc);
        }
    };

    auto review = [&](std::int32_t day) {
        if ((static_cast<std::int64_t>(day) + 1) % config.review_period != 0) return;
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k) sim.review_queue(day, k, b, target(k, b));
    };

    return sim.run([](std::uint32_t, std::uint32_t) { return true; }, allocate, review);
}

SimulationOutcome simulate_city_policy(const ArrivalTrace& arrivals,
                                       const CapacityTrace& capacity,
                                       const CityBudgetPolicy& policy,
                                       const SimulationConfig& config) {
    const std::size_t K = policy.n_categories();
    const std::size_t B = policy.n_boroughs();
    Simulation sim(arrivals, capacity, config, K, B);
    const Matrix<double>& phi = policy.gps();
    const Matrix<double>& target = policy.target_frac();

    std::vector<std::int64_t> remaining(K * B);
    std::vector<double> weights(K * B);
    std::vector<std::int64_t> draws(K * B);

    auto admit = [&](std::uint32_t k, std::uint32_t b) {
        return sim.rng().bernoulli(target(k, b));
    };

    // Pairs are laid out borough-major so draws follow the canonical
    // borough-then-category order.
    auto allocate = [&](std::int64_t n, Matrix<std::int64_t>& alloc) {
        for (std::size_t b = 0; b < B; ++b)
            for (std::size_t k = 0; k < K; ++k) remaining[b * K + k] = sim.backlog(k, b);
        while (n > 0) {
            bool any = false;
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t k = 0; k < K; ++k) {
                    const std::size_t i = b * K + k;
                    weights[i] = remaining[i] > 0 ? phi(k, b) : 0.0;
                    any = any || weights[i] > 0.0;
                }
            }
            if (!any) return;
            multinomial(sim.rng(), n, weights, draws);
            n = 0;
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t k = 0; k < K; ++k) {
                    const std::size_t i = b * K + k;
                    const std::int64_t take = std::min(draws[i], remaining[i]);
                    alloc(k, b) += take;
                    remaining[i] -= take;
                    n += draws[i] - take;
                }
            }
        }
    };

    return sim.run(admit, allocate, [](std::int32_t) {});
}

Matrix<double> derive_city_inspection_fractions(const Matrix<double>& gps,
                                                const ArrivalTrace& arrivals,
                                                const CapacityTrace& capacity) {
    const std::size_t K = gps.rows();
    const std::size_t B = gps.cols();
    if (arrivals.n_categories() != K || arrivals.n_boroughs() != B) {
        throw Error(ErrorKind::DimensionMismatch, "GPS matrix does not match the arrival trace");
    }
    const double total_capacity = static_cast<double>(capacity.total());
    for (std::size_t k = 0; k < K; ++k) {
        for (std::size_t b = 0; b < B; ++b) {
            if (gps(k, b) > 0.0 && arrivals.total(k, b) == 0) {
                throw Error(ErrorKind::ZeroArrivalPair,
                            "pair (" + arrivals.categories()[k] + ", " + arrivals.boroughs()[b] +
                                ") has GPS weight but no arrivals");
            }
        }
    }

    Matrix<double> p(K, B, 0.0);
    Matrix<std::uint8_t> clamped(K, B, 0);
    for (;;) {
        // Capacity share left after clamped pairs take exactly their demand.
        double free_share = 1.0;
        double free_weight = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t b = 0; b < B; ++b) {
                if (clamped(k, b)) {
                    free_share -= static_cast<double>(arrivals.total(k, b)) / total_capacity;
                } else {
                    free_weight += gps(k, b);
                }
            }
        }
        bool new_clamp = false;
        for (std::size_t k = 0; k < K; ++k) {
            for (std::size_t b = 0; b < B; ++b) {
                if (clamped(k, b)) {
                    p(k, b) = 1.0;
                    continue;
                }
                if (gps(k, b) <= 0.0 || free_weight <= 0.0) {
                    p(k, b) = 0.0;
                    continue;
                }
                const double share = gps(k, b) * free_share / free_weight;
                const double value =
                    share * total_capacity / static_cast<double>(arrivals.total(k, b));
                if (value >= 1.0) {
                    clamped(k, b) = 1;
                    new_clamp = true;
                }
                p(k, b) = std::clamp(value, 0.0, 1.0);
            }
        }
        if (!new_clamp) break;
    }
    return p;
}

CityBudgetPolicy make_city_policy(const Matrix<double>& gps, const ArrivalTrace& arrivals,
                                  const CapacityTrace& capacity) {
    // Normalize first so the derived targets see the weights the simulator uses.
    const Matrix<double> zeros(gps.rows(), gps.cols(), 0.0);
    const Matrix<double> weights = CityBudgetPolicy::from_parts(gps, zeros).gps();
    return CityBudgetPolicy::from_parts(
        weights, derive_city_inspection_fractions(weights, arrivals, capacity));
}

std::pair<ArrivalTrace, CapacityTrace> generate_synthetic_trace(const ProblemInstance& instance,
                                                                std::size_t days,
                                                                double utilization,
                                                                std::uint64_t seed) {
    if (days < 1) throw Error(ErrorKind::InvalidConfig, "synthetic trace needs at least one day");
    if (!(utilization > 0.0 && utilization <= 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "utilization must lie in (0,1]");
    }
    const std::size_t K = instance.n_categories();
    const std::size_t B = instance.n_boroughs();
    Rng rng(seed);
    std::vector<std::int64_t> counts(days * K * B);
    std::vector<std::int64_t> cap(days);
    const double capacity_mean = instance.total_budget() * utilization;
    for (std::size_t d = 0; d < days; ++d) {
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t b = 0; b < B; ++b)
                counts[(d * K + k) * B + b] = rng.poisson(instance.lambda(k, b));
        cap[d] = rng.poisson(capacity_mean);
    }
    return {ArrivalTrace::from_counts(instance.categories(), instance.boroughs(), days,
                                      std::move(counts)),
            CapacityTrace(std::move(cap))};
}

}  // namespace slaforge
