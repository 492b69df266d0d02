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

#include "slaforge/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include <boost/random/sobol.hpp>

#include "slaforge/error.hpp"
#include "slaforge/random.hpp"

namespace slaforge {

PolicyClass policy_class_of(const Policy& policy) {
    return std::holds_alternative<BoroughBudgetPolicy>(policy) ? PolicyClass::BoroughBudget
                                                                : PolicyClass::CityBudget;
}

SimulationOutcome simulate_policy(const Policy& policy, const ArrivalTrace& arrivals,
                                  const CapacityTrace& capacity, const SimulationConfig& config) {
    if (const auto* p = std::get_if<BoroughBudgetPolicy>(&policy)) {
        return simulate_borough_policy(arrivals, capacity, *p, config);
    }
    return simulate_city_policy(arrivals, capacity, std::get<CityBudgetPolicy>(policy), config);
}

Policy uniform_policy(PolicyClass cls, const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                      double target) {
    const std::size_t K = arrivals.n_categories();
    const std::size_t B = arrivals.n_boroughs();
    if (cls == PolicyClass::BoroughBudget) {
        return BoroughBudgetPolicy::from_parts(std::vector<double>(B, 1.0),
                                               Matrix<double>(K, B, 1.0),
                                               Matrix<double>(K, B, target));
    }
    std::vector<double> raw(K * B, 1.0);
    return policy_from_vector(cls, raw, arrivals, capacity);
}

std::size_t search_dimension(PolicyClass cls, std::size_t n_categories, std::size_t n_boroughs) {
    return cls == PolicyClass::BoroughBudget ? borough_vector_size(n_categories, n_boroughs)
                                             : n_categories * n_boroughs;
}

Policy policy_from_vector(PolicyClass cls, std::span<const double> raw,
                          const ArrivalTrace& arrivals, const CapacityTrace& capacity) {
    const std::size_t K = arrivals.n_categories();
    const std::size_t B = arrivals.n_boroughs();
    if (cls == PolicyClass::BoroughBudget) return borough_policy_from_vector(raw, K, B);

    if (raw.size() != K * B) {
        throw Error(ErrorKind::DimensionMismatch, "raw city policy vector has wrong length");
    }
    std::vector<double> masked(raw.begin(), raw.end());
    for (std::size_t b = 0; b < B; ++b)
        for (std::size_t k = 0; k < K; ++k)
            if (arrivals.total(k, b) == 0) masked[b * K + k] = 0.0;
    return make_city_policy(city_gps_from_vector(masked, K, B), arrivals, capacity);
}

bool dominates(const Objectives& a, const Objectives& b) {
    return a.g <= b.g && a.f <= b.f && (a.g < b.g || a.f < b.f);
}

std::uint64_t replicate_seed(std::uint64_t base_seed, std::size_t replicate) {
    return splitmix64(base_seed + static_cast<std::uint64_t>(replicate));
}

std::vector<EvaluationResult> evaluate_policy_batch(std::span<const Policy> policies,
                                                    const ArrivalTrace& arrivals,
                                                    const CapacityTrace& capacity,
                                                    const SimulationConfig& sim_config,
                                                    const MetricsConfig& metrics_config,
                                                    std::size_t seeds_per_policy,
                                                    std::size_t threads) {
    if (seeds_per_policy < 1) throw Error(ErrorKind::InvalidConfig, "seeds_per_policy must be >= 1");
    sim_config.validate();
    metrics_config.validate(arrivals.n_categories(), arrivals.n_boroughs());

    std::vector<EvaluationResult> results(policies.size());
    auto evaluate_one = [&](std::size_t i) {
        try {
            Objectives sum;
            for (std::size_t r = 0; r < seeds_per_policy; ++r) {
                SimulationConfig cfg = sim_config;
                cfg.seed = replicate_seed(sim_config.seed, r);
                const auto metrics = compute_losses(
                    simulate_policy(policies[i], arrivals, capacity, cfg), metrics_config);
                sum.g += metrics.g;
                sum.f += metrics.f;
            }
            const auto n = static_cast<double>(seeds_per_policy);
            results[i].value = Objectives{sum.g / n, sum.f / n};
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    };

    std::size_t workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = std::min(workers, policies.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < policies.size(); ++i) evaluate_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < policies.size(); i = next++) evaluate_one(i);
            });
        }
    }
    return results;
}

std::vector<std::size_t> pareto_filter(std::span<const Objectives> points) {
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return points[a].g < points[b].g || (points[a].g == points[b].g && points[a].f < points[b].f);
    });

    // Sweep by increasing g; a point survives if its f is below every f
    // seen at strictly smaller g, or it duplicates the current best.
    std::vector<std::size_t> keep;
    double best_f = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < order.size()) {
        const double g = points[order[i]].g;
        const double f_min = points[order[i]].f;  // smallest f at this g
        std::size_t j = i;
        for (; j < order.size() && points[order[j]].g == g; ++j) {
            if (points[order[j]].f == f_min && f_min < best_f) keep.push_back(order[j]);
        }
        best_f = std::min(best_f, f_min);
        i = j;
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

double hypervolume(std::span<const Objectives> points, const Objectives& reference) {
    for (const auto& p : points) {
        if (p.g > reference.g || p.f > reference.f || !std::isfinite(p.g) || !std::isfinite(p.f)) {
            throw Error(ErrorKind::PointOutsideReference,
                        "point (" + std::to_string(p.g) + ", " + std::to_string(p.f) +
                            ") lies outside the reference box");
        }
    }
    std::vector<Objectives> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const Objectives& a, const Objectives& b) {
        return a.g < b.g || (a.g == b.g && a.f < b.f);
    });
    double area = 0.0;
    double ceiling = reference.f;
    for (const auto& p : sorted) {
        if (p.f < ceiling) {
            area += (reference.g - p.g) * (ceiling - p.f);
            ceiling = p.f;
        }
    }
    return area;
}

std::vector<Objectives> ParetoFront::objectives() const {
    std::vector<Objectives> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.objectives);
    return out;
}

std::size_t ParetoFront::most_efficient() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto& a = entries[i].objectives;
        const auto& b = entries[best].objectives;
        if (a.g < b.g || (a.g == b.g && a.f < b.f)) best = i;
    }
    return best;
}

std::size_t ParetoFront::most_equitable() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const auto& a = entries[i].objectives;
        const auto& b = entries[best].objectives;
        if (a.f < b.f || (a.f == b.f && a.g < b.g)) best = i;
    }
    return best;
}

void SearchConfig::validate() const {
    if (batch_size < 1) throw Error(ErrorKind::InvalidConfig, "batch_size must be >= 1");
    if (iterations < 1) throw Error(ErrorKind::InvalidConfig, "iterations must be >= 1");
    if (seeds_per_policy < 1) throw Error(ErrorKind::InvalidConfig, "seeds_per_policy must be >= 1");
    if (!(mutation_sigma >= 0.0)) throw Error(ErrorKind::InvalidConfig, "mutation_sigma must be >= 0");
}

namespace {

// Scrambled Sobol points in [0,1)^d: a Cranley-Patterson rotation by a
// seeded uniform shift keeps the low-discrepancy structure.
class ShiftedSobol {
public:
    ShiftedSobol(std::size_t dim, Rng& rng) : sobol_(static_cast<unsigned>(dim)), shift_(dim) {
        for (double& s : shift_) s = rng.uniform();
    }

    std::vector<double> next() {
        std::vector<double> x(shift_.size());
        for (std::size_t d = 0; d < x.size(); ++d) {
            const double u = static_cast<double>(sobol_()) * 0x1.0p-64;
            x[d] = u + shift_[d];
            if (x[d] >= 1.0) x[d] -= 1.0;
        }
        return x;
    }

private:
    boost::random::sobol sobol_;
    std::vector<double> shift_;
};

std::vector<double> mutate(const std::vector<ParetoEntry>& front, double sigma, Rng& rng) {
    const auto& a = front[rng.below(front.size())].raw;
    std::vector<double> child = a;
    if (front.size() > 1 && rng.uniform() < 0.5) {
        const auto& b = front[rng.below(front.size())].raw;
        for (std::size_t d = 0; d < child.size(); ++d) {
            if (rng.uniform() < 0.5) child[d] = b[d];
        }
    }
    for (double& v : child) v = std::clamp(v + sigma * rng.normal(), 0.0, 1.0);
    return child;
}

Objectives reference_from(const std::vector<Objectives>& batch) {
    Objectives ref{0.0, 0.0};
    for (const auto& o : batch) {
        ref.g = std::max(ref.g, o.g);
        ref.f = std::max(ref.f, o.f);
    }
    ref.g = ref.g > 0.0 ? 1.1 * ref.g : 1.0;
    ref.f = ref.f > 0.0 ? 1.1 * ref.f : 1.0;
    return ref;
}

double front_hypervolume(const std::vector<ParetoEntry>& front, const Objectives& ref) {
    std::vector<Objectives> inside;
    for (const auto& e : front) {
        if (e.objectives.g <= ref.g && e.objectives.f <= ref.f) inside.push_back(e.objectives);
    }
    return hypervolume(inside, ref);
}

}  // namespace

SearchResult run_search(const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                        const SimulationConfig& sim_config, const MetricsConfig& metrics_config,
                        const SearchConfig& search_config) {
    search_config.validate();
    sim_config.validate();
    metrics_config.validate(arrivals.n_categories(), arrivals.n_boroughs());

    const PolicyClass cls = search_config.policy_class;
    const std::size_t dim = search_dimension(cls, arrivals.n_categories(), arrivals.n_boroughs());
    Rng rng(search_config.seed);
    ShiftedSobol sobol(dim, rng);

    SearchResult result;
    bool have_reference = false;
    for (std::size_t iter = 0; iter < search_config.iterations; ++iter) {
        std::vector<std::vector<double>> raws;
        std::vector<Policy> policies;
        std::vector<std::size_t> source;  // raw index of each mapped policy
        const bool explore = result.front.entries.empty() ||
                             search_config.sampler == Sampler::SobolRandom;
        for (std::size_t i = 0; i < search_config.batch_size; ++i) {
            raws.push_back(explore ? sobol.next()
                                   : mutate(result.front.entries, search_config.mutation_sigma, rng));
            try {
                policies.push_back(policy_from_vector(cls, raws.back(), arrivals, capacity));
                source.push_back(i);
            } catch (const Error&) {
                ++result.failed;
            }
        }

        const auto evals = evaluate_policy_batch(policies, arrivals, capacity, sim_config,
                                                 metrics_config, search_config.seeds_per_policy,
                                                 search_config.threads);
        std::vector<ParetoEntry> candidates = std::move(result.front.entries);
        std::vector<Objectives> batch_values;
        for (std::size_t i = 0; i < evals.size(); ++i) {
            ++result.evaluated;
            if (!evals[i].value) {
                ++result.failed;
                continue;
            }
            batch_values.push_back(*evals[i].value);
            candidates.push_back(ParetoEntry{policies[i], raws[source[i]], *evals[i].value,
                                             search_config.seeds_per_policy > 1, iter});
        }
        if (!have_reference && !batch_values.empty()) {
            result.front.reference = reference_from(batch_values);
            have_reference = true;
        }

        std::vector<Objectives> values;
        values.reserve(candidates.size());
        for (const auto& c : candidates) values.push_back(c.objectives);
        std::vector<ParetoEntry> front;
        for (std::size_t i : pareto_filter(values)) front.push_back(std::move(candidates[i]));
        std::stable_sort(front.begin(), front.end(), [](const ParetoEntry& a, const ParetoEntry& b) {
            return a.objectives.g < b.objectives.g ||
                   (a.objectives.g == b.objectives.g && a.objectives.f < b.objectives.f);
        });
        result.front.entries = std::move(front);
        result.hypervolume_history.push_back(
            have_reference ? front_hypervolume(result.front.entries, result.front.reference) : 0.0);
    }

    if (result.front.entries.empty()) {
        throw Error(ErrorKind::NoFeasiblePolicy, "every proposed policy failed to evaluate");
    }
    return result;
}

OutOfSampleReport out_of_sample(const ParetoFront& front, const Policy& baseline,
                                const ArrivalTrace& arrivals, const CapacityTrace& capacity,
                                const SimulationConfig& sim_config,
                                const MetricsConfig& metrics_config,
                                std::size_t seeds_per_policy, std::size_t threads) {
    std::vector<Policy> policies;
    policies.reserve(front.entries.size() + 1);
    for (const auto& e : front.entries) policies.push_back(e.policy);
    policies.push_back(baseline);

    auto evals = evaluate_policy_batch(policies, arrivals, capacity, sim_config, metrics_config,
                                       seeds_per_policy, threads);
    OutOfSampleReport rep;
    rep.baseline = std::move(evals.back());
    evals.pop_back();
    rep.policies = std::move(evals);

    for (const auto& e : rep.policies) {
        std::optional<Objectives> ratio;
        if (e.value && rep.baseline.value && rep.baseline.value->g != 0.0 &&
            rep.baseline.value->f != 0.0) {
            ratio = Objectives{e.value->g / rep.baseline.value->g, e.value->f / rep.baseline.value->f};
        }
        rep.relative.push_back(ratio);
    }
    for (std::size_t i = 0; i < rep.policies.size(); ++i) {
        const auto& v = rep.policies[i].value;
        if (!v) continue;
        if (!rep.most_efficient || v->g < rep.policies[*rep.most_efficient].value->g) {
            rep.most_efficient = i;
        }
        if (!rep.most_equitable || v->f < rep.policies[*rep.most_equitable].value->f) {
            rep.most_equitable = i;
        }
    }
    return rep;
}

}  // namespace slaforge
