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

#include <cmath>
#include <cstdio>
#include <fstream>

#include "slaforge/error.hpp"
#include "slaforge/io.hpp"

namespace slaforge::io {

namespace {

using nlohmann::json;

// Non-finite values have no JSON spelling; they become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json optional_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

template <typename T, typename F>
json named_matrix(const Matrix<T>& m, const std::vector<std::string>& categories,
                  const std::vector<std::string>& boroughs, F&& cell) {
    json out = json::object();
    for (std::size_t k = 0; k < m.rows(); ++k) {
        json row = json::object();
        for (std::size_t b = 0; b < m.cols(); ++b) row[boroughs[b]] = cell(m(k, b));
        out[categories[k]] = std::move(row);
    }
    return out;
}

json plain(const Matrix<double>& m, const std::vector<std::string>& categories,
           const std::vector<std::string>& boroughs) {
    return named_matrix(m, categories, boroughs, [](double v) { return number(v); });
}

json per_borough(const std::vector<double>& v, const std::vector<std::string>& boroughs) {
    json out = json::object();
    for (std::size_t b = 0; b < v.size(); ++b) out[boroughs[b]] = number(v[b]);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string policy_id(std::size_t i) { return "p" + std::to_string(i); }

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

void check(const std::ofstream& out, const std::filesystem::path& path) {
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace

json to_json(const Policy& policy, const std::vector<std::string>& categories,
             const std::vector<std::string>& boroughs) {
    json j;
    if (const auto* p = std::get_if<BoroughBudgetPolicy>(&policy)) {
        j["class"] = "borough";
        j["budget"] = per_borough(p->budget_frac(), boroughs);
        j["gps"] = plain(p->gps(), categories, boroughs);
        j["target"] = plain(p->target_frac(), categories, boroughs);
    } else {
        const auto& c = std::get<CityBudgetPolicy>(policy);
        j["class"] = "city";
        j["gps"] = plain(c.gps(), categories, boroughs);
        j["target"] = plain(c.target_frac(), categories, boroughs);
    }
    return j;
}

json to_json(const PolicyMetrics& m, const std::vector<std::string>& categories,
             const std::vector<std::string>& boroughs) {
    return {{"g", number(m.g)},
            {"f", number(m.f)},
            {"borough_cost", per_borough(m.borough_cost, boroughs)},
            {"z_hat", named_matrix(m.z_hat, categories, boroughs, optional_number)},
            {"p_hat", named_matrix(m.p_hat, categories, boroughs, optional_number)}};
}

json to_json(const StylizedSolution& s, const ProblemInstance& inst) {
    const auto& cats = inst.categories();
    const auto& bors = inst.boroughs();
    return {{"g", number(s.g)},
            {"f", number(s.f)},
            {"budgets", per_borough(s.budgets, bors)},
            {"borough_cost", per_borough(s.borough_cost, bors)},
            {"z", plain(s.z, cats, bors)},
            {"phi", plain(s.phi, cats, bors)},
            {"x", plain(s.x, cats, bors)}};
}

json report_to_json(const RunReport& r) {
    json j;
    j["run_id"] = r.run_id;
    j["config_echo"] = r.config_echo;
    j["effective_config"] = r.effective;
    j["categories"] = r.categories;
    j["boroughs"] = r.boroughs;
    j["results"] = r.body;
    if (r.front) {
        json entries = json::array();
        for (std::size_t i = 0; i < r.front->entries.size(); ++i) {
            const auto& e = r.front->entries[i];
            entries.push_back({{"policy_id", policy_id(i)},
                               {"g", number(e.objectives.g)},
                               {"f", number(e.objectives.f)},
                               {"iteration", e.iteration},
                               {"seed_averaged", e.seed_averaged},
                               {"raw", e.raw},
                               {"policy", to_json(e.policy, r.categories, r.boroughs)}});
        }
        j["pareto_front"] = {{"reference", {{"g", number(r.front->reference.g)},
                                            {"f", number(r.front->reference.f)}}},
                             {"entries", std::move(entries)}};
        j["hypervolume_history"] = r.hypervolume_history;
    }
    return j;
}

void emit_report(const RunReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create " + out_dir.string() + ": " + ec.message());

    {
        const auto path = out_dir / "report.json";
        auto out = open_out(path);
        out << report_to_json(report).dump(2) << '\n';
        check(out, path);
    }
    if (!report.front) return;

    {
        const auto path = out_dir / "pareto.csv";
        auto out = open_out(path);
        out << "policy_id,g,f\n";
        for (std::size_t i = 0; i < report.front->entries.size(); ++i) {
            const auto& o = report.front->entries[i].objectives;
            out << policy_id(i) << ',' << format_double(o.g) << ',' << format_double(o.f) << '\n';
        }
        check(out, path);
    }
    {
        std::vector<std::pair<std::string, Policy>> policies;
        for (std::size_t i = 0; i < report.front->entries.size(); ++i)
            policies.emplace_back(policy_id(i), report.front->entries[i].policy);
        write_policies_csv(out_dir / "front_policies.csv", policies, report.categories,
                           report.boroughs);
    }
    {
        const auto path = out_dir / "hypervolume.csv";
        auto out = open_out(path);
        out << "iteration,hv\n";
        for (std::size_t i = 0; i < report.hypervolume_history.size(); ++i)
            out << i << ',' << format_double(report.hypervolume_history[i]) << '\n';
        check(out, path);
    }
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace slaforge::io
