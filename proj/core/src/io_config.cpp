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

#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "slaforge/error.hpp"
#include "slaforge/io.hpp"

namespace slaforge::io {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorKind::InvalidConfig, msg); }

template <typename T>
T convert(const std::string& section, const std::string& key, const std::string& value) {
    std::istringstream in(value);
    T out{};
    in >> out;
    if (!in || !(in >> std::ws).eof()) invalid(section + "." + key + ": cannot parse '" + value + "'");
    return out;
}

std::size_t to_count(const std::string& section, const std::string& key, const std::string& value) {
    const auto v = convert<long long>(section, key, value);
    if (v < 0) invalid(section + "." + key + " must be non-negative");
    return static_cast<std::size_t>(v);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    for (auto& field : split_csv_line(value)) {
        auto b = field.find_first_not_of(" \t");
        auto e = field.find_last_not_of(" \t");
        if (b == std::string::npos) invalid("empty name in list '" + value + "'");
        out.push_back(field.substr(b, e - b + 1));
    }
    return out;
}

std::string join_list(const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(names[i]);
    }
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;
using SectionTable = std::map<std::string, Setter>;

const std::map<std::string, SectionTable>& schema() {
    static const std::map<std::string, SectionTable> kSchema{
        {"simulation",
         {{"review_period",
           [](RunConfig& c, const std::string& v) {
               c.simulation.review_period = convert<std::int64_t>("simulation", "review_period", v);
           }},
          {"fcfs_violation",
           [](RunConfig& c, const std::string& v) {
               c.simulation.fcfs_violation = convert<double>("simulation", "fcfs_violation", v);
           }},
          {"trace_repeats",
           [](RunConfig& c, const std::string& v) {
               c.simulation.trace_repeats = to_count("simulation", "trace_repeats", v);
           }},
          {"seed",
           [](RunConfig& c, const std::string& v) {
               c.simulation.seed = convert<std::uint64_t>("simulation", "seed", v);
               c.search.seed = c.simulation.seed;
           }}}},
        {"metrics",
         {{"sla_percentile",
           [](RunConfig& c, const std::string& v) {
               c.sla_percentile = convert<double>("metrics", "sla_percentile", v);
           }},
          {"drop_cost",
           [](RunConfig& c, const std::string& v) {
               c.drop_cost = convert<double>("metrics", "drop_cost", v);
           }},
          {"equity",
           [](RunConfig& c, const std::string& v) {
               if (v == "range") {
                   c.equity = EquityKind::Range;
               } else if (v == "max_cost") {
                   c.equity = EquityKind::MaxCost;
               } else {
                   invalid("metrics.equity must be range or max_cost");
               }
           }}}},
        {"search",
         {{"class",
           [](RunConfig& c, const std::string& v) {
               if (v == "borough") {
                   c.search.policy_class = PolicyClass::BoroughBudget;
               } else if (v == "city") {
                   c.search.policy_class = PolicyClass::CityBudget;
               } else {
                   invalid("search.class must be borough or city");
               }
           }},
          {"batch_size",
           [](RunConfig& c, const std::string& v) {
               c.search.batch_size = to_count("search", "batch_size", v);
           }},
          {"iterations",
           [](RunConfig& c, const std::string& v) {
               c.search.iterations = to_count("search", "iterations", v);
           }},
          {"seeds_per_policy",
           [](RunConfig& c, const std::string& v) {
               c.search.seeds_per_policy = to_count("search", "seeds_per_policy", v);
           }},
          {"sampler",
           [](RunConfig& c, const std::string& v) {
               if (v == "sobol") {
                   c.search.sampler = Sampler::SobolRandom;
               } else if (v == "evolutionary") {
                   c.search.sampler = Sampler::Evolutionary;
               } else {
                   invalid("search.sampler must be sobol or evolutionary");
               }
           }},
          {"mutation_sigma",
           [](RunConfig& c, const std::string& v) {
               c.search.mutation_sigma = convert<double>("search", "mutation_sigma", v);
           }},
          {"threads",
           [](RunConfig& c, const std::string& v) {
               c.search.threads = to_count("search", "threads", v);
           }}}},
        {"data",
         {{"align",
           [](RunConfig& c, const std::string& v) {
               if (v == "intersect") {
                   c.align = AlignMode::Intersect;
               } else if (v == "pad_zero") {
                   c.align = AlignMode::PadZero;
               } else {
                   invalid("data.align must be intersect or pad_zero");
               }
           }},
          {"categories",
           [](RunConfig& c, const std::string& v) { c.order.categories = split_list(v); }},
          {"boroughs",
           [](RunConfig& c, const std::string& v) { c.order.boroughs = split_list(v); }}}},
        {"instance",
         {{"budget",
           [](RunConfig& c, const std::string& v) { c.budget = convert<double>("instance", "budget", v); }},
          {"alpha",
           [](RunConfig& c, const std::string& v) { c.alpha = convert<double>("instance", "alpha", v); }}}},
    };
    return kSchema;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        invalid("line " + std::to_string(e.line()) + ": " + e.message());
    }

    RunConfig cfg;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            invalid("key '" + section + "' outside any section");
        }
        if (section == "risk") {
            for (const auto& [category, value] : body) {
                cfg.risk_levels[category] = convert<double>("risk", category, value.data());
            }
            continue;
        }
        const auto table = schema().find(section);
        if (table == schema().end()) invalid("unknown section [" + section + "]");
        for (const auto& [key, value] : body) {
            const auto setter = table->second.find(key);
            if (setter == table->second.end()) invalid("unknown key " + section + "." + key);
            setter->second(cfg, value.data());
        }
    }
    cfg.source_text = text;
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

nlohmann::json config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["simulation"] = {{"review_period", c.simulation.review_period},
                       {"fcfs_violation", c.simulation.fcfs_violation},
                       {"trace_repeats", c.simulation.trace_repeats},
                       {"seed", c.simulation.seed}};
    j["metrics"] = {{"sla_percentile", c.sla_percentile},
                    {"drop_cost", c.drop_cost},
                    {"equity", c.equity == EquityKind::Range ? "range" : "max_cost"}};
    j["search"] = {
        {"class", c.search.policy_class == PolicyClass::BoroughBudget ? "borough" : "city"},
        {"batch_size", c.search.batch_size},
        {"iterations", c.search.iterations},
        {"seeds_per_policy", c.search.seeds_per_policy},
        {"sampler", c.search.sampler == Sampler::SobolRandom ? "sobol" : "evolutionary"},
        {"mutation_sigma", c.search.mutation_sigma},
        {"seed", c.search.seed},
        {"threads", c.search.threads}};
    j["data"] = {{"align", c.align == AlignMode::Intersect ? "intersect" : "pad_zero"},
                 {"categories", join_list(c.order.categories)},
                 {"boroughs", join_list(c.order.boroughs)}};
    j["risk"] = nlohmann::json::object();
    for (const auto& [k, v] : c.risk_levels) j["risk"][k] = v;
    j["instance"] = nlohmann::json::object();
    if (c.budget) j["instance"]["budget"] = *c.budget;
    if (c.alpha) j["instance"]["alpha"] = *c.alpha;
    return j;
}

Matrix<double> resolve_risk(const RunConfig& config, const std::vector<std::string>& categories,
                            const std::vector<std::string>& boroughs,
                            const Matrix<std::optional<double>>& mean_risk) {
    const bool have_mean = mean_risk.same_shape(categories.size(), boroughs.size());
    Matrix<double> risk(categories.size(), boroughs.size(), 1.0);
    for (std::size_t k = 0; k < categories.size(); ++k) {
        std::optional<double> level;
        if (auto it = config.risk_levels.find(categories[k]); it != config.risk_levels.end()) {
            level = it->second;
        } else {
            level = default_risk_level(categories[k]);
        }
        for (std::size_t b = 0; b < boroughs.size(); ++b) {
            if (level) {
                risk(k, b) = *level;
            } else if (have_mean && mean_risk(k, b)) {
                risk(k, b) = *mean_risk(k, b);
            }
        }
    }
    return risk;
}

MetricsConfig metrics_config(const RunConfig& config, Matrix<double> risk) {
    MetricsConfig m;
    m.sla_percentile = config.sla_percentile;
    m.drop_cost = config.drop_cost;
    m.equity = config.equity;
    m.risk = std::move(risk);
    return m;
}

}  // namespace slaforge::io
