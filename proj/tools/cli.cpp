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

#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "slaforge/error.hpp"
#include "slaforge/io.hpp"
#include "slaforge/metrics.hpp"
#include "slaforge/search.hpp"
#include "slaforge/simulator.hpp"
#include "slaforge/stylized.hpp"

namespace slaforge::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Flags shared by the trace-driven commands; unset optionals leave the
// config file value in place.
struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> review_period;
    std::optional<double> fcfs_violation;
    std::optional<std::size_t> trace_repeats;
    std::optional<double> sla_percentile;
    std::optional<double> drop_cost;
    std::optional<std::string> equity;
    std::optional<std::string> align;
    std::optional<std::size_t> threads;
    std::string out;
};

void add_common(CLI::App& cmd, Common& c) {
    cmd.add_option("--config", c.config, "INI config file")->check(CLI::ExistingFile);
    cmd.add_option("--seed", c.seed, "seed for all randomness");
    cmd.add_option("--review-period", c.review_period, "days between drop reviews");
    cmd.add_option("--fcfs-violation", c.fcfs_violation, "rho in [0,1]");
    cmd.add_option("--trace-repeats", c.trace_repeats, "times the trace is replayed");
    cmd.add_option("--sla-percentile", c.sla_percentile, "delay percentile used as the SLA");
    cmd.add_option("--drop-cost", c.drop_cost, "cost of an uninspected incident, in days");
    cmd.add_option("--equity", c.equity, "range | max_cost")
        ->check(CLI::IsMember({"range", "max_cost"}));
    cmd.add_option("--align", c.align, "intersect | pad_zero")
        ->check(CLI::IsMember({"intersect", "pad_zero"}));
    cmd.add_option("--threads", c.threads, "evaluation threads (0 = all cores)");
    cmd.add_option("--out", c.out, "output directory");
}

io::RunConfig resolve_config(const Common& c) {
    io::RunConfig cfg = c.config.empty() ? io::RunConfig{} : io::load_config(c.config);
    if (c.seed) {
        cfg.simulation.seed = *c.seed;
        cfg.search.seed = *c.seed;
    }
    if (c.review_period) cfg.simulation.review_period = *c.review_period;
    if (c.fcfs_violation) cfg.simulation.fcfs_violation = *c.fcfs_violation;
    if (c.trace_repeats) cfg.simulation.trace_repeats = *c.trace_repeats;
    if (c.sla_percentile) cfg.sla_percentile = *c.sla_percentile;
    if (c.drop_cost) cfg.drop_cost = *c.drop_cost;
    if (c.equity) cfg.equity = *c.equity == "range" ? EquityKind::Range : EquityKind::MaxCost;
    if (c.align) cfg.align = *c.align == "intersect" ? io::AlignMode::Intersect : io::AlignMode::PadZero;
    if (c.threads) cfg.search.threads = *c.threads;
    return cfg;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Run id: hash of the command, the resolved config and every input file.
std::string make_run_id(const std::string& command, const json& effective,
                        const std::vector<std::string>& inputs) {
    std::string material = command + '\n' + effective.dump();
    for (const auto& path : inputs) {
        if (path.empty()) continue;
        material += '\n' + read_file(path);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(io::fnv1a(material)));
    return buf;
}

void finish(const io::RunReport& report, const std::string& out_dir, std::ostream& out) {
    if (out_dir.empty()) {
        out << io::report_to_json(report).dump(2) << '\n';
    } else {
        io::emit_report(report, out_dir);
        out << "run " << report.run_id << " written to " << out_dir << '\n';
    }
}

struct Traces {
    io::AlignedTraces aligned;
    Matrix<double> risk;
};

Traces load_traces(const std::string& arrivals_path, const std::string& capacity_path,
                   const io::RunConfig& cfg) {
    const auto arrivals = io::ingest_arrivals(arrivals_path, cfg.order);
    const auto capacity = io::ingest_capacity(capacity_path);
    auto aligned = io::align_traces(arrivals, capacity, cfg.align);
    auto risk = io::resolve_risk(cfg, aligned.arrivals.categories(), aligned.arrivals.boroughs(),
                                 arrivals.mean_risk);
    return {std::move(aligned), std::move(risk)};
}

json fate_counts(const SimulationOutcome& o) {
    auto total = [](const Matrix<std::int64_t>& m) {
        std::int64_t s = 0;
        for (auto v : m.flat()) s += v;
        return s;
    };
    return {{"inspected", total(o.count(Fate::Inspected))},
            {"dropped", total(o.count(Fate::Dropped))},
            {"backlog", total(o.count(Fate::Backlog))}};
}

json risk_json(const Matrix<double>& risk, const std::vector<std::string>& categories,
               const std::vector<std::string>& boroughs) {
    json j = json::object();
    for (std::size_t k = 0; k < categories.size(); ++k)
        for (std::size_t b = 0; b < boroughs.size(); ++b) j[categories[k]][boroughs[b]] = risk(k, b);
    return j;
}

json objectives_json(const std::optional<Objectives>& o) {
    if (!o) return nullptr;
    return {{"g", o->g}, {"f", o->f}};
}

// ---- solve -----------------------------------------------------------------

struct SolveArgs {
    std::string instance;
    std::string config;
    double gamma = 0.5;
    std::string sweep;
    std::optional<double> budget;
    std::optional<double> alpha;
    std::optional<double> tail_probability;
    std::string out;
};

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw Error(ErrorKind::InvalidConfig, "--sweep expects lo:hi:step");
    double v[3];
    for (int i = 0; i < 3; ++i) {
        try {
            std::size_t used = 0;
            v[i] = std::stod(parts[static_cast<std::size_t>(i)], &used);
            if (used != parts[static_cast<std::size_t>(i)].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidConfig, "--sweep: cannot parse '" + text + "'");
        }
    }
    if (!(v[2] > 0.0) || v[1] < v[0]) {
        throw Error(ErrorKind::InvalidConfig, "--sweep needs lo <= hi and step > 0");
    }
    std::vector<double> out;
    const auto n = static_cast<std::size_t>(std::floor((v[1] - v[0]) / v[2] + 1e-9));
    for (std::size_t i = 0; i <= n; ++i) out.push_back(v[0] + static_cast<double>(i) * v[2]);
    return out;
}

int cmd_solve(const SolveArgs& a, std::ostream& out) {
    io::RunConfig cfg = a.config.empty() ? io::RunConfig{} : io::load_config(a.config);
    if (a.budget) cfg.budget = a.budget;
    if (a.alpha) cfg.alpha = a.alpha;
    if (a.tail_probability) cfg.alpha = tail_param_from_probability(*a.tail_probability);
    if (!cfg.budget) throw Error(ErrorKind::InvalidConfig, "a budget is required (--budget)");
    if (!cfg.alpha) cfg.alpha = tail_param_from_probability(0.05);

    auto table = io::read_instance_csv(a.instance);
    const auto inst = build_instance(table.categories, table.boroughs, table.lambda, table.risk,
                                     *cfg.budget, *cfg.alpha);
    const auto gammas = a.sweep.empty() ? std::vector<double>{a.gamma} : parse_sweep(a.sweep);

    json solutions = json::array();
    for (double gamma : gammas) {
        const auto sol = solve_weighted(inst, WeightedObjectiveConfig{gamma});
        const auto res = verify_solution(inst, sol);
        solutions.push_back({{"gamma", gamma},
                             {"objective", weighted_objective(sol, gamma)},
                             {"solution", io::to_json(sol, inst)},
                             {"max_residual", res.max_violation()}});
    }
    json body;
    body["instance"] = {{"budget", inst.total_budget()},
                        {"alpha", inst.tail_param()},
                        {"slack", inst.slack()}};
    body["solutions"] = std::move(solutions);
    body["most_efficient"] = io::to_json(solve_extreme_efficiency(inst), inst);
    body["most_equitable"] = io::to_json(solve_extreme_equity(inst), inst);
    if (inst.n_categories() == 1 && inst.n_boroughs() == 2) {
        body["price_of_equity"] = price_of_equity(inst);
        body["price_of_efficiency"] = price_of_efficiency(inst);
    }

    io::RunReport report;
    report.config_echo = cfg.source_text;
    report.effective = io::config_to_json(cfg);
    report.effective["solve"] = {{"gammas", gammas}};
    report.run_id = make_run_id("solve", report.effective, {a.instance});
    report.categories = inst.categories();
    report.boroughs = inst.boroughs();
    report.body = std::move(body);
    finish(report, a.out, out);
    return kExitOk;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    Common common;
    std::string arrivals;
    std::string capacity;
    std::string policy;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    const auto cfg = resolve_config(a.common);
    const auto traces = load_traces(a.arrivals, a.capacity, cfg);
    const auto& arr = traces.aligned.arrivals;
    const auto& cap = traces.aligned.capacity;
    const auto mcfg = io::metrics_config(cfg, traces.risk);
    const auto policies = io::read_policies_csv(a.policy, arr.categories(), arr.boroughs());

    json rows = json::array();
    for (const auto& [id, policy] : policies) {
        const auto outcome = simulate_policy(policy, arr, cap, cfg.simulation);
        const auto metrics = compute_losses(outcome, mcfg);
        json row{{"policy_id", id},
                 {"policy", io::to_json(policy, arr.categories(), arr.boroughs())},
                 {"metrics", io::to_json(metrics, arr.categories(), arr.boroughs())},
                 {"fates", fate_counts(outcome)}};
        if (!arr.regions().empty()) row["region_cost"] = group_costs(outcome, GroupKey::Region, mcfg);
        rows.push_back(std::move(row));
    }

    io::RunReport report;
    report.config_echo = cfg.source_text;
    report.effective = io::config_to_json(cfg);
    report.run_id = make_run_id("simulate", report.effective, {a.arrivals, a.capacity, a.policy});
    report.categories = arr.categories();
    report.boroughs = arr.boroughs();
    report.body = {{"start", io::format_date(traces.aligned.start)},
                   {"horizon", arr.horizon()},
                   {"risk", risk_json(traces.risk, arr.categories(), arr.boroughs())},
                   {"policies", std::move(rows)}};
    finish(report, a.common.out, out);
    return kExitOk;
}

// ---- search ----------------------------------------------------------------

struct SearchArgs {
    Common common;
    std::string arrivals;
    std::string capacity;
    std::optional<std::string> policy_class;
    std::optional<std::size_t> iterations;
    std::optional<std::size_t> batch;
    std::optional<std::size_t> seeds_per_policy;
    std::optional<std::string> sampler;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
    auto cfg = resolve_config(a.common);
    if (a.policy_class) {
        cfg.search.policy_class =
            *a.policy_class == "borough" ? PolicyClass::BoroughBudget : PolicyClass::CityBudget;
    }
    if (a.iterations) cfg.search.iterations = *a.iterations;
    if (a.batch) cfg.search.batch_size = *a.batch;
    if (a.seeds_per_policy) cfg.search.seeds_per_policy = *a.seeds_per_policy;
    if (a.sampler) cfg.search.sampler = *a.sampler == "sobol" ? Sampler::SobolRandom : Sampler::Evolutionary;

    const auto traces = load_traces(a.arrivals, a.capacity, cfg);
    const auto& arr = traces.aligned.arrivals;
    const auto& cap = traces.aligned.capacity;
    const auto mcfg = io::metrics_config(cfg, traces.risk);
    auto result = run_search(arr, cap, cfg.simulation, mcfg, cfg.search);

    io::RunReport report;
    report.config_echo = cfg.source_text;
    // Thread count does not affect results; keep it out of the report so
    // reruns on different machines are byte-identical.
    report.effective = io::config_to_json(cfg);
    report.effective["search"].erase("threads");
    report.run_id = make_run_id("search", report.effective, {a.arrivals, a.capacity});
    report.categories = arr.categories();
    report.boroughs = arr.boroughs();
    report.body = {{"start", io::format_date(traces.aligned.start)},
                   {"horizon", arr.horizon()},
                   {"evaluated", result.evaluated},
                   {"failed", result.failed},
                   {"most_efficient", result.front.entries.empty()
                                          ? json(nullptr)
                                          : json("p" + std::to_string(result.front.most_efficient()))},
                   {"most_equitable", result.front.entries.empty()
                                          ? json(nullptr)
                                          : json("p" + std::to_string(result.front.most_equitable()))}};
    report.hypervolume_history = std::move(result.hypervolume_history);
    report.front = std::move(result.front);
    if (a.common.out.empty()) throw Error(ErrorKind::InvalidConfig, "search requires --out");
    finish(report, a.common.out, out);
    return kExitOk;
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateArgs {
    Common common;
    std::string front;
    std::string arrivals;
    std::string capacity;
    std::string baseline;
    std::optional<std::size_t> seeds_per_policy;
};

std::string fixed(double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
    auto cfg = resolve_config(a.common);
    if (a.seeds_per_policy) cfg.search.seeds_per_policy = *a.seeds_per_policy;
    const auto traces = load_traces(a.arrivals, a.capacity, cfg);
    const auto& arr = traces.aligned.arrivals;
    const auto& cap = traces.aligned.capacity;
    const auto mcfg = io::metrics_config(cfg, traces.risk);

    const auto front_rows = io::read_policies_csv(a.front, arr.categories(), arr.boroughs());
    const auto baseline_rows = io::read_policies_csv(a.baseline, arr.categories(), arr.boroughs());
    if (baseline_rows.size() != 1) {
        throw Error(ErrorKind::InvalidConfig, "baseline file must hold exactly one policy");
    }
    ParetoFront front;
    for (const auto& [id, p] : front_rows) front.entries.push_back({p, {}, {}, false, 0});
    const auto report_oos = out_of_sample(front, baseline_rows.front().second, arr, cap,
                                          cfg.simulation, mcfg, cfg.search.seeds_per_policy,
                                          cfg.search.threads);

    json rows = json::array();
    for (std::size_t i = 0; i < front_rows.size(); ++i) {
        rows.push_back({{"policy_id", front_rows[i].first},
                        {"objectives", objectives_json(report_oos.policies[i].value)},
                        {"relative", objectives_json(report_oos.relative[i])},
                        {"error", report_oos.policies[i].error}});
    }
    auto id_of = [&](const std::optional<std::size_t>& i) {
        return i ? json(front_rows[*i].first) : json(nullptr);
    };

    io::RunReport report;
    report.config_echo = cfg.source_text;
    report.effective = io::config_to_json(cfg);
    report.effective["search"].erase("threads");
    report.run_id = make_run_id("evaluate", report.effective, {a.front, a.arrivals, a.capacity, a.baseline});
    report.categories = arr.categories();
    report.boroughs = arr.boroughs();
    report.body = {{"horizon", arr.horizon()},
                   {"baseline", {{"policy_id", baseline_rows.front().first},
                                 {"objectives", objectives_json(report_oos.baseline.value)},
                                 {"error", report_oos.baseline.error}}},
                   {"policies", std::move(rows)},
                   {"most_efficient", id_of(report_oos.most_efficient)},
                   {"most_equitable", id_of(report_oos.most_equitable)}};

    if (!a.common.out.empty()) io::emit_report(report, a.common.out);
    out << "policy_id,g,f,g_rel,f_rel\n";
    const auto& base = report_oos.baseline.value;
    // The baseline row is labelled by role; its own id may clash with a front id.
    if (base) {
        out << "baseline," << fixed(base->g, 3) << ',' << fixed(base->f, 3) << ',' << fixed(1.0, 4) << ','
            << fixed(1.0, 4) << '\n';
    }
    for (std::size_t i = 0; i < front_rows.size(); ++i) {
        const auto& v = report_oos.policies[i].value;
        const auto& r = report_oos.relative[i];
        out << front_rows[i].first << ',';
        if (v) {
            out << fixed(v->g, 3) << ',' << fixed(v->f, 3);
        } else {
            out << ",";
        }
        out << ',';
        if (r) {
            out << fixed(r->g, 4) << ',' << fixed(r->f, 4);
        } else {
            out << ",";
        }
        out << '\n';
    }
    return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
    std::string instance;
    std::string config;
    std::optional<double> budget;
    std::size_t days = 365;
    double utilization = 1.0;
    std::optional<std::uint64_t> seed;
    std::string start = "2021-01-01";
    std::string out;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    io::RunConfig cfg = a.config.empty() ? io::RunConfig{} : io::load_config(a.config);
    if (a.budget) cfg.budget = a.budget;
    if (a.seed) cfg.simulation.seed = *a.seed;
    if (!cfg.budget) throw Error(ErrorKind::InvalidConfig, "a budget is required (--budget)");
    const auto start = io::parse_date(a.start);
    if (!start) throw Error(ErrorKind::UnparseableDate, "--start '" + a.start + "'");

    auto table = io::read_instance_csv(a.instance);
    const auto inst = build_instance(table.categories, table.boroughs, table.lambda, table.risk,
                                     *cfg.budget, cfg.alpha.value_or(1.0));
    const auto [arrivals, capacity] =
        generate_synthetic_trace(inst, a.days, a.utilization, cfg.simulation.seed);
    fs::create_directories(a.out);
    io::write_arrivals_csv(fs::path(a.out) / "arrivals.csv", arrivals, *start);
    io::write_capacity_csv(fs::path(a.out) / "capacity.csv", capacity, *start);
    out << arrivals.total_incidents() << " incidents and " << capacity.total()
        << " inspections over " << a.days << " days written to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Inspection budget design: stylized solver, simulator and policy search",
                 "slaforge");
    app.require_subcommand(1);

    SolveArgs solve;
    auto* c_solve = app.add_subcommand("solve", "closed-form and weighted stylized designs");
    c_solve->add_option("--instance", solve.instance, "category,borough,lambda,risk CSV")
        ->required()->check(CLI::ExistingFile);
    c_solve->add_option("--config", solve.config, "INI config file")->check(CLI::ExistingFile);
    c_solve->add_option("--gamma", solve.gamma, "weight of the efficiency loss");
    c_solve->add_option("--sweep", solve.sweep, "gamma sweep lo:hi:step");
    c_solve->add_option("--budget", solve.budget, "city-wide inspections per day");
    auto* o_alpha = c_solve->add_option("--alpha", solve.alpha, "SLA tail parameter");
    c_solve->add_option("--tail-probability", solve.tail_probability, "SLA tail probability")
        ->excludes(o_alpha);
    c_solve->add_option("--out", solve.out, "output directory");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "simulate policies on a trace");
    add_common(*c_sim, sim.common);
    c_sim->add_option("--arrivals", sim.arrivals)->required()->check(CLI::ExistingFile);
    c_sim->add_option("--capacity", sim.capacity)->required()->check(CLI::ExistingFile);
    c_sim->add_option("--policy", sim.policy, "policy table CSV")->required()->check(CLI::ExistingFile);

    SearchArgs search;
    auto* c_search = app.add_subcommand("search", "multi-objective policy search");
    add_common(*c_search, search.common);
    c_search->add_option("--arrivals", search.arrivals)->required()->check(CLI::ExistingFile);
    c_search->add_option("--capacity", search.capacity)->required()->check(CLI::ExistingFile);
    c_search->add_option("--class", search.policy_class, "borough | city")
        ->check(CLI::IsMember({"borough", "city"}));
    c_search->add_option("--iterations", search.iterations);
    c_search->add_option("--batch", search.batch);
    c_search->add_option("--seeds-per-policy", search.seeds_per_policy);
    c_search->add_option("--sampler", search.sampler, "sobol | evolutionary")
        ->check(CLI::IsMember({"sobol", "evolutionary"}));

    EvaluateArgs eval;
    auto* c_eval = app.add_subcommand("evaluate", "out-of-sample evaluation against a baseline");
    add_common(*c_eval, eval.common);
    c_eval->add_option("--front", eval.front, "front_policies.csv")->required()->check(CLI::ExistingFile);
    c_eval->add_option("--arrivals", eval.arrivals)->required()->check(CLI::ExistingFile);
    c_eval->add_option("--capacity", eval.capacity)->required()->check(CLI::ExistingFile);
    c_eval->add_option("--baseline", eval.baseline, "one-row policy CSV")
        ->required()->check(CLI::ExistingFile);
    c_eval->add_option("--seeds-per-policy", eval.seeds_per_policy);

    SynthArgs synth;
    auto* c_synth = app.add_subcommand("synth", "synthetic Poisson traces from an instance");
    c_synth->add_option("--instance", synth.instance)->required()->check(CLI::ExistingFile);
    c_synth->add_option("--config", synth.config)->check(CLI::ExistingFile);
    c_synth->add_option("--budget", synth.budget, "city-wide inspections per day");
    c_synth->add_option("--days", synth.days);
    c_synth->add_option("--utilization", synth.utilization, "capacity mean = budget * utilization");
    c_synth->add_option("--seed", synth.seed);
    c_synth->add_option("--start", synth.start, "first date, YYYY-MM-DD");
    c_synth->add_option("--out", synth.out)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (*c_solve) return cmd_solve(solve, out);
        if (*c_sim) return cmd_simulate(sim, out);
        if (*c_search) return cmd_search(search, out);
        if (*c_eval) return cmd_evaluate(eval, out);
        return cmd_synth(synth, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_validation_error(e.kind()) ? kExitValidation : kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace slaforge::cli
