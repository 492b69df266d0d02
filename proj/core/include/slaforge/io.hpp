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

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "slaforge/metrics.hpp"
#include "slaforge/model.hpp"
#include "slaforge/search.hpp"
#include "slaforge/simulator.hpp"
#include "slaforge/stylized.hpp"

namespace slaforge::io {

using Date = std::chrono::sys_days;

/// Parses YYYY-MM-DD, ignoring any time-of-day suffix.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);

/// Splits one CSV line (RFC 4180 quoting, no embedded newlines).
std::vector<std::string> split_csv_line(std::string_view line);
std::string csv_escape(std::string_view field);

struct IngestOptions {
    /// Canonical orders; when empty they are inferred from first appearance.
    std::vector<std::string> categories;
    std::vector<std::string> boroughs;
};

struct DatedArrivals {
    Date start{};
    ArrivalTrace trace;
    /// Mean of the optional `risk` column per (category, borough).
    Matrix<std::optional<double>> mean_risk;
};

/// Reads `date,borough,category[,region_id[,risk]]`. Throws MalformedRow
/// (with the line number), EmptyFile, UnparseableDate or IoError.
DatedArrivals ingest_arrivals(const std::filesystem::path& path, const IngestOptions& options = {});

struct DatedCapacity {
    Date start{};
    std::vector<std::int64_t> values;  ///< zero-filled over start..last date
};

/// Reads `date,inspections`; repeated dates are summed. Throws MalformedRow,
/// NegativeCapacity, EmptyFile, UnparseableDate or IoError.
DatedCapacity ingest_capacity(const std::filesystem::path& path);

enum class AlignMode { Intersect, PadZero };

struct AlignedTraces {
    Date start{};
    ArrivalTrace arrivals;
    CapacityTrace capacity;
};

/// Intersect keeps the common date range; PadZero spans the union and
/// fills missing days with zero arrivals or zero capacity. Throws
/// TraceMisaligned if the ranges do not overlap under Intersect.
AlignedTraces align_traces(const DatedArrivals& arrivals, const DatedCapacity& capacity,
                           AlignMode mode);

void write_arrivals_csv(const std::filesystem::path& path, const ArrivalTrace& trace, Date start);
void write_capacity_csv(const std::filesystem::path& path, const CapacityTrace& trace, Date start);

/// Stylized instance file: `category,borough,lambda,risk`, one row per pair.
struct InstanceTable {
    std::vector<std::string> categories;
    std::vector<std::string> boroughs;
    Matrix<double> lambda;
    Matrix<double> risk;
};
InstanceTable read_instance_csv(const std::filesystem::path& path);

/// Everything a run needs besides the data files.
struct RunConfig {
    SimulationConfig simulation;
    double sla_percentile = 50.0;
    double drop_cost = 100.0;
    EquityKind equity = EquityKind::Range;
    SearchConfig search;
    AlignMode align = AlignMode::Intersect;
    IngestOptions order;
    std::map<std::string, double> risk_levels;  ///< per category
    std::optional<double> budget;
    std::optional<double> alpha;
    std::string source_text;  ///< config file as read, echoed into reports
};

/// INI-style `key=value` with [simulation], [metrics], [search], [data],
/// [risk] and [instance] sections. Unknown sections or keys are rejected
/// with InvalidConfig.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text);
nlohmann::json config_to_json(const RunConfig& config);

/// Risk matrix for a metrics run: configured per-category levels first,
/// then the built-in levels for known category names, then the ingested
/// mean risk, then 1.
Matrix<double> resolve_risk(const RunConfig& config, const std::vector<std::string>& categories,
                            const std::vector<std::string>& boroughs,
                            const Matrix<std::optional<double>>& mean_risk);

MetricsConfig metrics_config(const RunConfig& config, Matrix<double> risk);

/// Policy table: a `policy_id` column followed by these value columns:
/// `budget:<b>` (borough class only),
/// `gps:<k>:<b>` and `target:<k>:<b>` columns, one policy per row.
std::vector<std::string> policy_columns(PolicyClass cls, const std::vector<std::string>& categories,
                                        const std::vector<std::string>& boroughs);
std::vector<double> policy_values(const Policy& policy);
std::vector<std::pair<std::string, Policy>> read_policies_csv(
    const std::filesystem::path& path, const std::vector<std::string>& categories,
    const std::vector<std::string>& boroughs);
void write_policies_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, Policy>>& policies,
                        const std::vector<std::string>& categories,
                        const std::vector<std::string>& boroughs);

nlohmann::json to_json(const Policy& policy, const std::vector<std::string>& categories,
                       const std::vector<std::string>& boroughs);
nlohmann::json to_json(const PolicyMetrics& metrics, const std::vector<std::string>& categories,
                       const std::vector<std::string>& boroughs);
nlohmann::json to_json(const StylizedSolution& solution, const ProblemInstance& instance);

struct RunReport {
    std::string run_id;
    std::string config_echo;       ///< byte-identical copy of the config file
    nlohmann::json effective;      ///< resolved configuration after CLI overrides
    nlohmann::json body;           ///< command-specific results
    std::vector<std::string> categories;
    std::vector<std::string> boroughs;
    std::optional<ParetoFront> front;
    std::vector<double> hypervolume_history;
};

/// Writes report.json and, when a front is present, pareto.csv,
/// front_policies.csv and hypervolume.csv. Output is a pure function of the
/// report. Throws IoError.
void emit_report(const RunReport& report, const std::filesystem::path& out_dir);

nlohmann::json report_to_json(const RunReport& report);

/// Stable 64-bit FNV-1a hash, used for run ids.
std::uint64_t fnv1a(std::string_view text);

}  // namespace slaforge::io
