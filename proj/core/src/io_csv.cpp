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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "slaforge/error.hpp"
#include "slaforge/io.hpp"

namespace slaforge::io {

namespace {

using namespace std::chrono;

[[noreturn]] void malformed(std::size_t line, const std::string& msg) {
    throw Error(ErrorKind::MalformedRow, "line " + std::to_string(line) + ": " + msg);
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Reads the non-blank lines of a file, numbered from 1.
std::vector<std::pair<std::size_t, std::string>> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::vector<std::pair<std::size_t, std::string>> lines;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        lines.emplace_back(n, line);
    }
    if (lines.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " is empty");
    return lines;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const std::string s = trim(text);
    if (s.empty()) return false;
    if constexpr (std::is_floating_point_v<T>) {
        char* end = nullptr;
        out = std::strtod(s.c_str(), &end);
        return end == s.c_str() + s.size() && std::isfinite(out);
    } else {
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc() && ptr == s.data() + s.size();
    }
}

std::size_t index_of(std::vector<std::string>& names, const std::string& name, bool fixed,
                     std::size_t line, const char* what) {
    auto it = std::find(names.begin(), names.end(), name);
    if (it != names.end()) return static_cast<std::size_t>(it - names.begin());
    if (fixed) malformed(line, std::string("unknown ") + what + " '" + name + "'");
    names.push_back(name);
    return names.size() - 1;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
    const std::string s = trim(text);
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (!parse_number(std::string_view(s).substr(0, 4), y) ||
        !parse_number(std::string_view(s).substr(5, 2), m) ||
        !parse_number(std::string_view(s).substr(8, 2), d)) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{m}, day{d}};
    if (!ymd.ok()) return std::nullopt;
    return sys_days{ymd};
}

std::string format_date(Date d) {
    const year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

DatedArrivals ingest_arrivals(const std::filesystem::path& path, const IngestOptions& options) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines.front().second);
    static const std::vector<std::string> kColumns{"date", "borough", "category", "region_id", "risk"};
    if (header.size() < 3 || header.size() > kColumns.size()) {
        malformed(lines.front().first, "expected header date,borough,category[,region_id[,risk]]");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) != kColumns[i]) {
            malformed(lines.front().first,
                      "expected column '" + kColumns[i] + "', found '" + trim(header[i]) + "'");
        }
    }
    if (lines.size() < 2) throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");

    std::vector<std::string> categories = options.categories;
    std::vector<std::string> boroughs = options.boroughs;
    const bool fixed_categories = !categories.empty();
    const bool fixed_boroughs = !boroughs.empty();
    std::vector<std::string> regions;

    struct Row {
        Date date;
        std::uint32_t category;
        std::uint32_t borough;
        std::int32_t region;
        std::optional<double> risk;
    };
    std::vector<Row> rows;
    rows.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [n, text] = lines[i];
        const auto fields = split_csv_line(text);
        if (fields.size() != header.size()) {
            malformed(n, "expected " + std::to_string(header.size()) + " fields, found " +
                             std::to_string(fields.size()));
        }
        const auto date = parse_date(fields[0]);
        if (!date) {
            throw Error(ErrorKind::UnparseableDate,
                        "line " + std::to_string(n) + ": '" + fields[0] + "'");
        }
        const std::string borough = trim(fields[1]);
        const std::string category = trim(fields[2]);
        if (borough.empty() || category.empty()) malformed(n, "empty borough or category");
        Row row{*date,
                static_cast<std::uint32_t>(index_of(categories, category, fixed_categories, n, "category")),
                static_cast<std::uint32_t>(index_of(boroughs, borough, fixed_boroughs, n, "borough")),
                -1, std::nullopt};
        if (header.size() > 3) {
            const std::string region = trim(fields[3]);
            if (!region.empty()) {
                row.region = static_cast<std::int32_t>(index_of(regions, region, false, n, "region"));
            }
        }
        if (header.size() > 4 && !trim(fields[4]).empty()) {
            double r = 0.0;
            if (!parse_number(fields[4], r)) malformed(n, "risk is not a number");
            row.risk = r;
        }
        rows.push_back(row);
    }

    const auto [lo, hi] = std::minmax_element(
        rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.date < b.date; });
    const Date start = lo->date;
    const auto horizon = static_cast<std::size_t>((hi->date - start).count()) + 1;

    std::vector<IncidentRecord> records;
    records.reserve(rows.size());
    Matrix<double> risk_sum(categories.size(), boroughs.size(), 0.0);
    Matrix<std::int64_t> risk_count(categories.size(), boroughs.size(), 0);
    for (const auto& r : rows) {
        records.push_back({static_cast<std::int32_t>((r.date - start).count()), r.category,
                           r.borough, r.region});
        if (r.risk) {
            risk_sum(r.category, r.borough) += *r.risk;
            ++risk_count(r.category, r.borough);
        }
    }
    Matrix<std::optional<double>> mean_risk(categories.size(), boroughs.size());
    for (std::size_t i = 0; i < risk_sum.size(); ++i) {
        if (risk_count.flat()[i] > 0) {
            mean_risk.flat()[i] = risk_sum.flat()[i] / static_cast<double>(risk_count.flat()[i]);
        }
    }
    return DatedArrivals{start,
                         ArrivalTrace::from_records(std::move(categories), std::move(boroughs),
                                                    horizon, std::move(records), std::move(regions)),
                         std::move(mean_risk)};
}

DatedCapacity ingest_capacity(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines.front().second);
    if (header.size() != 2 || trim(header[0]) != "date" || trim(header[1]) != "inspections") {
        malformed(lines.front().first, "expected header date,inspections");
    }
    if (lines.size() < 2) throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");

    std::map<Date, std::int64_t> by_day;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [n, text] = lines[i];
        const auto fields = split_csv_line(text);
        if (fields.size() != 2) malformed(n, "expected 2 fields");
        const auto date = parse_date(fields[0]);
        if (!date) {
            throw Error(ErrorKind::UnparseableDate,
                        "line " + std::to_string(n) + ": '" + fields[0] + "'");
        }
        std::int64_t v = 0;
        if (!parse_number(fields[1], v)) malformed(n, "inspections is not an integer");
        if (v < 0) {
            throw Error(ErrorKind::NegativeCapacity,
                        "line " + std::to_string(n) + ": inspections=" + std::to_string(v));
        }
        by_day[*date] += v;
    }
    DatedCapacity cap;
    cap.start = by_day.begin()->first;
    const auto horizon = static_cast<std::size_t>((by_day.rbegin()->first - cap.start).count()) + 1;
    cap.values.assign(horizon, 0);
    for (const auto& [d, v] : by_day) cap.values[static_cast<std::size_t>((d - cap.start).count())] = v;
    return cap;
}

AlignedTraces align_traces(const DatedArrivals& arrivals, const DatedCapacity& capacity,
                           AlignMode mode) {
    const Date a0 = arrivals.start;
    const Date a1 = a0 + days(static_cast<int>(arrivals.trace.horizon()) - 1);
    const Date c0 = capacity.start;
    const Date c1 = c0 + days(static_cast<int>(capacity.values.size()) - 1);
    Date lo;
    Date hi;
    if (mode == AlignMode::Intersect) {
        lo = std::max(a0, c0);
        hi = std::min(a1, c1);
        if (lo > hi) {
            throw Error(ErrorKind::TraceMisaligned, "arrival and capacity date ranges do not overlap");
        }
    } else {
        lo = std::min(a0, c0);
        hi = std::max(a1, c1);
    }
    const auto horizon = static_cast<std::size_t>((hi - lo).count()) + 1;

    const auto& src = arrivals.trace;
    std::vector<IncidentRecord> records;
    for (auto r : src.records()) {
        const Date d = a0 + days(r.day);
        if (d < lo || d > hi) continue;
        r.day = static_cast<std::int32_t>((d - lo).count());
        records.push_back(r);
    }
    std::vector<std::int64_t> cap(horizon, 0);
    for (std::size_t i = 0; i < capacity.values.size(); ++i) {
        const Date d = c0 + days(static_cast<int>(i));
        if (d < lo || d > hi) continue;
        cap[static_cast<std::size_t>((d - lo).count())] = capacity.values[i];
    }
    return AlignedTraces{lo,
                         ArrivalTrace::from_records(src.categories(), src.boroughs(), horizon,
                                                    std::move(records), src.regions()),
                         CapacityTrace(std::move(cap))};
}

void write_arrivals_csv(const std::filesystem::path& path, const ArrivalTrace& trace, Date start) {
    auto out = open_out(path);
    const bool with_regions = !trace.regions().empty();
    out << (with_regions ? "date,borough,category,region_id\n" : "date,borough,category\n");
    auto row = [&](std::int64_t day, std::size_t k, std::size_t b, std::int32_t region) {
        out << format_date(start + days(day)) << ',' << csv_escape(trace.boroughs()[b]) << ','
            << csv_escape(trace.categories()[k]);
        if (with_regions) {
            out << ',';
            if (region >= 0) out << csv_escape(trace.regions()[static_cast<std::size_t>(region)]);
        }
        out << '\n';
    };
    if (trace.has_records()) {
        for (const auto& r : trace.records()) row(r.day, r.category, r.borough, r.region);
    } else {
        for (std::size_t d = 0; d < trace.horizon(); ++d)
            for (std::size_t k = 0; k < trace.n_categories(); ++k)
                for (std::size_t b = 0; b < trace.n_boroughs(); ++b)
                    for (std::int64_t n = trace.count(d, k, b); n > 0; --n)
                        row(static_cast<std::int64_t>(d), k, b, -1);
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

void write_capacity_csv(const std::filesystem::path& path, const CapacityTrace& trace, Date start) {
    auto out = open_out(path);
    out << "date,inspections\n";
    for (std::size_t d = 0; d < trace.horizon(); ++d)
        out << format_date(start + days(static_cast<int>(d))) << ',' << trace.at(d) << '\n';
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

InstanceTable read_instance_csv(const std::filesystem::path& path) {
    const auto lines = read_lines(path);
    const auto header = split_csv_line(lines.front().second);
    static const std::vector<std::string> kColumns{"category", "borough", "lambda", "risk"};
    if (header.size() != kColumns.size()) malformed(lines.front().first, "expected header category,borough,lambda,risk");
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) != kColumns[i]) malformed(lines.front().first, "expected header category,borough,lambda,risk");
    }
    InstanceTable t;
    struct Row {
        std::size_t k, b;
        double lambda, risk;
        std::size_t line;
    };
    std::vector<Row> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [n, text] = lines[i];
        const auto f = split_csv_line(text);
        if (f.size() != 4) malformed(n, "expected 4 fields");
        Row r{index_of(t.categories, trim(f[0]), false, n, "category"),
              index_of(t.boroughs, trim(f[1]), false, n, "borough"), 0.0, 0.0, n};
        if (!parse_number(f[2], r.lambda) || !parse_number(f[3], r.risk)) {
            malformed(n, "lambda and risk must be numbers");
        }
        rows.push_back(r);
    }
    if (rows.empty()) throw Error(ErrorKind::EmptyFile, path.string() + " has no data rows");
    t.lambda = Matrix<double>(t.categories.size(), t.boroughs.size(), 0.0);
    t.risk = Matrix<double>(t.categories.size(), t.boroughs.size(), 1.0);
    Matrix<std::uint8_t> seen(t.categories.size(), t.boroughs.size(), 0);
    for (const auto& r : rows) {
        if (seen(r.k, r.b)) malformed(r.line, "duplicate (category, borough) pair");
        seen(r.k, r.b) = 1;
        t.lambda(r.k, r.b) = r.lambda;
        t.risk(r.k, r.b) = r.risk;
    }
    return t;
}

std::vector<std::string> policy_columns(PolicyClass cls, const std::vector<std::string>& categories,
                                        const std::vector<std::string>& boroughs) {
    std::vector<std::string> cols;
    if (cls == PolicyClass::BoroughBudget) {
        for (const auto& b : boroughs) cols.push_back("budget:" + b);
    }
    for (const char* prefix : {"gps:", "target:"}) {
        for (const auto& b : boroughs)
            for (const auto& k : categories) cols.push_back(prefix + k + ":" + b);
    }
    return cols;
}

std::vector<double> policy_values(const Policy& policy) {
    return std::visit([](const auto& p) { return p.to_vector(); }, policy);
}

std::vector<std::pair<std::string, Policy>> read_policies_csv(
    const std::filesystem::path& path, const std::vector<std::string>& categories,
    const std::vector<std::string>& boroughs) {
    const auto lines = read_lines(path);
    auto header = split_csv_line(lines.front().second);
    for (auto& h : header) h = trim(h);
    if (header.empty() || header[0] != "policy_id") {
        malformed(lines.front().first, "first column must be policy_id");
    }
    const std::vector<std::string> columns(header.begin() + 1, header.end());
    const bool borough_class =
        std::any_of(columns.begin(), columns.end(), [](const std::string& c) { return c.rfind("budget:", 0) == 0; });
    const PolicyClass cls = borough_class ? PolicyClass::BoroughBudget : PolicyClass::CityBudget;
    const auto expected = policy_columns(cls, categories, boroughs);

    // Map each expected column to its position in the file.
    std::vector<std::size_t> position(expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
        auto it = std::find(columns.begin(), columns.end(), expected[i]);
        if (it == columns.end()) malformed(lines.front().first, "missing column '" + expected[i] + "'");
        position[i] = static_cast<std::size_t>(it - columns.begin()) + 1;
    }
    if (columns.size() != expected.size()) {
        malformed(lines.front().first, "unexpected columns for this category/borough set");
    }

    const std::size_t K = categories.size();
    const std::size_t B = boroughs.size();
    std::vector<std::pair<std::string, Policy>> out;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& [n, text] = lines[i];
        const auto fields = split_csv_line(text);
        if (fields.size() != header.size()) malformed(n, "wrong number of fields");
        std::vector<double> v(expected.size());
        for (std::size_t c = 0; c < expected.size(); ++c) {
            if (!parse_number(fields[position[c]], v[c])) malformed(n, "non-numeric policy value");
        }
        Policy p = [&]() -> Policy {
            if (cls == PolicyClass::BoroughBudget) {
                return borough_policy_from_vector(v, K, B);
            }
            Matrix<double> gps(K, B);
            Matrix<double> target(K, B);
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t k = 0; k < K; ++k) {
                    gps(k, b) = v[b * K + k];
                    target(k, b) = v[K * B + b * K + k];
                }
            }
            return CityBudgetPolicy::from_parts(std::move(gps), std::move(target));
        }();
        out.emplace_back(trim(fields[0]), std::move(p));
    }
    return out;
}

void write_policies_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, Policy>>& policies,
                        const std::vector<std::string>& categories,
                        const std::vector<std::string>& boroughs) {
    auto out = open_out(path);
    const PolicyClass cls =
        policies.empty() ? PolicyClass::BoroughBudget : policy_class_of(policies.front().second);
    out << "policy_id";
    for (const auto& c : policy_columns(cls, categories, boroughs)) out << ',' << csv_escape(c);
    out << '\n';
    for (const auto& [id, p] : policies) {
        out << csv_escape(id);
        for (double v : policy_values(p)) out << ',' << format_double(v);
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::IoError, "failed writing " + path.string());
}

}  // namespace slaforge::io
