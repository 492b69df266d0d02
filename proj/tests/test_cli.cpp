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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace slaforge {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("slaforge_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write("inst.csv", "category,borough,lambda,risk\nK,A,3,1\nK,B,2,2\nL,A,1,1\nL,B,2,2\n");
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    void write(const std::string& name, const std::string& text) const {
        std::ofstream(dir_ / name, std::ios::binary) << text;
    }
    static std::string slurp(const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    int run(std::vector<std::string> args) {
        out_.str({});
        err_.str({});
        return cli::run(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

TEST_F(Cli, SolvePrintsJson) {
    ASSERT_EQ(run({"solve", "--instance", path("inst.csv"), "--budget", "10", "--sweep", "0:1:0.5"}),
              cli::kExitOk)
        << err_.str();
    const auto j = nlohmann::json::parse(out_.str());
    EXPECT_TRUE(j.contains("run_id"));
    EXPECT_EQ(j["results"]["solutions"].size(), 3u);
}

TEST_F(Cli, PipelineRunsEndToEnd) {
    ASSERT_EQ(run({"synth", "--instance", path("inst.csv"), "--budget", "10", "--days", "120",
                   "--utilization", "0.8", "--seed", "3", "--out", path("train")}),
              cli::kExitOk)
        << err_.str();
    ASSERT_EQ(run({"synth", "--instance", path("inst.csv"), "--budget", "10", "--days", "120",
                   "--utilization", "0.8", "--seed", "4", "--out", path("test")}),
              cli::kExitOk);
    const std::vector<std::string> search{"search", "--arrivals", path("train/arrivals.csv"),
                                          "--capacity", path("train/capacity.csv"),
                                          "--iterations", "3", "--batch", "6", "--seed", "5",
                                          "--review-period", "30", "--fcfs-violation", "0.3"};
    auto first = search;
    first.insert(first.end(), {"--out", path("run1"), "--threads", "1"});
    auto second = search;
    second.insert(second.end(), {"--out", path("run2"), "--threads", "3"});
    ASSERT_EQ(run(first), cli::kExitOk) << err_.str();
    ASSERT_EQ(run(second), cli::kExitOk) << err_.str();
    for (const char* f : {"report.json", "pareto.csv", "front_policies.csv", "hypervolume.csv"}) {
        EXPECT_EQ(slurp(dir_ / "run1" / f), slurp(dir_ / "run2" / f)) << f;
    }

    ASSERT_EQ(run({"simulate", "--arrivals", path("test/arrivals.csv"), "--capacity",
                   path("test/capacity.csv"), "--policy", path("run1/front_policies.csv")}),
              cli::kExitOk)
        << err_.str();
    EXPECT_TRUE(nlohmann::json::accept(out_.str()));

    // The first front policy stands in as the baseline.
    std::ifstream front(dir_ / "run1" / "front_policies.csv");
    std::string header;
    std::string row;
    std::getline(front, header);
    std::getline(front, row);
    write("baseline.csv", header + "\n" + row + "\n");
    ASSERT_EQ(run({"evaluate", "--front", path("run1/front_policies.csv"), "--arrivals",
                   path("test/arrivals.csv"), "--capacity", path("test/capacity.csv"), "--baseline",
                   path("baseline.csv")}),
              cli::kExitOk)
        << err_.str();
    EXPECT_EQ(out_.str().rfind("policy_id,g,f,g_rel,f_rel\n", 0), 0u);
    EXPECT_NE(out_.str().find("\nbaseline,"), std::string::npos);
    EXPECT_NE(out_.str().find("\np0,"), std::string::npos);
}

TEST_F(Cli, ValidationErrorsExitTwo) {
    EXPECT_EQ(run({}), cli::kExitValidation);
    EXPECT_EQ(run({"frobnicate"}), cli::kExitValidation);
    EXPECT_EQ(run({"solve", "--budget", "10"}), cli::kExitValidation);
    EXPECT_EQ(run({"solve", "--instance", path("missing.csv"), "--budget", "10"}), cli::kExitValidation);
    EXPECT_EQ(run({"solve", "--instance", path("inst.csv"), "--budget", "abc"}), cli::kExitValidation);
    // Budget not above the total arrival rate.
    EXPECT_EQ(run({"solve", "--instance", path("inst.csv"), "--budget", "8"}), cli::kExitValidation);
    EXPECT_NE(err_.str().find("error: "), std::string::npos);
    write("bad.ini", "[metrics]\nequity=fair\n");
    EXPECT_EQ(run({"solve", "--instance", path("inst.csv"), "--budget", "10", "--config", path("bad.ini")}),
              cli::kExitValidation);
    write("rows.csv", "category,borough,lambda,risk\nK,A,x,1\n");
    EXPECT_EQ(run({"solve", "--instance", path("rows.csv"), "--budget", "10"}), cli::kExitValidation);
}

TEST_F(Cli, RuntimeErrorsExitThree) {
    write("zero.csv", "category,borough,lambda,risk\nK,A,0,1\nK,B,0,1\n");
    EXPECT_EQ(run({"solve", "--instance", path("zero.csv"), "--budget", "10"}), cli::kExitRuntime);
    // Output directory path occupied by a regular file.
    write("occupied", "x");
    EXPECT_EQ(run({"solve", "--instance", path("inst.csv"), "--budget", "10", "--out", path("occupied")}),
              cli::kExitRuntime);
}

TEST_F(Cli, HelpExitsZero) {
    EXPECT_EQ(run({"--help"}), cli::kExitOk);
    EXPECT_NE(out_.str().find("search"), std::string::npos);
}

}  // namespace
}  // namespace slaforge
