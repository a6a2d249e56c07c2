// Copyright 2026 The cvbell Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cvbell/cli.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"

#include "cvbell/records_io.h"

namespace cvbell::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "cvbell");
    std::vector<char *> argv;
    for (auto &a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class CliTest : public ::testing::Test {
   protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("cvbell_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override {
        fs::remove_all(dir_);
    }
    fs::path write_config(const std::string &text) {
        auto p = dir_ / "config.json";
        std::ofstream(p) << text;
        return p;
    }
    fs::path dir_;
};

TEST(VerifyTest, DefaultChecksPass) {
    auto checks = run_identity_checks(VerifyOptions{});
    EXPECT_FALSE(checks.empty());
    for (const auto &c : checks) EXPECT_TRUE(c.passed()) << c.name << " " << c.deviation;
    auto r = invoke({"verify"});
    EXPECT_EQ(r.code, EXIT_OK);
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(VerifyTest, DroppedQuarterFails) {
    auto r = invoke({"verify", "--inject-fault", "drop-quarter", "--points", "100"});
    EXPECT_EQ(r.code, EXIT_FAILURE_ANALYSIS);
    EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(VerifyTest, SmallestTruncationNotesGuardedVacuum) {
    auto r = invoke({"verify", "--truncation", "2", "--points", "100"});
    EXPECT_EQ(r.code, EXIT_OK);
    EXPECT_NE(r.out.find("guarded subspace is the vacuum only"), std::string::npos);
}

TEST(VerifyTest, UsageErrors) {
    EXPECT_EQ(invoke({"verify", "--truncation", "40"}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"verify", "--inject-fault", "other"}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"frobnicate"}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({}).code, EXIT_USAGE);
}

TEST_F(CliTest, ParseConfigAppliesOverrides) {
    auto p = write_config(R"({"squeezing": 0.3, "trials": 10})");
    ConfigOverrides o;
    o.trials = 77;
    o.model = protocol::ModelSelection::lhv;
    auto c = parse_config(p, o);
    EXPECT_EQ(c.squeezing, 0.3);
    EXPECT_EQ(c.n_trials, 77u);
    EXPECT_EQ(c.model, protocol::ModelSelection::lhv);
    auto d = parse_config(std::nullopt);
    EXPECT_EQ(d, protocol::ExperimentConfig{});
}

TEST_F(CliTest, ConfigErrorsExitTwoAndNameField) {
    auto p = write_config(R"({"squeezing": -1})");
    auto r = invoke({"simulate", "--config", p.string(), "--out", (dir_ / "o").string()});
    EXPECT_EQ(r.code, EXIT_USAGE);
    EXPECT_NE(r.err.find("squeezing"), std::string::npos);

    p = write_config(R"({"squeezing": 0.5, "colour": 3})");
    r = invoke({"simulate", "--config", p.string()});
    EXPECT_EQ(r.code, EXIT_USAGE);
    EXPECT_NE(r.err.find("colour"), std::string::npos);

    p = write_config("{not json");
    EXPECT_EQ(invoke({"simulate", "--config", p.string()}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"simulate", "--config", (dir_ / "missing.json").string()}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"simulate", "--model", "classical"}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"simulate", "--trials", "0"}).code, EXIT_USAGE);
}

TEST_F(CliTest, SimulateBothWritesArtifacts) {
    auto out = dir_ / "run";
    auto r = invoke({"simulate", "--trials", "10000", "--out", out.string()});
    ASSERT_EQ(r.code, EXIT_OK) << r.err;
    for (const char *name : {"records_quantum.csv", "records_quantum.json", "records_lhv.csv", "records_lhv.json",
                             "manifest_simulate.json"}) {
        EXPECT_TRUE(fs::exists(out / name)) << name;
    }
    auto manifest = nlohmann::json::parse(slurp(out / "manifest_simulate.json"));
    for (const auto &a : manifest["artifacts"]) EXPECT_TRUE(fs::exists(a.get<std::string>()));
    EXPECT_EQ(manifest["tool_version"], std::string(TOOL_VERSION));
    EXPECT_NE(r.out.find("station A: 0 nonzero aux outcomes"), std::string::npos) << r.out;
}

TEST_F(CliTest, SameSeedIsByteIdentical) {
    auto a = dir_ / "a", b = dir_ / "b";
    ASSERT_EQ(invoke({"simulate", "--trials", "5000", "--seed", "99", "--out", a.string()}).code, EXIT_OK);
    ASSERT_EQ(invoke({"simulate", "--trials", "5000", "--seed", "99", "--out", b.string()}).code, EXIT_OK);
    EXPECT_EQ(slurp(a / "records_lhv.csv"), slurp(b / "records_lhv.csv"));
    EXPECT_EQ(slurp(a / "records_quantum.csv"), slurp(b / "records_quantum.csv"));
    auto c = dir_ / "c";
    ASSERT_EQ(invoke({"simulate", "--trials", "5000", "--seed", "100", "--out", c.string()}).code, EXIT_OK);
    EXPECT_NE(slurp(a / "records_lhv.csv"), slurp(c / "records_lhv.csv"));
}

TEST_F(CliTest, SimulateThenReportRoundTrip) {
    auto out = dir_ / "run";
    ASSERT_EQ(invoke({"simulate", "--trials", "50000", "--out", out.string()}).code, EXIT_OK);
    auto r = invoke({"report", (out / "records_quantum.csv").string(), (out / "records_lhv.csv").string(), "--out",
                     out.string()});
    ASSERT_EQ(r.code, EXIT_OK) << r.err;
    EXPECT_TRUE(fs::exists(out / "report.json"));
    EXPECT_TRUE(fs::exists(out / "correlations.csv"));
    EXPECT_TRUE(fs::exists(out / "manifest_report.json"));
    EXPECT_NE(r.out.find("oracle S"), std::string::npos);
    EXPECT_NE(r.out.find("positivity"), std::string::npos);
    auto report = nlohmann::json::parse(slurp(out / "report.json"));
    EXPECT_EQ(report["models"].size(), 2u);
    EXPECT_TRUE(report["models"][0]["vacuum_check"]["all_zero"].get<bool>());
    EXPECT_FALSE(report["models"][1]["vacuum_check"]["all_zero"].get<bool>());
}

TEST_F(CliTest, ReportRejectsMixedConfigs) {
    auto a = dir_ / "a", b = dir_ / "b";
    ASSERT_EQ(invoke({"simulate", "--trials", "2000", "--model", "quantum", "--out", a.string()}).code, EXIT_OK);
    ASSERT_EQ(invoke({"simulate", "--trials", "3000", "--model", "lhv", "--out", b.string()}).code, EXIT_OK);
    auto r = invoke({"report", (a / "records_quantum.csv").string(), (b / "records_lhv.csv").string(), "--out",
                     (dir_ / "r").string()});
    EXPECT_EQ(r.code, EXIT_USAGE);
    EXPECT_NE(r.err.find("incompatible"), std::string::npos) << r.err;

    r = invoke({"report", (a / "records_quantum.csv").string(), (a / "records_quantum.csv").string()});
    EXPECT_EQ(r.code, EXIT_USAGE);
}

TEST_F(CliTest, ReportSchemaAndStarvationErrors) {
    auto bad = dir_ / "records_quantum.csv";
    std::ofstream(bad) << "not,a,records,file\n";
    EXPECT_EQ(invoke({"report", bad.string()}).code, EXIT_USAGE);
    EXPECT_EQ(invoke({"report", (dir_ / "absent.csv").string()}).code, EXIT_USAGE);

    auto a = dir_ / "a";
    ASSERT_EQ(invoke({"simulate", "--trials", "200", "--model", "quantum", "--out", a.string()}).code, EXIT_OK);
    auto r = invoke({"report", (a / "records_quantum.csv").string(), "--out", a.string()});
    EXPECT_EQ(r.code, EXIT_FAILURE_ANALYSIS);
    EXPECT_NE(r.err.find("Subensemble"), std::string::npos) << r.err;
}

TEST(ManifestTest, Json) {
    RunManifest m{protocol::ExperimentConfig{}, {"x.csv"}, std::string(TOOL_VERSION), 1.5};
    auto j = m.to_json();
    EXPECT_EQ(j["artifacts"][0], "x.csv");
    EXPECT_EQ(j["wall_seconds"], 1.5);
    EXPECT_EQ(j["config"]["squeezing"], 0.5);
}

}  // namespace
}  // namespace cvbell::cli
