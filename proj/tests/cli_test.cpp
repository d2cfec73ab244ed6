// Copyright 2026 The cpseq Authors
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

#include "cpseq_cli.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gtest/gtest.h"

using namespace cpseq;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) { return std::string(CPSEQ_TEST_TMPDIR) + "/" + name; }

std::vector<std::vector<double>> parse_csv_numbers(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST(ParseAngle, Forms) {
  EXPECT_DOUBLE_EQ(cli::parse_angle("pi"), kPi);
  EXPECT_DOUBLE_EQ(cli::parse_angle("2pi"), 2 * kPi);
  EXPECT_DOUBLE_EQ(cli::parse_angle("pi/2"), kPi / 2);
  EXPECT_DOUBLE_EQ(cli::parse_angle("-pi"), -kPi);
  EXPECT_DOUBLE_EQ(cli::parse_angle("3pi/4"), 3 * kPi / 4);
  EXPECT_DOUBLE_EQ(cli::parse_angle("3*pi/2"), 3 * kPi / 2);
  EXPECT_DOUBLE_EQ(cli::parse_angle("0.5pi"), 0.5 * kPi);
  EXPECT_DOUBLE_EQ(cli::parse_angle("1.25"), 1.25);
  EXPECT_DOUBLE_EQ(cli::parse_angle("1e-3"), 1e-3);
  for (const char* bad : {"", "pie", "pi/0", "two", "1/", "--1"}) EXPECT_THROW(cli::parse_angle(bad), DomainError) << bad;
}

TEST(Design, Bb1Phase) {
  const auto r = run({"design", "--family", "wn", "--n", "1", "--theta", "pi", "--alpha", "0"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("phi1 = 1.82347658"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("3.1415926535897931 1.82347658"), std::string::npos) << r.out;
}

TEST(Design, W222Json) {
  const auto r = run({"design", "--family", "fivepulse", "--p", "2", "--q", "2", "--r", "2", "--theta", "pi", "--alpha",
                      "pi", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["target"]["theta"].get<double>(), kPi);
  bool found = false;
  for (const auto& d : j["designs"]) {
    if (!d["closed_form"].get<bool>() || d["branch"].get<int>() != 1) continue;
    found = true;
    EXPECT_NEAR(d["phases"][1].get<double>(), std::acos(-3.0 / 8.0), 1e-12);
    EXPECT_EQ(d["pulses"].size(), 5u);
  }
  EXPECT_TRUE(found);
}

TEST(Design, InfeasibleTargetExitsTwo) {
  const auto r = run({"design", "--family", "wn", "--n", "1", "--theta", "5pi"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("infeasible"), std::string::npos);
}

TEST(Design, BadInputNeverCrashes) {
  EXPECT_EQ(run({"design", "--family", "zz"}).code, 2);
  EXPECT_EQ(run({"design", "--theta", "banana"}).code, 2);
  EXPECT_EQ(run({"design", "--family", "fivepulse", "--p", "1", "--q", "1", "--r", "1"}).code, 2);
  EXPECT_EQ(run({"nonsense"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(ReferenceTable, AllRowsWithinTolerance) {
  const auto r = run({"table1"});
  EXPECT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "label,fitted_C,fitted_order,paper_C,rel_err");
  EXPECT_NE(r.out.find("W1,4.69"), std::string::npos);
  EXPECT_NE(r.out.find(",72.3,"), std::string::npos);
  EXPECT_NE(r.out.find(",877.8,"), std::string::npos);
}

TEST(Sweep, PlainAndBb1Values) {
  const auto plain = run({"sweep", "--plain", "--eps-min", "0", "--eps-max", "0.2", "--count", "3", "--format", "csv"});
  ASSERT_EQ(plain.code, 0) << plain.err;
  EXPECT_EQ(plain.out.substr(0, plain.out.find('\n')), "epsilon,fidelity,infidelity");
  const auto rows = parse_csv_numbers(plain.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[2][1], 0.951057, 1e-6);

  const auto bb1 = run({"sweep", "--family", "wn", "--eps-min", "0", "--eps-max", "0.1", "--count", "2", "--format", "csv"});
  ASSERT_EQ(bb1.code, 0) << bb1.err;
  const auto b = parse_csv_numbers(bb1.out);
  EXPECT_EQ(b[0][1], 1.0);
  EXPECT_NEAR(b[1][1], 1 - 4.694e-6, 1e-7);
}

TEST(Sweep, DefaultGridIsByteStable) {
  const auto a = run({"sweep", "--family", "wm", "--m", "2", "--alpha", "pi", "--format", "csv"});
  const auto b = run({"sweep", "--family", "wm", "--m", "2", "--alpha", "pi", "--format", "csv"});
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(parse_csv_numbers(a.out).size(), 60u);
  EXPECT_EQ(a.out.find('\r'), std::string::npos);
}

TEST(Sweep, WritesFilesAndBaseline) {
  const std::string out = tmp_path("bb1_sweep.csv");
  const std::string base = tmp_path("plain_sweep.csv");
  const auto r = run({"sweep", "--family", "wn", "--format", "csv", "--out", out, "--baseline", base});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream f(out), g(base);
  std::stringstream fs, gs;
  fs << f.rdbuf();
  gs << g.rdbuf();
  EXPECT_EQ(parse_csv_numbers(fs.str()).size(), 60u);
  const auto plain_rows = parse_csv_numbers(gs.str());
  EXPECT_NEAR(plain_rows.back()[1], std::cos(0.15 * kPi), 1e-12);
}

TEST(Sweep, UnwritableOutputExitsThree) {
  EXPECT_EQ(run({"sweep", "--plain", "--out", "/nonexistent-dir/x.csv"}).code, 3);
  EXPECT_EQ(run({"sweep", "--sequence", "/nonexistent-dir/seq.txt"}).code, 3);
}

TEST(Simulate, ReportsFidelity) {
  const auto r = run({"simulate", "--family", "wn", "--eps", "0.1", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["infidelity"].get<double>(), 4.694e-6, 1e-7);
  EXPECT_NEAR(j["plain_fidelity"].get<double>(), std::cos(0.05 * kPi), 1e-12);
  EXPECT_EQ(j["pulses"].size(), 4u);
}

TEST(Coeff, PlainAndBb1) {
  const auto p = run({"coeff", "--plain", "--format", "csv"});
  ASSERT_EQ(p.code, 0) << p.err;
  EXPECT_NE(p.out.find("plain,1.2337"), std::string::npos) << p.out;
  const auto b = run({"coeff", "--family", "wn", "--format", "json"});
  const auto j = nlohmann::json::parse(b.out);
  EXPECT_NEAR(j[0]["fitted_C"].get<double>(), 4.694283, 0.01);
  EXPECT_NEAR(j[0]["fitted_order"].get<double>(), 6.0, 0.05);
}

TEST(Verify, ReferenceFamiliesPass) {
  const auto a = run({"verify", "--family", "wn", "--n", "1"});
  EXPECT_EQ(a.code, 0) << a.out;
  EXPECT_NE(a.out.find("PASS BB1 analytic-C"), std::string::npos);
  const auto b = run({"verify", "--family", "fivepulse", "--p", "1", "--q", "2", "--r", "1", "--alpha", "pi"});
  EXPECT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(b.out.find("FAIL"), std::string::npos);
}

TEST(Verify, BrokenSequenceFileFails) {
  const std::string path = tmp_path("broken.txt");
  {
    std::ofstream f(path);
    f << "# BB1 with a hand-edited second phase\n"
      << "3.1415926535897931 1.8234765819369751\n"
      << "6.2831853071795862 5.0\n"
      << "3.1415926535897931 1.8234765819369751\n";
  }
  const auto r = run({"verify", "--sequence", path, "--theta", "pi", "--alpha", "0"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("FAIL sequence derivative"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("PASS sequence identity"), std::string::npos) << r.out;
}

TEST(Verify, DesignedSequenceFileRoundTrips) {
  const std::string path = tmp_path("w2.txt");
  const auto d = run({"design", "--family", "wm", "--m", "2", "--alpha", "pi", "--out", path});
  ASSERT_EQ(d.code, 0) << d.err;
  const auto r = run({"verify", "--sequence", path, "--alpha", "pi"});
  EXPECT_EQ(r.code, 0) << r.out;
}
