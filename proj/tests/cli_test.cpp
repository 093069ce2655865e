// Copyright 2026 The mxkit Authors
// SPDX-License-Identifier: Apache-2.0
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

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "golden.hpp"
#include "mxkit/areamodel.hpp"
#include "mxkit/metrics.hpp"
#include "mxkit/random.hpp"
#include "mxkit/tensor_io.hpp"
#include "sweep.hpp"

namespace mxkit::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

/// "key\tvalue" lines of quantize output.
std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    const auto tab = line.find('\t');
    if (tab != std::string::npos) kv[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return kv;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mxkit_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    ::unsetenv("MXKIT_CALIBRATION");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

Tensor gaussian(std::uint64_t seed, std::vector<std::size_t> dims) {
  Rng rng(seed);
  Tensor t = Tensor::zeros(std::move(dims));
  for (float& x : t.data) x = static_cast<float>(rng.gaussian());
  return t;
}

TEST_F(CliTest, QuantizeConstantOnesIsLossless) {
  Tensor t = Tensor::zeros({4, 64});
  for (float& x : t.data) x = 1.0f;
  write_tensor_file(path("ones.mxt"), t);
  const Outcome r = invoke({"quantize", path("ones.mxt"), "--format", "int8", "--block-size", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto kv = key_values(r.out);
  EXPECT_EQ(kv.at("mse"), "0");
  EXPECT_EQ(kv.at("sqnr_db"), "inf");
}

TEST_F(CliTest, QuantizeMatchesLibrary) {
  const Tensor t = gaussian(301, {3, 5, 40});
  write_tensor_file(path("t.mxt"), t);
  const Outcome r = invoke({"quantize", path("t.mxt"), "-o", path("t.mxq"), "--format", "e2m3",
                            "--block-size", "16", "--axis", "1"});
  ASSERT_EQ(r.code, 0) << r.err;

  const QuantizedTensor want = quantize_tensor(t, QuantScheme::mx(formats::e2m3(), 16), 1);
  std::ifstream is(path("t.mxq"), std::ios::binary);
  const QuantizedTensor got = read_quantized(is);
  EXPECT_EQ(got.dims, want.dims);
  EXPECT_EQ(got.axis, 1u);
  EXPECT_EQ(got.scheme, want.scheme);
  EXPECT_EQ(got.codes, want.codes);
  EXPECT_EQ(got.scales, want.scales);

  const ErrorMetrics m = error_metrics(t, dequantize_tensor(want));
  const auto kv = key_values(r.out);
  EXPECT_EQ(std::stod(kv.at("mse")), m.mse);
  EXPECT_EQ(std::stod(kv.at("max_abs")), m.max_abs);
  EXPECT_EQ(std::stod(kv.at("sqnr_db")), m.sqnr_db);
}

TEST_F(CliTest, QuantizeSchemeFlags) {
  const Tensor t = gaussian(302, {8, 32});
  write_tensor_file(path("t.mxt"), t);
  const Outcome r = invoke({"quantize", path("t.mxt"), "-o", path("t.mxq"), "--format", "e4m3",
                            "--regime", "per-channel", "--scale", "fixed:0x7f", "--mode",
                            "saturating", "--axis", "0"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream is(path("t.mxq"), std::ios::binary);
  const QuantizedTensor got = read_quantized(is);
  EXPECT_EQ(got.scheme.regime, Regime::PerChannel);
  EXPECT_EQ(got.scheme.element, parse_element_format("e4m3:sat"));
  EXPECT_EQ(got.scheme.scale_rule, ScaleRule::fixed_scale(ScaleE8M0::one()));
}

TEST_F(CliTest, QuantizeRejectsBadInput) {
  spit(path("bad.mxt"), std::string("MXT2\x01\x00\x00\x00\x01\x00\x00\x00\x00\x00\x80\x3f", 16));
  const Outcome r = invoke({"quantize", path("bad.mxt")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("error"), std::string::npos);

  write_tensor_file(path("t.mxt"), gaussian(303, {4, 8}));
  EXPECT_EQ(invoke({"quantize", path("t.mxt"), "--format", "e9m9"}).code, kExitError);
  EXPECT_EQ(invoke({"quantize", path("t.mxt"), "--block-size", "24"}).code, kExitError);
  EXPECT_EQ(invoke({"quantize", path("t.mxt"), "--scale", "fixed:300"}).code, kExitError);
  EXPECT_EQ(invoke({"quantize", path("t.mxt"), "--mode", "wrap"}).code, kExitError);
  EXPECT_EQ(invoke({"quantize", path("t.mxt"), "--axis", "2"}).code, kExitError);
  EXPECT_EQ(invoke({"quantize", path("missing.mxt")}).code, kExitError);
  EXPECT_EQ(invoke({"frobnicate"}).code, kExitError);
  EXPECT_EQ(invoke({}).code, kExitError);
}

TEST_F(CliTest, BinaryExitsTwoOnMalformedMagic) {
  spit(path("bad.mxt"), "NOPE0000");
  const std::string cmd = std::string(MXKIT_CLI_PATH) + " quantize " + path("bad.mxt") + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

TEST(Pareto, DominatedConfigIsNotMarked) {
  std::vector<SweepRow> rows(3);
  rows[0].format = "a";
  rows[0].mse = 1.0;
  rows[0].area = 10.0;
  rows[1].format = "b";  // worse on both axes than a
  rows[1].mse = 2.0;
  rows[1].area = 20.0;
  rows[2].format = "c";  // trades area for error
  rows[2].mse = 0.5;
  rows[2].area = 30.0;
  mark_pareto(rows, "mse");
  EXPECT_TRUE(rows[0].pareto);
  EXPECT_FALSE(rows[1].pareto);
  EXPECT_TRUE(rows[2].pareto);

  // SQNR is higher-is-better.
  rows[0].sqnr_db = 30.0;
  rows[1].sqnr_db = 20.0;
  rows[2].sqnr_db = 10.0;
  mark_pareto(rows, "sqnr_db");
  EXPECT_TRUE(rows[0].pareto);
  EXPECT_FALSE(rows[1].pareto);
  EXPECT_FALSE(rows[2].pareto);
}

TEST_F(CliTest, SweepTwoConfigsDominance) {
  // int8 per-tensor against int8 per-channel on one tensor: the sweep must
  // mark exactly the non-dominated rows.
  spit(path("s.json"), R"({"formats": ["int8", "int4"], "regimes": ["per-tensor"],
                           "random": {"count": 2, "shape": [16, 64]}, "seed": 3})");
  const Outcome r = invoke({"sweep", path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"format", "regime", "block_size", "mse", "median_mse",
                                                "max_abs", "sqnr_db", "area", "fp8_warning", "pareto"}));
  // int4 is cheaper, int8 more accurate: neither dominates.
  EXPECT_EQ(rows[1][0], "int4");
  EXPECT_EQ(rows[2][0], "int8");
  EXPECT_LT(std::stod(rows[1][7]), std::stod(rows[2][7]));
  EXPECT_GT(std::stod(rows[1][3]), std::stod(rows[2][3]));
  EXPECT_EQ(rows[1][9], "1");
  EXPECT_EQ(rows[2][9], "1");

  // Same format, per-channel versus MX k=8 under the proxy calibration:
  // MX is both cheaper and more accurate here.
  spit(path("d.json"), R"({"formats": ["int8"], "regimes": ["per-channel", "mx"], "block_sizes": [8],
                           "random": {"count": 2, "shape": [16, 64]}, "seed": 3})");
  const Outcome d = invoke({"sweep", path("d.json")});
  ASSERT_EQ(d.code, 0) << d.err;
  const auto drows = csv_rows(d.out);
  ASSERT_EQ(drows.size(), 3u);
  EXPECT_EQ(drows[1][1], "per-channel");
  EXPECT_EQ(drows[2][1], "mx");
  ASSERT_LT(std::stod(drows[2][3]), std::stod(drows[1][3]));
  ASSERT_LT(std::stod(drows[2][7]), std::stod(drows[1][7]));
  EXPECT_EQ(drows[1][9], "0");
  EXPECT_EQ(drows[2][9], "1");
}

TEST_F(CliTest, SweepRejectsBadSpecs) {
  spit(path("empty.json"), R"({"formats": [], "random": {"count": 1}})");
  Outcome r = invoke({"sweep", path("empty.json")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("formats"), std::string::npos);

  // Every invalid configuration is listed, not just the first.
  spit(path("bad.json"), R"({"formats": ["int8", "e7m7"], "block_sizes": [3, 32, 1024],
                             "random": {"count": 1}})");
  r = invoke({"sweep", path("bad.json")});
  EXPECT_EQ(r.code, kExitError);
  EXPECT_NE(r.err.find("e7m7"), std::string::npos);
  EXPECT_NE(r.err.find("block size 3 "), std::string::npos);
  EXPECT_NE(r.err.find("block size 1024"), std::string::npos);

  spit(path("noinput.json"), R"({"formats": ["int8"]})");
  EXPECT_EQ(invoke({"sweep", path("noinput.json")}).code, kExitError);
  spit(path("syntax.json"), "{\"formats\": [");
  EXPECT_EQ(invoke({"sweep", path("syntax.json")}).code, kExitError);
  spit(path("metric.json"), R"({"formats": ["int8"], "random": {"count": 1}, "metric": "psnr"})");
  EXPECT_EQ(invoke({"sweep", path("metric.json")}).code, kExitError);
}

TEST_F(CliTest, SweepMxintMedianMseNonIncreasingInBits) {
  spit(path("s.json"), R"({"formats": ["int3", "int4", "int5", "int6", "int7", "int8"],
                           "block_sizes": [32], "random": {"count": 9, "shape": [8, 512]},
                           "seed": 11, "output": "out.csv"})");
  const Outcome r = invoke({"sweep", path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(slurp(path("out.csv")));
  ASSERT_EQ(rows.size(), 7u);
  for (std::size_t i = 2; i < rows.size(); ++i) {
    EXPECT_LE(std::stod(rows[i][4]), std::stod(rows[i - 1][4])) << rows[i][0];
  }
}

TEST_F(CliTest, SweepIsDeterministicAndReadsInputs) {
  write_tensor_file(path("a.mxt"), gaussian(304, {4, 4, 64}));
  spit(path("s.json"), R"({"formats": ["e2m1", "int6"], "block_sizes": [8, 32],
                           "regimes": ["mx", "per-tensor"], "inputs": ["a.mxt"],
                           "random": {"count": 3, "shape": [4, 4, 64]}, "seed": 5})");
  const Outcome a = invoke({"sweep", path("s.json")});
  const Outcome b = invoke({"sweep", path("s.json")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(csv_rows(a.out).size(), 1u + 2 * 3);
  const Outcome c = invoke({"sweep", path("s.json"), "--seed", "6"});
  ASSERT_EQ(c.code, 0);
  EXPECT_NE(a.out, c.out);
}

TEST_F(CliTest, SweepUsesCalibrationPrecedence) {
  spit(path("cal.txt"), "int_adder * 0 0\nmultiplier * 1 0\nfp_adder_tree * 0 0\nnormalizer * 0 0\n");
  spit(path("s.json"), R"({"formats": ["int8"], "regimes": ["per-tensor"],
                           "random": {"count": 1, "shape": [2, 64]}})");
  ::setenv("MXKIT_CALIBRATION", path("cal.txt").c_str(), 1);
  const Outcome r = invoke({"sweep", path("s.json")});
  ::unsetenv("MXKIT_CALIBRATION");
  ASSERT_EQ(r.code, 0) << r.err;
  // One linear layer, 64 inputs, 1 output: 64 multipliers at unit cost.
  EXPECT_EQ(csv_rows(r.out)[1][7], "64");

  spit(path("e2m1_cal.txt"), "int_adder * 1 0\nmultiplier e2m1 1 0\nfp_adder_tree e2m1 1 0\nnormalizer e2m1 1 0\n");
  const Outcome m = invoke({"sweep", path("s.json"), "--calibration", path("e2m1_cal.txt")});
  EXPECT_EQ(m.code, kExitError);
  EXPECT_NE(m.err.find("int8"), std::string::npos);
}

TEST_F(CliTest, GoldenIsDeterministicAndSelfChecking) {
  const Outcome a = invoke({"golden", "--count", "200", "--seed", "9"});
  const Outcome b = invoke({"golden", "--count", "200", "--seed", "9", "-o", path("g.tsv")});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, slurp(path("g.tsv")));
  EXPECT_NE(a.out, invoke({"golden", "--count", "200", "--seed", "10"}).out);

  const Outcome v = invoke({"golden", "--verify", path("g.tsv")});
  EXPECT_EQ(v.code, 0) << v.err;
  EXPECT_NE(v.out.find("200 records, 0 mismatches"), std::string::npos);
}

TEST_F(CliTest, GoldenDotAllOnesInt8) {
  const std::string inputs = "dot\tint8\t4\t7f\t40,40,40,40\t7f\t40,40,40,40";
  const std::string line = recompute_golden_record(inputs + "\t0\t0\t00\t-\t0");
  // 4 * 1.0 * 1.0 at an LSB of 2^-12.
  EXPECT_EQ(line.substr(0, inputs.size() + 1), inputs + "\t");
  std::istringstream fields(line.substr(inputs.size() + 1));
  std::string acc;
  std::getline(fields, acc, '\t');
  EXPECT_EQ(std::stoull(acc, nullptr, 16), 16384u);
}

TEST_F(CliTest, GoldenSubsetsAndFlagValidation) {
  const Outcome r = invoke({"golden", "--op", "normadd,quantize", "--format", "e2m1", "--count", "50",
                            "--block-size", "8"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream is(r.out);
  std::size_t records = 0;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    ++records;
    EXPECT_TRUE(line.rfind("normadd\t", 0) == 0 || line.rfind("quantize\te2m1\t8\t", 0) == 0) << line;
  }
  EXPECT_EQ(records, 50u);
  EXPECT_EQ(invoke({"golden", "--op", "matmul"}).code, kExitError);
  EXPECT_EQ(invoke({"golden", "--format", "int9"}).code, kExitError);
  EXPECT_EQ(invoke({"golden", "--block-size", "6"}).code, kExitError);
}

TEST_F(CliTest, GoldenVerifyFlagsTampering) {
  const fs::path shipped = fs::path(MXKIT_SOURCE_DIR) / "golden" / "mx_golden_v1.tsv";
  std::string text = slurp(shipped);
  ASSERT_FALSE(text.empty());
  EXPECT_EQ(invoke({"golden", "--verify", shipped.string()}).code, 0);

  const auto pos = text.find("\nquantize\t");
  ASSERT_NE(pos, std::string::npos);
  const auto eol = text.find('\n', pos + 1);
  text[eol - 1] = text[eol - 1] == '0' ? '1' : '0';  // last code digit
  spit(path("t.tsv"), text);
  const Outcome r = invoke({"golden", "--verify", path("t.tsv")});
  EXPECT_EQ(r.code, kExitMismatch);
  EXPECT_NE(r.err.find("mismatch"), std::string::npos);

  spit(path("junk.tsv"), "dot\tint8\t4\n");
  EXPECT_NE(invoke({"golden", "--verify", path("junk.tsv")}).code, 0);
}

TEST_F(CliTest, AreaMatchesLibrary) {
  spit(path("net.layers"), "# one layer\nconv2d 8 64 3 3 4 4\n");
  const Outcome r = invoke({"area", path("net.layers"), "--format", "int8", "--block-size", "32"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::vector<LayerShape> layers = {LayerShape::conv2d(8, 64, 3, 3, 4, 4)};
  const NetworkArea net =
      estimate_network_area(layers, QuantScheme::mx(formats::int8(), 32), AreaCalibration::proxy());
  std::istringstream is(r.out);
  std::string line, last;
  while (std::getline(is, line)) last = line;
  EXPECT_EQ(last.rfind("total\t", 0), 0u);
  EXPECT_NE(last.find("\t" + std::to_string(net.total.multipliers) + "\t"), std::string::npos);
  std::ostringstream total;
  total << "\t" << static_cast<long long>(net.total.total());
  EXPECT_EQ(last.substr(last.rfind('\t')), total.str());

  // Per-tensor has no normalising adders inside the reduction.
  const Outcome pt = invoke({"area", path("net.layers"), "--regime", "per-tensor"});
  ASSERT_EQ(pt.code, 0);
  EXPECT_NE(pt.out.find("total\t73728\t73600\t0\t"), std::string::npos) << pt.out;
}

TEST_F(CliTest, AreaWarnsOnFp8AndReportsMissingCalibration) {
  spit(path("net.layers"), "linear 64 10\n");
  const Outcome w = invoke({"area", path("net.layers"), "--format", "e5m2"});
  ASSERT_EQ(w.code, 0) << w.err;
  EXPECT_NE(w.err.find("warning"), std::string::npos);
  EXPECT_EQ(invoke({"area", path("net.layers"), "--format", "e2m1"}).err.find("warning"),
            std::string::npos);

  spit(path("cal.txt"), "int_adder * 1 0\nmultiplier int8 2 0\nfp_adder_tree int8 1 0\nnormalizer int8 1 0\n");
  const Outcome ok = invoke({"area", path("net.layers"), "--calibration", path("cal.txt")});
  EXPECT_EQ(ok.code, 0) << ok.err;
  const Outcome m = invoke({"area", path("net.layers"), "--format", "e4m3", "--calibration", path("cal.txt")});
  EXPECT_EQ(m.code, kExitError);
  EXPECT_NE(m.err.find("e4m3"), std::string::npos);

  spit(path("bad.layers"), "conv2d 1 2 3\n");
  EXPECT_EQ(invoke({"area", path("bad.layers")}).code, kExitError);
}

TEST_F(CliTest, CalibrationRoundTrips) {
  const Outcome r = invoke({"calibration", "-o", path("proxy.txt")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(load_calibration_file(path("proxy.txt")), AreaCalibration::proxy());
  EXPECT_EQ(invoke({"calibration"}).out, slurp(path("proxy.txt")));
}

}  // namespace
}  // namespace mxkit::cli
