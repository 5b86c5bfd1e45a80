#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "accel/csv.hpp"
#include "accel/errors.hpp"
#include "accel/harness.hpp"

using namespace accel;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string &name) {
  fs::path dir = fs::path(ACCEL_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const fs::path &p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

CommandOptions quiet_into(const fs::path &dir) {
  static std::ostringstream sink;
  CommandOptions o;
  o.output_dir = dir;
  o.quiet = true;
  o.log = &sink;
  return o;
}

const char *kRgdRayleigh = R"({
  "problem": {"kind": "rayleigh", "n": 10, "seed": 1},
  "methods": [{"method": "RGD", "h": 0.05}],
  "stop": {"max_iter": 100},
  "init": {"seed": 2}
})";

const char *kTwoHtvi = R"({
  "problem": {"kind": "rayleigh", "n": 20, "seed": 3, "spectrum_scale": 0.01, "condition_number": 100},
  "methods": [
    {"method": "HTVI-Direct", "label": "direct", "p": 4, "h": 0.01},
    {"method": "HTVI-Adaptive", "label": "adaptive", "p": 4, "p_ring": 4, "h": 0.01}
  ],
  "stop": {"max_iter": 10},
  "init": {"seed": 4}
})";

struct Captured {
  int status;
  std::string output;
};

Captured run_cli(const std::string &args) {
  const std::string cmd = std::string(ACCEL_CLI_PATH) + " " + args + " 2>&1";
  Captured c{-1, {}};
  FILE *pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  std::array<char, 256> buf{};
  while (fgets(buf.data(), buf.size(), pipe)) c.output += buf.data();
  const int raw = pclose(pipe);
  c.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return c;
}

void expect_config_error(const std::string &json, const std::string &key) {
  try {
    parse_config(json);
    ADD_FAILURE() << "accepted: " << json;
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

}  // namespace

TEST(Config, ParsesDefaults) {
  const ExperimentConfig c = parse_config(kRgdRayleigh);
  EXPECT_EQ(c.problem.n, 10);
  ASSERT_EQ(c.methods.size(), 1u);
  EXPECT_EQ(c.methods[0].method, Method::RGD);
  EXPECT_EQ(c.methods[0].label, "RGD");
  EXPECT_DOUBLE_EQ(c.methods[0].params.h, 0.05);
  EXPECT_EQ(c.stop.max_iter, 100);
  EXPECT_EQ(c.record_every, 1);
}

TEST(Config, ErrorsNameTheKey) {
  expect_config_error(R"({"methods": [{"method": "RGD"}]})", "problem");
  expect_config_error(R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": [{"method": "Nope"}]})",
                      "method");
  expect_config_error(
      R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": [{"method": "RGD", "hh": 1}]})", "hh");
  expect_config_error(R"({"problem": {"kind": "rayleigh", "n": 5, "m": "x"}, "methods": [{"method": "RGD"}]})",
                      "m");
  expect_config_error(R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": []})", "methods");
  expect_config_error(
      R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": [{"method": "RGD"}], "stop": {"max_iter": 0}})",
      "max_iter");
  expect_config_error(
      R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": [{"method": "HTVI-Adaptive", "p": 2, "p_ring": 3}]})",
      "p_ring");
  expect_config_error(R"({"problem": {"kind": "rayleigh", "n": 5}, "methods": [{"method": "RGD"}], "extra": 1})",
                      "extra");
  expect_config_error("{not json", "");
}

TEST(RunCommand, WritesTraceAndSummary) {
  const fs::path dir = scratch("run_basic");
  const auto summaries = cmd_run(parse_config(kRgdRayleigh), quiet_into(dir));
  ASSERT_EQ(summaries.size(), 1u);
  EXPECT_EQ(summaries[0].iterations, 100);
  EXPECT_EQ(line_count(dir / "trace_RGD.csv"), 101u);
  const std::string summary = slurp(dir / "summary.csv");
  EXPECT_EQ(summary.rfind("method,iterations,final_f,final_error,iterations_to_tolerance,termination\n", 0),
            0u);
  EXPECT_NE(summary.find("RGD,100,"), std::string::npos);
  EXPECT_NE(summary.find(",max_iter\n"), std::string::npos);

  const auto trace = csv::read_trace(dir / "trace_RGD.csv");
  ASSERT_EQ(trace.size(), 100u);
  EXPECT_EQ(trace.front().k, 1);
  EXPECT_EQ(trace.back().k, 100);
  EXPECT_TRUE(trace.back().error.has_value());
}

TEST(RunCommand, RerunsAreByteIdentical) {
  const ExperimentConfig c = parse_config(kTwoHtvi);
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  cmd_run(c, quiet_into(a));
  cmd_run(c, quiet_into(b));
  for (const char *f : {"trace_direct.csv", "trace_adaptive.csv", "summary.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty());
  }
}

TEST(RunCommand, IterationsToToleranceMatchesTrace) {
  const fs::path dir = scratch("run_tol");
  ExperimentConfig c = parse_config(R"({
    "problem": {"kind": "rayleigh", "n": 10, "seed": 1, "condition_number": 10},
    "methods": [{"method": "RGD", "h": 0.01}],
    "stop": {"max_iter": 2000},
    "init": {"seed": 2}
  })");
  c.summary_tol = 1e-6;
  const auto s = cmd_run(c, quiet_into(dir));
  const auto trace = csv::read_trace(dir / "trace_RGD.csv");
  ASSERT_TRUE(s[0].iterations_to_tolerance.has_value());
  long first = -1;
  for (const auto &r : trace) {
    if (*r.error <= 1e-6) {
      first = r.k;
      break;
    }
  }
  EXPECT_EQ(*s[0].iterations_to_tolerance, first);
  EXPECT_EQ(iterations_to_tolerance(trace, 1e-6), first);
  EXPECT_FALSE(iterations_to_tolerance(trace, 0.0).has_value() && trace.back().error > 0.0);
}

TEST(Csv, TraceRoundTripsExactly) {
  const fs::path dir = scratch("csv_roundtrip");
  std::vector<TraceRecord> trace = {{1, 0.1, -1.0 / 3.0, 2.0 / 7.0, 1e-17, 3.14159e-200},
                                    {2, 0.2, 1e300, std::nullopt, 0.0, 5e-324}};
  csv::write_trace(dir / "t.csv", trace);
  const auto back = csv::read_trace(dir / "t.csv");
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].k, trace[i].k);
    EXPECT_EQ(back[i].t, trace[i].t);
    EXPECT_EQ(back[i].f_value, trace[i].f_value);
    EXPECT_EQ(back[i].error, trace[i].error);
    EXPECT_EQ(back[i].constraint_violation, trace[i].constraint_violation);
    EXPECT_EQ(back[i].grad_norm, trace[i].grad_norm);
  }
  EXPECT_EQ(slurp(dir / "t.csv").substr(0, std::string(csv::kTraceHeader).size()), csv::kTraceHeader);
}

TEST(Csv, MatrixFiles) {
  const fs::path dir = scratch("csv_matrix");
  Matrix M{{1.5, -2.0}, {1.0 / 3.0, 4e-20}, {0.0, 7.0}};
  csv::write_matrix(dir / "m.csv", M);
  EXPECT_EQ(csv::read_matrix(dir / "m.csv"), M);
  csv::write_text(dir / "bad.csv", "1,2\n3\n");
  EXPECT_THROW(csv::read_matrix(dir / "bad.csv"), Error);
  csv::write_text(dir / "nan.csv", "1,abc\n");
  EXPECT_THROW(csv::read_matrix(dir / "nan.csv"), Error);
  try {
    csv::read_matrix(dir / "missing.csv");
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::IOFailure);
    EXPECT_NE(std::string(e.what()).find("missing.csv"), std::string::npos);
  }
}

TEST(RunCommand, ProcrustesFromFiles) {
  const fs::path dir = scratch("procrustes_files");
  const ProcrustesData d = gen_procrustes(8, 5, 2, 11);
  csv::write_matrix(dir / "A.csv", d.A);
  csv::write_matrix(dir / "B.csv", d.B);
  const std::string json = R"({
    "problem": {"kind": "procrustes", "A_file": "A.csv", "B_file": "B.csv"},
    "methods": [{"method": "RGD", "h": 0.005}],
    "stop": {"max_iter": 50},
    "init": {"seed": 3},
    "reference_factor": 20
  })";
  const ExperimentConfig c = parse_config(json, dir);
  const Experiment e = build_experiment(c);
  EXPECT_EQ(e.problem.rows(), 5);
  EXPECT_EQ(e.problem.cols(), 2);
  ASSERT_TRUE(e.oracle.has_value());
  EXPECT_NEAR(e.oracle->f_star, 0.0, 1e-8);
  const auto s = cmd_run(c, quiet_into(dir / "out"));
  EXPECT_EQ(s[0].iterations, 50);
}

TEST(Cli, MissingMatrixFileFailsWithPath) {
  const fs::path dir = scratch("cli_missing");
  csv::write_text(dir / "cfg.json", R"({
    "problem": {"kind": "procrustes", "A_file": "nowhere_A.csv", "B_file": "nowhere_B.csv"},
    "methods": [{"method": "RGD"}],
    "stop": {"max_iter": 10},
    "init": {"seed": 1}
  })");
  const Captured c = run_cli("run " + (dir / "cfg.json").string() + " --output-dir " + (dir / "out").string());
  EXPECT_NE(c.status, 0);
  EXPECT_NE(c.output.find("nowhere_A.csv"), std::string::npos) << c.output;
  EXPECT_FALSE(fs::exists(dir / "out" / "summary.csv"));
}

TEST(Cli, RunSubcommandWritesOutputs) {
  const fs::path dir = scratch("cli_run");
  csv::write_text(dir / "cfg.json", kRgdRayleigh);
  const Captured c = run_cli("run " + (dir / "cfg.json").string() + " --output-dir " +
                             (dir / "out").string() + " --record-every 10 --quiet");
  EXPECT_EQ(c.status, 0) << c.output;
  EXPECT_EQ(line_count(dir / "out" / "trace_RGD.csv"), 11u);
}

TEST(Cli, BadInvocations) {
  EXPECT_NE(run_cli("").status, 0);
  EXPECT_NE(run_cli("frobnicate x.json").status, 0);
  const Captured missing = run_cli("run /definitely/not/here.json");
  EXPECT_NE(missing.status, 0);
  EXPECT_NE(missing.output.find("/definitely/not/here.json"), std::string::npos);
}

TEST(CompareCommand, AlignedColumns) {
  const fs::path dir = scratch("compare");
  cmd_compare(parse_config(kTwoHtvi), quiet_into(dir));
  std::ifstream in(dir / "compare.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,t_direct,error_direct,t_adaptive,error_adaptive");
  int rows = 0;
  for (std::string line; std::getline(in, line);) {
    ++rows;
    const auto cells = csv::split_line(line);
    ASSERT_EQ(cells.size(), 5u);
    EXPECT_EQ(cells[0], std::to_string(rows));
    EXPECT_EQ(cells[1], cells[3]);
    EXPECT_EQ(cells[2], cells[4]);
  }
  EXPECT_EQ(rows, 10);
}

TEST(CompareCommand, Rejections) {
  ExperimentConfig one = parse_config(kRgdRayleigh);
  EXPECT_THROW(cmd_compare(one, quiet_into(scratch("compare_one"))), Error);
  ExperimentConfig c = parse_config(kTwoHtvi);
  c.methods[1].record_every = 2;
  try {
    cmd_compare(c, quiet_into(scratch("compare_mismatch")));
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
  }
}

TEST(SweepCommand, OneTracePerValue) {
  const fs::path dir = scratch("sweep");
  ExperimentConfig c = parse_config(kTwoHtvi);
  c.methods.resize(1);
  const auto rows = cmd_sweep(c, SweepParam::P, {4, 6, 8}, quiet_into(dir));
  EXPECT_EQ(rows.size(), 3u);
  for (const char *v : {"4", "6", "8"}) {
    EXPECT_TRUE(fs::exists(dir / (std::string("sweep_direct_p_") + v + ".csv"))) << v;
  }
  EXPECT_EQ(line_count(dir / "sweep_summary.csv"), 4u);
}

TEST(SweepCommand, SingleValueMatchesRun) {
  const fs::path sweep_dir = scratch("sweep_single"), run_dir = scratch("sweep_single_run");
  ExperimentConfig c = parse_config(kTwoHtvi);
  c.methods.erase(c.methods.begin());
  cmd_sweep(c, SweepParam::H, {0.01}, quiet_into(sweep_dir));
  cmd_run(c, quiet_into(run_dir));
  EXPECT_EQ(slurp(sweep_dir / "sweep_adaptive_h_0.01.csv"), slurp(run_dir / "trace_adaptive.csv"));
}

TEST(SweepCommand, InvalidValueRejectedBeforeRunning) {
  const fs::path dir = scratch("sweep_invalid");
  ExperimentConfig c = parse_config(kTwoHtvi);
  try {
    cmd_sweep(c, SweepParam::P, {4, 0}, quiet_into(dir));
    ADD_FAILURE();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConfigInvalid);
  }
  EXPECT_FALSE(fs::exists(dir / "sweep_direct_p_4.csv"));
  EXPECT_THROW(parse_sweep_param("q"), Error);
}

TEST(Labels, Sanitized) {
  EXPECT_EQ(sanitize_label("HTVI-Adaptive p=5/2"), "HTVI-Adaptive_p_5_2");
}
