#include "ietidp/error.hpp"
#include "ietidp/experiment.hpp"
#include "ietidp/solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace ietidp;
namespace fs = std::filesystem;

namespace {

std::string config(const std::string& domain, const std::string& sweep, const std::string& extra = "") {
  return R"({"schema": "ietidp.experiment/1", "name": "t", "domain": )" + domain + R"(, "sweep": )" + sweep + extra + "}";
}

const std::string kRing = R"({"type": "ring"})";
const std::string kTGrid = R"({"type": "square-tgrid"})";

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("ietidp_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesSweepsAndDefaults) {
  const ExperimentConfig c = parse_config(config(kRing, R"({"p": [2, 3], "r": [1, 2], "s": "p-1"})",
                                                 R"(, "solver": {"delta": 6, "rtol": 1e-9, "threads": 2})"));
  EXPECT_EQ(c.degrees, (std::vector<int>{2, 3}));
  EXPECT_EQ(c.refinements, (std::vector<int>{1, 2}));
  ASSERT_EQ(c.smoothness.size(), 1u);
  EXPECT_EQ(c.smoothness[0].kind, SmoothnessSpec::Kind::MaxMinusOne);
  EXPECT_EQ(c.delta, 6.0);
  EXPECT_EQ(c.rtol, 1e-9);
  EXPECT_EQ(c.threads, 2);
  EXPECT_EQ(c.maxit, 500);
  EXPECT_EQ(build_domain(c.domain).num_patches(), 20);

  const ExperimentConfig t = parse_config(config(kTGrid, R"({"p": [2], "r": [1], "s": [0, "p-1"]})"));
  EXPECT_EQ(build_domain(t.domain).num_patches(), 3);
  EXPECT_EQ(t.smoothness.size(), 2u);
}

TEST(Config, ThinRingLayer) {
  const ExperimentConfig c =
      parse_config(config(R"({"type": "thin-ring", "thin_width": 0.02, "thin_layer": 1})", R"({"p": [2], "r": [1]})"));
  const MultiPatch mp = build_domain(c.domain);
  double min_width = 1e300;
  for (int k = 0; k < mp.num_patches(); ++k)
    min_width = std::min(min_width, mp.geometry(k).point(0.5, 1).norm() - mp.geometry(k).point(0.5, 0).norm());
  EXPECT_NEAR(min_width, 0.02, 1e-12);
}

TEST(Config, RejectsInvalidInput) {
  const std::string sweep = R"({"p": [2], "r": [1]})";
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"schema": "other/1", "domain": {"type": "ring"}})"), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, sweep, R"(, "solvr": {})")), ConfigError);
  EXPECT_THROW(parse_config(config(R"({"type": "ring", "widht": [1]})", sweep)), ConfigError);
  EXPECT_THROW(parse_config(config(R"({"type": "disk"})", sweep)), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, R"({"p": [1], "r": [1]})")), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, R"({"p": [2], "r": [-1]})")), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, R"({"p": [2], "r": [1], "s": "p-2"})")), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, sweep, R"(, "solver": {"delta": 0})")), ConfigError);
  EXPECT_THROW(parse_config(config(kRing, sweep, R"(, "solver": {"rtol": 1.5})")), ConfigError);
  EXPECT_THROW(parse_config(config(kTGrid, sweep, R"(, "domain2": 1)")), ConfigError);
}

TEST(Experiment, EmptySweepGivesEmptyTable) {
  const ExperimentConfig c = parse_config(config(kRing, R"({"p": [], "r": []})"));
  const ExperimentResult res = run_experiment(c);
  EXPECT_TRUE(res.rows.empty());
  EXPECT_TRUE(res.ok());
  EXPECT_NE(res.markdown(c).find("empty"), std::string::npos);
}

TEST(Experiment, TableOneShapeAndLibraryAgreement) {
  ExperimentConfig c = parse_config(config(kRing, R"({"p": [2, 3], "r": [1, 2], "s": "p-1"})"));
  const ExperimentResult res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_TRUE(res.ok());
  // (p, s, r) order
  EXPECT_EQ(res.rows[0].p, 2);
  EXPECT_EQ(res.rows[0].r, 1);
  EXPECT_EQ(res.rows[1].r, 2);
  EXPECT_EQ(res.rows[2].p, 3);
  EXPECT_EQ(res.rows[2].s, 2);

  const double pi = std::numbers::pi;
  const SourceFunction f = [pi](const Eigen::Vector2d& x) {
    return 2 * pi * pi * std::sin(pi * x.x()) * std::sin(pi * x.y());
  };
  const MultiPatch base = default_ring();
  for (const ExperimentRow& row : res.rows) {
    const MultiPatch mp = base.discretize(row.p, row.r, row.s);
    const SolveReport rep = IetiSolver(mp, f).solve();
    EXPECT_EQ(rep.iterations, row.iterations);
    EXPECT_EQ(rep.kappa, row.kappa);
    EXPECT_EQ(rep.num_dofs, row.dofs);
  }

  // re-running reproduces the table up to the timing columns
  const ExperimentResult again = run_experiment(c);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    EXPECT_EQ(again.rows[i].iterations, res.rows[i].iterations);
    EXPECT_EQ(again.rows[i].kappa, res.rows[i].kappa);
    EXPECT_EQ(again.rows[i].record.substr(0, 40), res.rows[i].record.substr(0, 40));
  }
  const std::string md = res.markdown(c);
  EXPECT_NE(md.find("r \\ p"), std::string::npos);
}

TEST(Experiment, TableThreeIsTriangular) {
  const ExperimentConfig c = parse_config(config(kRing, R"({"p": [2, 3], "r": [1], "s": "all"})"));
  const ExperimentResult res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 5u);
  const std::string md = res.markdown(c);
  EXPECT_NE(md.find("s \\ p"), std::string::npos);
  // pivot: one row per s, p=2 has no s=2 entry
  const auto pivot = md.substr(md.find("s \\ p"));
  int lines = 0;
  for (char ch : pivot) lines += ch == '\n';
  EXPECT_EQ(lines, 2 + 3);
}

TEST(Experiment, OracleCheckAndOutputs) {
  ExperimentConfig c = parse_config(config(kTGrid, R"({"p": [2], "r": [2], "s": "p-1"})",
                                           R"(, "solver": {"rtol": 1e-10}, "oracle_check": 5000)"));
  c.output_dir = scratch_dir("outputs");
  const ExperimentResult res = run_experiment(c);
  ASSERT_EQ(res.rows.size(), 1u);
  ASSERT_TRUE(res.rows[0].oracle_error.has_value());
  EXPECT_LT(*res.rows[0].oracle_error, 1e-8);
  write_outputs(c, res);
  EXPECT_TRUE(fs::exists(c.output_dir / "t.csv"));
  EXPECT_TRUE(fs::exists(c.output_dir / "t.md"));
  const std::string jsonl = read(c.output_dir / "t.jsonl");
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 1);
  EXPECT_NE(read(c.output_dir / "t.csv").find("p,r,s,dofs"), std::string::npos);
}

TEST(Geometry, RingPolylines) {
  const ExperimentConfig c = parse_config(config(kRing, R"({"p": [2], "r": [1]})"));
  const fs::path out = scratch_dir("geometry") / "ring.txt";
  emit_geometry(c, out);
  std::istringstream in(read(out));
  std::string line;
  int patches = 0;
  double rmin = 1e300, rmax = 0;
  while (std::getline(in, line)) {
    if (line.rfind("patch", 0) == 0) {
      ++patches;
      continue;
    }
    if (line.empty() || line[0] == '#' || line.rfind("junction", 0) == 0) continue;
    std::istringstream ls(line);
    double x = 0, y = 0;
    ls >> x >> y;
    rmin = std::min(rmin, std::hypot(x, y));
    rmax = std::max(rmax, std::hypot(x, y));
  }
  EXPECT_EQ(patches, 20);
  EXPECT_NEAR(rmin, 1.0, 1e-10);
  EXPECT_NEAR(rmax, 2.0, 1e-10);
}

TEST(Geometry, TGridPolylines) {
  const ExperimentConfig c = parse_config(config(kTGrid, R"({"p": [2], "r": [1]})"));
  const fs::path out = scratch_dir("geometry_t") / "t.txt";
  emit_geometry(c, out);
  const std::string text = read(out);
  int patches = 0, tj = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    patches += line.rfind("patch ", 0) == 0;
    tj += line.rfind("junction", 0) == 0 && line.find("t-junction") != std::string::npos;
  }
  EXPECT_EQ(patches, 3);
  EXPECT_EQ(tj, 1);
}

#ifdef IETIDP_CLI
namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(IETIDP_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "cfg.json";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("cli");
  const fs::path ok = write_config(dir, config(kTGrid, R"({"p": [2], "r": [1, 2]})"));
  EXPECT_EQ(run_cli("-c " + ok.string() + " -o " + (dir / "out").string() + " --oracle-check"), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "t.md"));
  EXPECT_EQ(run_cli("-c " + ok.string() + " --emit-geometry " + (dir / "g.txt").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "g.txt"));

  const fs::path empty = write_config(dir, config(kTGrid, R"({"p": [], "r": []})"));
  EXPECT_EQ(run_cli("-c " + empty.string() + " -o " + (dir / "empty").string()), 0);

  const fs::path bad = write_config(dir, config(kTGrid, R"({"p": [2], "r": [1]})", R"(, "typo": 1)"));
  EXPECT_EQ(run_cli("-c " + bad.string()), 1);

  const fs::path slow =
      write_config(dir, config(kRing, R"({"p": [2], "r": [2]})", R"(, "solver": {"maxit": 1, "rtol": 1e-12})"));
  EXPECT_EQ(run_cli("-c " + slow.string() + " -o " + (dir / "slow").string()), 2);
  EXPECT_EQ(run_cli("-c " + ok.string() + " --delta -1"), 1);
}
#endif
