#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "mim/config.hpp"
#include "mim/csv.hpp"

using namespace mim;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mimwave_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int mimwave(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(MIMWAVE_EXE) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Everything after the '#' metadata lines.
std::string body(const std::string& csv) {
  std::size_t pos = 0;
  while (pos < csv.size() && csv[pos] == '#') pos = csv.find('\n', pos) + 1;
  return csv.substr(pos);
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return static_cast<int>(i);
    throw std::runtime_error("no column " + name);
  }
  double num(std::size_t row, const std::string& name) const { return std::stod(rows.at(row).at(column(name))); }
};

Table read_table(const fs::path& p) {
  auto split = [](const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) out.push_back(f);
    return out;
  };
  std::stringstream in(body(slurp(p)));
  Table t;
  std::string line;
  std::getline(in, line);
  t.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) t.rows.push_back(split(line));
  return t;
}

}  // namespace

TEST(Config, RoundTrip) {
  ExperimentConfig cfg;
  cfg.command = Command::wake;
  cfg.c = 1.25;
  cfg.kappa = 20.0;
  cfg.n_list = {1, 3, 4};
  cfg.L = 32.5;
  cfg.N = 512;
  cfg.M = 64;
  cfg.dt = 0.005;
  cfg.T = 40.0;
  cfg.eps = {0.01, -0.01, 0.0};
  cfg.potential = "toda:1,0.5";
  cfg.out = "results/run1";
  cfg.observer = 12;
  cfg.solve_points = true;
  cfg.mu_min = 1.0 / 3.0;
  const auto back = ExperimentConfig::parse(cfg.serialize());
  EXPECT_EQ(back, cfg);
  EXPECT_EQ(back.serialize(), cfg.serialize());
}

TEST(Config, DefaultsRoundTrip) {
  const ExperimentConfig cfg;
  EXPECT_EQ(ExperimentConfig::parse(cfg.serialize()), cfg);
  EXPECT_EQ(ExperimentConfig::parse(""), cfg);
}

TEST(Config, CommentsAndWhitespace) {
  const auto cfg = ExperimentConfig::parse("# a comment\n\n  c = 1.5 \nmu=0.2\r\nn_list = 1, 2 ,3\n");
  EXPECT_EQ(cfg.c, 1.5);
  EXPECT_EQ(cfg.mu, 0.2);
  EXPECT_EQ(cfg.n_list, (std::vector<int>{1, 2, 3}));
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(ExperimentConfig::parse("c=2\nc=3\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("speed=2\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("c=fast\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("c=2x\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("n=1.5\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("just text\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("command=plot\n"), ConfigError);
  EXPECT_THROW(ExperimentConfig::parse("solve_points=maybe\n"), ConfigError);
}

TEST(Config, OverDeterminedRejected) {
  auto cfg = ExperimentConfig::parse("mu=0.4\nkappa=20\n");
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.kappa.reset();
  EXPECT_NO_THROW(cfg.validate());
  cfg.mu.reset();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Config, EmptyNListIsUsageError) {
  auto cfg = ExperimentConfig::parse("command=converge\nkappa=20\n");
  try {
    cfg.validate();
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("empty n list"), std::string::npos);
  }
  cfg.n_max = 4;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.n_values(), (std::vector<int>{1, 2, 3, 4}));
}

TEST(Config, ValidatesRanges) {
  auto base = ExperimentConfig::parse("mu=0.4\n");
  for (const char* bad : {"N=255", "N=4", "eps=0.01,0.2", "dt=0", "c=-1", "scheme=rk4", "potential=morse",
                          "mu=-0.1", "n=0", "wake_width=0"}) {
    auto cfg = base;
    cfg.merge_text(bad);
    EXPECT_THROW(cfg.validate(), Error) << bad;
  }
  auto sweep = ExperimentConfig::parse("command=sweep\nkappa=20\nn=1\n");
  EXPECT_THROW(sweep.validate(), ConfigError);
}

TEST(Config, SingleN) {
  EXPECT_EQ(ExperimentConfig::parse("").single_n(), 1);
  EXPECT_EQ(ExperimentConfig::parse("n=3").single_n(), 3);
  EXPECT_THROW(ExperimentConfig::parse("n_list=1,2").single_n(), ConfigError);
}

TEST(Config, GridDoublesUntilOmegaResolved) {
  auto cfg = ExperimentConfig::parse("kappa=20\n");
  EXPECT_EQ(cfg.grid_for(3).size(), 256);
  EXPECT_EQ(cfg.grid_for(4).size(), 512);
  EXPECT_EQ(cfg.grid_for(8).size(), 1024);
  cfg.N = 128;
  EXPECT_EQ(cfg.grid_for(4).size(), 128);  // explicit N is never overridden
  cfg.command = Command::wake;
  cfg.N.reset();
  EXPECT_EQ(cfg.grid_for(1).size(), 1024);
  EXPECT_DOUBLE_EQ(cfg.grid_for(1).half_length(), 64.0);
}

TEST(Config, SitesFollowDomain) {
  EXPECT_EQ(ExperimentConfig::parse("").sites(), 32);
  EXPECT_EQ(ExperimentConfig::parse("M=12").sites(), 12);
  EXPECT_THROW(ExperimentConfig::parse("L=16.25").sites(), ConfigError);
}

TEST(Config, MetadataHeader) {
  const std::string csv =
      "# command=solve\n# c=1.25\n# kappa=20\n# derived.mu=0.4797\n# n=2\nx,rho1\n# c=9\n0,1\n";
  ExperimentConfig cfg;
  cfg.merge_text(csv, true);
  EXPECT_EQ(cfg.c, 1.25);
  EXPECT_EQ(cfg.kappa, 20.0);
  EXPECT_FALSE(cfg.mu.has_value());
  EXPECT_EQ(cfg.n, 2);
}

TEST(Csv, ShortestRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 45.118191547837068, 1e22}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Csv, WriterLayout) {
  const fs::path dir = scratch_dir("csv");
  {
    CsvWriter w((dir / "t.csv").string(), {{"c", "2"}, {"derived.kappa", "45.1"}}, {"a", "b", "c"});
    w.row({1.5, 7L, std::string("ok")});
    EXPECT_THROW(w.row({1.0}), Error);
  }
  EXPECT_EQ(slurp(dir / "t.csv"), "# c=2\n# derived.kappa=45.1\na,b,c\n1.5,7,ok\n");
  EXPECT_THROW(CsvWriter((dir / "missing" / "t.csv").string(), {}, {"a"}), Error);
}

TEST(Cli, SolveWritesWave) {
  const fs::path dir = scratch_dir("solve");
  ASSERT_EQ(mimwave("solve --c 2 --mu 0.4 --n 1 --out " + dir.string(), dir / "log.txt"), 0) << slurp(dir / "log.txt");
  const std::string csv = slurp(dir / "wave.csv");
  EXPECT_NE(csv.find("# derived.kappa=45.118191547837"), std::string::npos);
  EXPECT_EQ(csv.find('\r'), std::string::npos);
  const Table t = read_table(dir / "wave.csv");
  EXPECT_EQ(t.header, (std::vector<std::string>{"x", "rho1", "rho2", "sigma"}));
  EXPECT_EQ(t.rows.size(), 256u);
  EXPECT_NE(slurp(dir / "log.txt").find("residual"), std::string::npos);
}

TEST(Cli, RerunFromMetadataIsByteIdentical) {
  const fs::path a = scratch_dir("rerun_a"), b = scratch_dir("rerun_b");
  ASSERT_EQ(mimwave("solve --c 1.25 --kappa 20 --n 2 --out " + a.string(), a / "log.txt"), 0);
  ASSERT_EQ(mimwave("solve --config " + (a / "wave.csv").string() + " --out " + b.string(), b / "log.txt"), 0)
      << slurp(b / "log.txt");
  const std::string first = slurp(a / "wave.csv"), second = slurp(b / "wave.csv");
  EXPECT_EQ(body(first), body(second));
  EXPECT_FALSE(body(first).empty());
}

TEST(Cli, ConfigFileWithOverride) {
  const fs::path dir = scratch_dir("override");
  std::ofstream(dir / "run.cfg") << "c=2\nkappa=30\nn=1\n";
  ASSERT_EQ(mimwave("solve --config " + (dir / "run.cfg").string() + " --mu 0.4 --out " + dir.string(),
                    dir / "log.txt"),
            0)
      << slurp(dir / "log.txt");
  EXPECT_NE(slurp(dir / "wave.csv").find("# mu=0.4\n"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch_dir("codes");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(mimwave("solve --c 2 --mu 0.4 --kappa 20 --n 1" + out, dir / "a.txt"), 2);
  EXPECT_NE(slurp(dir / "a.txt").find("over-determined"), std::string::npos);
  EXPECT_EQ(mimwave("converge --c 1.25 --kappa 20" + out, dir / "b.txt"), 2);
  EXPECT_EQ(mimwave("solve --c 2 --mu 0.4 --bogus 1" + out, dir / "c.txt"), 2);
  EXPECT_EQ(mimwave("", dir / "d.txt"), 2);
  EXPECT_EQ(mimwave("solve --c 1.25 --kappa 100 --n 1" + out, dir / "e.txt"), 2);  // no positive mass
  EXPECT_EQ(mimwave("solve --c 2 --mu 0.4 --n 4 --N 256" + out, dir / "f.txt"), 2);  // omega off the grid
  EXPECT_EQ(mimwave("simulate --c 2 --mu 0.4 --dt 5 --T 50" + out, dir / "g.txt"), 4);
}

TEST(Cli, SweepCurvePoint) {
  const fs::path dir = scratch_dir("sweep");
  ASSERT_EQ(mimwave("sweep --c 1.25 --mu 0.4 --n 1 --out " + dir.string(), dir / "log.txt"), 0);
  const Table t = read_table(dir / "sweep_curves.csv");
  bool found = false;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.num(r, "mu") != 0.4) continue;
    found = true;
    EXPECT_NEAR(t.num(r, "kappa"), 17.6242935733738546764901624998, 1e-12);
    EXPECT_NEAR(t.num(r, "kappa"), 17.62, 5e-3);
  }
  EXPECT_TRUE(found);
}

TEST(Cli, SweepDistanceShrinksWithMu) {
  const fs::path dir = scratch_dir("sweep_points");
  ASSERT_EQ(mimwave("sweep --c 1.25 --n 2 --mu-min 0.0125 --mu-max 0.2 --mu-points 5 --solve-points --out " +
                        dir.string(),
                    dir / "log.txt"),
            0)
      << slurp(dir / "log.txt");
  const Table t = read_table(dir / "sweep_distance.csv");
  ASSERT_EQ(t.rows.size(), 5u);
  for (std::size_t r = 1; r < t.rows.size(); ++r) EXPECT_GT(t.num(r, "distance"), t.num(r - 1, "distance"));
}

TEST(Cli, ConvergeTable) {
  const fs::path dir = scratch_dir("converge");
  ASSERT_EQ(mimwave("converge --c 1.25 --kappa 20 --n-max 4 --out " + dir.string(), dir / "log.txt"), 0)
      << slurp(dir / "log.txt");
  const Table t = read_table(dir / "converge.csv");
  ASSERT_EQ(t.rows.size(), 4u);
  for (std::size_t r = 1; r < 4; ++r) EXPECT_LT(t.num(r, "combined"), t.num(r - 1, "combined"));
  EXPECT_NE(slurp(dir / "converge.csv").find("# derived.N=512"), std::string::npos);
}

TEST(Cli, HighHarmonicCloseToMonatomicWave) {
  // mu_5 at kappa = 20 is about 0.013; rho1 should be hard to tell apart from sigma.
  const fs::path dir = scratch_dir("n5");
  ASSERT_EQ(mimwave("solve --c 1.25 --kappa 20 --n 5 --out " + dir.string(), dir / "log.txt"), 0)
      << slurp(dir / "log.txt");
  const Table t = read_table(dir / "wave.csv");
  EXPECT_EQ(t.rows.size(), 512u);
  double diff = 0.0, peak = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    diff = std::max(diff, std::abs(t.num(r, "rho1") - t.num(r, "sigma")));
    peak = std::max(peak, std::abs(t.num(r, "sigma")));
  }
  EXPECT_LE(diff, 0.05 * peak);
}

TEST(Cli, SimulateOutputs) {
  const fs::path dir = scratch_dir("simulate");
  ASSERT_EQ(mimwave("simulate --c 2 --mu 0.4 --T 16 --observer 0 --out " + dir.string(), dir / "log.txt"), 0)
      << slurp(dir / "log.txt");
  const Table e = read_table(dir / "energy.csv");
  const double H0 = e.num(0, "H");
  for (std::size_t r = 0; r < e.rows.size(); ++r) EXPECT_NEAR(e.num(r, "H"), H0, 1e-10 * std::abs(H0));
  const Table s = read_table(dir / "site_0.csv");
  EXPECT_EQ(s.rows.size(), 1601u);
  EXPECT_NEAR(s.num(1600, "R"), s.num(0, "R"), 1e-8);
  EXPECT_TRUE(fs::exists(dir / "snapshot.csv"));
}

TEST(Cli, WakeSigns) {
  const fs::path dir = scratch_dir("wake");
  ASSERT_EQ(mimwave("wake --c 2 --mu 0.4 --eps 0.01 --eps -0.01 --eps 0 --out " + dir.string(), dir / "log.txt"),
            0)
      << slurp(dir / "log.txt");
  const Table t = read_table(dir / "wake.csv");
  ASSERT_EQ(t.rows.size(), 8u);
  const int run = t.column("run");
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string name = t.rows[r][run];
    const double eps = t.num(r, "eps"), ratio = t.num(r, "ratio_to_control");
    if (name.starts_with("mim_") && eps != 0.0) EXPECT_GT(ratio, 10.0) << name;
    if (name.starts_with("fput_") && eps != 0.0) EXPECT_LT(ratio, 3.0) << name;
    if (eps == 0.0 && !name.ends_with("control")) EXPECT_NEAR(ratio, 1.0, 1e-12) << name;
  }
  EXPECT_TRUE(fs::exists(dir / "record_mim_0.csv"));
  EXPECT_TRUE(fs::exists(dir / "record_fput-control.csv"));
}
