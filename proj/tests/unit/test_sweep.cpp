#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "chemohapto/commands.hpp"
#include "chemohapto/error.hpp"
#include "chemohapto/sweep.hpp"

using namespace chemohapto;

namespace {

const char* kSmall = R"(
[model]
chi = 1.0
xi = 1.0
tau = 1.0
kinetics = "logistic"
mu = 1.0
[grid]
nx = 16
ny = 16
[ic]
u = "cosine"
u_value = 1.0
u_amplitude = 0.3
w = "homogeneous"
w_value = 0.4
[time]
t_end = 0.2
observe_every = 0.01
)";

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("chemohapto_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST(SweepAxis, Parse) {
  const SweepAxis a = parse_sweep_axis("chi=0.5:2:4");
  EXPECT_EQ(a.name, "chi");
  EXPECT_EQ(a.values(), (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  const SweepAxis l = parse_sweep_axis("mass_scale=1:100:3:log");
  ASSERT_EQ(l.values().size(), 3u);
  EXPECT_NEAR(l.values()[1], 10.0, 1e-12);
  EXPECT_EQ(l.values()[2], 100.0);
  EXPECT_EQ(parse_sweep_axis("k=1:2:1").values(), (std::vector<double>{1.0}));
}

TEST(SweepAxis, Errors) {
  EXPECT_THROW(parse_sweep_axis("chi"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("nx=1:2:3"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=1:2"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=1:2:0"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=1:2:2.5"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=0:2:3:log"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=1:2:3:lin"), InvalidInput);
  EXPECT_THROW(parse_sweep_axis("chi=a:2:3"), InvalidInput);
}

TEST(Sweep, TooManyPoints) {
  const RunConfig c = parse_config(kSmall);
  EXPECT_THROW(run_sweep(c, {parse_sweep_axis("chi=1:2:200"), parse_sweep_axis("mu=1:2:100")},
                         scratch("sweep_big"), 1),
               InvalidInput);
}

TEST(Sweep, SinglePointMatchesRun) {
  RunConfig c = parse_config(kSmall);
  const auto dir = scratch("sweep_single");
  const SweepResult s = run_sweep(c, {parse_sweep_axis("chi=1:1:1")}, dir, 1);
  ASSERT_EQ(s.points.size(), 1u);
  const GnEstimate gn = gn_estimate(c.grid(), 4, 2, 2);
  const RunReport rep = execute_run(c, dir / "direct", gn);
  EXPECT_EQ(s.points[0].condition_case, to_string(rep.threshold->condition_case));
  EXPECT_EQ(s.points[0].classification, to_string(*rep.run->classification));
  EXPECT_EQ(read_text(dir / "point_0000" / "series.csv"), read_text(dir / "direct" / "series.csv"));
  std::filesystem::remove_all(dir);
}

TEST(Sweep, ParallelEqualsSerial) {
  const RunConfig c = parse_config(kSmall);
  const std::vector<SweepAxis> axes{parse_sweep_axis("chi=0.5:2:3"), parse_sweep_axis("mu=0.5:1:2")};
  const auto d1 = scratch("sweep_serial"), d4 = scratch("sweep_parallel");
  const SweepResult a = run_sweep(c, axes, d1, 1);
  const SweepResult b = run_sweep(c, axes, d4, 4);
  ASSERT_EQ(a.points.size(), 6u);
  EXPECT_EQ(sweep_csv(a), sweep_csv(b));
  EXPECT_EQ(a.points[4].coords, (std::vector<std::pair<std::string, double>>{{"chi", 2.0}, {"mu", 0.5}}));
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const std::string name = a.points[i].dir;
    EXPECT_EQ(read_text(d1 / name / "series.csv"), read_text(d4 / name / "series.csv"));
  }
  int total = 0;
  for (const auto& [key, n] : a.confusion) total += n;
  EXPECT_EQ(total, 6);
  EXPECT_NE(confusion_summary(a).find("bounded_plateau"), std::string::npos);
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d4);
}

TEST(Sweep, FailingPointIsRecorded) {
  const RunConfig c = parse_config(kSmall);
  const auto dir = scratch("sweep_fail");
  const SweepResult s = run_sweep(c, {parse_sweep_axis("mu=-1:1:2")}, dir, 2);
  ASSERT_EQ(s.points.size(), 2u);
  EXPECT_FALSE(s.points[0].error.empty());
  EXPECT_TRUE(s.points[1].error.empty());
  EXPECT_EQ(s.confusion.at({"error", "error"}), 1);
  const std::string csv = sweep_csv(s);
  EXPECT_NE(csv.find("model.mu"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Commands, RunWritesArtifacts) {
  const auto dir = scratch("cmd_run");
  std::filesystem::create_directories(dir);
  write_text(dir / "c.toml", kSmall);
  CliOptions opts;
  opts.out = (dir / "out").string();
  std::ostringstream out, err;
  EXPECT_EQ(cmd_run((dir / "c.toml").string(), opts, out, err), 0) << err.str();
  for (const char* f : {"series.csv", "report.json", "u_final.bin", "v_final.svg", "w_final.bin"})
    EXPECT_TRUE(std::filesystem::exists(dir / "out" / f)) << f;
  const RunReport rep = parse_report_json(read_text(dir / "out" / "report.json"));
  EXPECT_EQ(rep.command, "run");
  EXPECT_TRUE(rep.threshold.has_value());
  EXPECT_EQ(parse_series_csv(read_text(dir / "out" / "series.csv")).size(), 21u);

  std::ostringstream cout_, cerr_;
  EXPECT_EQ(cmd_check((dir / "c.toml").string(), opts, cout_, cerr_), 0);
  EXPECT_NE(cout_.str().find("C_GN"), std::string::npos);
  EXPECT_NE(cout_.str().find("mu_r"), std::string::npos);

  write_text(dir / "bad.toml", "[model]\nkinetics = \"sublog_pow\"\ngamma = 1.5\n");
  std::ostringstream o2, e2;
  EXPECT_EQ(cmd_run((dir / "bad.toml").string(), opts, o2, e2), 2);
  EXPECT_NE(e2.str().find("model.gamma"), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Commands, SeedOverride) {
  const auto dir = scratch("cmd_seed");
  std::filesystem::create_directories(dir);
  write_text(dir / "c.toml", "[ic]\nu = \"random\"\nu_value = 1\nu_amplitude = 0.5\nseed = 3\n");
  CliOptions opts;
  opts.seed = 99;
  opts.threads = 2;
  const RunConfig c = resolve_config(dir / "c.toml", opts);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.numerics.threads, 2);
  opts.threads = 0;
  EXPECT_THROW(resolve_config(dir / "c.toml", opts), ConfigError);
  std::filesystem::remove_all(dir);
}
