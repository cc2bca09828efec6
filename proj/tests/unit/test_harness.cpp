#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "slowbond/errors.hpp"
#include "slowbond/harness.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/pde.hpp"

using namespace slowbond;

namespace {

ExperimentSpec small_frozen() {
  ExperimentSpec s;
  s.kind = ExperimentKind::Frozen;
  s.sizes = {{8, 2}, {16, 2}};
  s.theta = 0.2;
  s.macro_times = {0.01};
  s.replicas = 20;
  return s;
}

bool mentions(const std::vector<std::string>& problems, const std::string& needle) {
  for (const auto& p : problems)
    if (p.find(needle) != std::string::npos) return true;
  return false;
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / "slowbond_harness_test";
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(ExperimentKind, NamesRoundTrip) {
  for (const char* name : {"mixing", "frozen", "discrete-heat", "continuous-heat", "replacement",
                           "oracle-suite", "appendix-suite"})
    EXPECT_EQ(to_string(parse_experiment_kind(name)), name);
  EXPECT_THROW(parse_experiment_kind("melting"), UsageError);
}

TEST(Validate, AcceptsDefaultsAndRejectsHypothesisViolations) {
  EXPECT_TRUE(validate(small_frozen()).empty());

  ExperimentSpec boundary = small_frozen();
  boundary.theta = 0.5;  // equals beta - 1
  EXPECT_TRUE(mentions(validate(boundary), "theta < beta - 1"));

  ExperimentSpec flat = small_frozen();
  flat.beta = 1.0;
  EXPECT_TRUE(mentions(validate(flat), "beta > 1"));

  ExperimentSpec heat = small_frozen();
  heat.kind = ExperimentKind::ContinuousHeat;
  heat.theta.reset();
  EXPECT_TRUE(mentions(validate(heat), "k must increase"));

  ExperimentSpec disc = small_frozen();
  disc.kind = ExperimentKind::DiscreteHeat;
  disc.sizes = {{8, 2}, {8, 4}};
  const auto problems = validate(disc);
  EXPECT_TRUE(mentions(problems, "critical time scale"));
  EXPECT_TRUE(mentions(problems, "k must be the same"));
}

TEST(Validate, OversizedRunRejectedWithEstimate) {
  ExperimentSpec s = small_frozen();
  s.kind = ExperimentKind::DiscreteHeat;
  s.theta.reset();
  s.sizes = {{4096, 2}};
  s.macro_times = {1.0};
  const auto problems = validate(s);
  ASSERT_EQ(problems.size(), 1u);
  EXPECT_TRUE(mentions(problems, "event budget"));
  EXPECT_THROW(require_valid(s), ValidationError);
  EXPECT_THROW(run_experiment(s), ValidationError);
}

TEST(ProjectedEvents, Formula) {
  ExperimentSpec s = small_frozen();
  const LatticeSpec lattice(16, 2, 1.0, 1.5);
  EXPECT_DOUBLE_EQ(projected_events(s, 16, 2),
                   0.01 * speedup_factor(lattice, make_subcritical(0.2)) * lattice.total_rate());
}

TEST(TableCsv, RoundTripIncludingEmptyCells) {
  ConvergenceTable t;
  TableRow a;
  a.experiment = "frozen";
  a.name = "demo";
  a.n = 8;
  a.k = 2;
  a.alpha = 1;
  a.beta = 1.5;
  a.theta = 0.2;
  a.macro_time = 0.1;
  a.observable = "box_average";
  a.box_or_mode = "1";
  a.simulated = 0.3183098861837907;
  a.reference = 1.0 / 3.0;
  a.abs_error = std::abs(a.simulated - a.reference);
  a.stderr_value = 0.01;
  a.seed = 12345678901234ull;
  TableRow b = a;
  b.theta.reset();
  b.reference = b.abs_error = b.stderr_value = std::numeric_limits<double>::quiet_NaN();
  t.rows = {a, b};
  std::stringstream ss;
  write_table_csv(ss, t);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), kTableHeader);
  EXPECT_EQ(parse_table_csv(ss), t);
}

TEST(TableCsv, EmptyTableIsUsageError) {
  std::ostringstream os;
  EXPECT_THROW(write_table_csv(os, ConvergenceTable{}), UsageError);
  EXPECT_THROW(emit(ConvergenceTable{}, temp_dir() / "empty.csv", std::nullopt), UsageError);
}

TEST(Emit, PlotIffRequestedAndUnwritablePath) {
  const ExperimentResult r = run_experiment(small_frozen());
  const auto dir = temp_dir();
  std::filesystem::remove(dir / "a.svg");
  emit(r.table, dir / "a.csv", std::nullopt);
  EXPECT_TRUE(std::filesystem::exists(dir / "a.csv"));
  EXPECT_FALSE(std::filesystem::exists(dir / "a.svg"));
  emit(r.table, dir / "b.csv", dir / "b.svg");
  ASSERT_TRUE(std::filesystem::exists(dir / "b.svg"));
  std::ifstream svg(dir / "b.svg");
  std::string first;
  std::getline(svg, first);
  EXPECT_NE(first.find("<svg"), std::string::npos);
  EXPECT_THROW(emit(r.table, dir / "missing" / "x.csv", std::nullopt), IoError);
}

TEST(RunExperiment, DeterministicCsv) {
  auto csv = [] {
    std::ostringstream os;
    write_table_csv(os, run_experiment(small_frozen()).table);
    return os.str();
  };
  EXPECT_EQ(csv(), csv());
}

TEST(RunExperiment, FrozenConstantProfileErrorsAreNoise) {
  ExperimentSpec s = small_frozen();
  s.profile = "constant";
  s.profile_params = {{"c", 0.4}};
  s.macro_times = {0.01, 0.02};
  s.replicas = 50;
  const ExperimentResult r = run_experiment(s);
  std::size_t within = 0;
  for (const auto& row : r.table.rows) {
    EXPECT_DOUBLE_EQ(row.reference, 0.4);
    EXPECT_GT(row.stderr_value, 0.0);
    within += row.abs_error <= 4.0 * row.stderr_value;
  }
  EXPECT_GE(within, static_cast<std::size_t>(std::ceil(0.95 * r.table.rows.size())));
}

TEST(RunExperiment, DiscreteHeatTwoBoxReference) {
  ExperimentSpec s;
  s.kind = ExperimentKind::DiscreteHeat;
  s.sizes = {{8, 2}};
  s.macro_times = {0.01, 0.05};
  s.replicas = 4;
  const ExperimentResult r = run_experiment(s);
  const double a = 0.25;
  const double proj = 2.0 * a / std::numbers::pi;
  for (const auto& row : r.table.rows) {
    const double sign = row.box_or_mode == "0" ? 1.0 : -1.0;
    EXPECT_NEAR(row.reference, 0.5 + sign * proj * std::exp(-16.0 * row.macro_time), 1e-12);
    EXPECT_NEAR(row.abs_error, std::abs(row.simulated - row.reference), 1e-15);
  }
}

TEST(RunExperiment, ContinuousHeatMassPairing) {
  ExperimentSpec s;
  s.kind = ExperimentKind::ContinuousHeat;
  s.sizes = {{4, 2}, {4, 4}};
  s.macro_times = {0.01};
  s.replicas = 30;
  s.test_functions = {"1"};
  const ExperimentResult r = run_experiment(s);
  for (const auto& row : r.table.rows) {
    EXPECT_NEAR(row.reference, 0.5, 1e-12);
    // each replica's pairing is count / nk, a multiple of 1 / nk
    const double nk = static_cast<double>(row.n * row.k);
    EXPECT_LE(row.abs_error, 4.0 * 0.5 / std::sqrt(nk * 30.0) + 1e-12);
  }
}

TEST(RunExperiment, MixingAndReplacementRows) {
  ExperimentSpec mix;
  mix.kind = ExperimentKind::Mixing;
  mix.sizes = {{8, 2}};
  mix.theta = 0.5;
  mix.macro_times = {0.01};
  mix.replicas = 10;
  mix.test_functions = {"1", "sin(2pi u)"};
  const ExperimentResult m = run_experiment(mix);
  ASSERT_EQ(m.table.rows.size(), 2u);
  EXPECT_EQ(m.table.rows[0].simulated, 0.0);
  EXPECT_EQ(m.table.rows[0].stderr_value, 0.0);
  EXPECT_GE(m.table.rows[1].simulated, 0.0);
  EXPECT_EQ(m.table.rows[1].observable, "mixing_statistic");

  ExperimentSpec rep = mix;
  rep.kind = ExperimentKind::Replacement;
  rep.theta.reset();
  const ExperimentResult q = run_experiment(rep);
  EXPECT_EQ(q.table.rows[0].observable, "replacement_statistic");
}

TEST(DecreasingTrend, NoiseAware) {
  EXPECT_TRUE(decreasing_trend({{8, 2, 0.1, 0.10, 0.01}, {16, 2, 0.1, 0.05, 0.01}}));
  EXPECT_FALSE(decreasing_trend({{8, 2, 0.1, 0.05, 0.01}, {16, 2, 0.1, 0.10, 0.01}}));
  // a bump within noise in the middle is tolerated
  EXPECT_TRUE(decreasing_trend(
      {{8, 2, 0.1, 0.10, 0.01}, {16, 2, 0.1, 0.11, 0.01}, {32, 2, 0.1, 0.04, 0.01}}));
}

TEST(Config, ParsesAllKeys) {
  std::istringstream in(R"(# frozen run
experiment = frozen
name = demo
sizes = 8x2, 16x2
regime = subcritical
theta = 0.2
alpha = 1
beta = 1.5
profile = sine
profile.amplitude = 0.2
macro_times = 0.01, 0.05
replicas = 30
base_seed = 9
test_functions = 1, sin(2pi u)
event_budget = 1000000000
tolerance = 0.05
plot = true
)");
  const ExperimentSpec s = parse_experiment_config(in);
  EXPECT_EQ(s.kind, ExperimentKind::Frozen);
  EXPECT_EQ(s.name(), "demo");
  ASSERT_EQ(s.sizes.size(), 2u);
  EXPECT_EQ(s.sizes[1], (std::pair<std::size_t, std::size_t>{16, 2}));
  EXPECT_EQ(s.theta, 0.2);
  EXPECT_EQ(s.profile_params.at("amplitude"), 0.2);
  EXPECT_EQ(s.macro_times, (std::vector<double>{0.01, 0.05}));
  EXPECT_EQ(s.replicas, 30u);
  EXPECT_EQ(s.base_seed, 9u);
  EXPECT_EQ(s.test_functions, (std::vector<std::string>{"1", "sin(2pi u)"}));
  EXPECT_EQ(s.event_budget, 1000000000u);
  EXPECT_EQ(s.tolerance, 0.05);
  EXPECT_TRUE(s.plot);
}

TEST(Config, Errors) {
  std::istringstream dup("experiment = frozen\nexperiment = mixing\n");
  EXPECT_THROW(parse_experiment_config(dup), UsageError);
  std::istringstream unknown("experiment = frozen\ncolour = blue\n");
  EXPECT_THROW(parse_experiment_config(unknown), UsageError);
  std::istringstream critical_theta("experiment = frozen\nregime = critical\ntheta = 0.2\n");
  EXPECT_THROW(parse_experiment_config(critical_theta), UsageError);
  EXPECT_THROW(load_experiment_config(temp_dir() / "does-not-exist.cfg"), IoError);
}

TEST(OracleAgreement, SmallTorus) {
  const Report r = oracle_agreement(LatticeSpec(2, 2, 1.0, 1.5), Critical{},
                                    bump_profile(0.25, 0.5, 0.3, 2.0), 0.05, 5000, 3);
  EXPECT_TRUE(r.all_passed());
  EXPECT_NEAR(r.get("threshold"), 4.0 * std::sqrt(16.0 / 5000.0), 1e-12);
}

TEST(AdjointRandom, Passes) {
  EXPECT_TRUE(adjoint_random_check(LatticeSpec(3, 2, 1.0, 1.5), 20, 5).all_passed());
}
