// slowbond: command-line front end for simulations, reference solutions,
// exact-oracle checks and full experiments.
//
// Exit codes: 0 all checks passed, 1 a check failed, 2 bad usage or an
// invalid experiment, 3 any other runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"
#include "slowbond/harness.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/pde.hpp"
#include "slowbond/simulator.hpp"
#include "slowbond/stats.hpp"

namespace {

using namespace slowbond;

constexpr int kExitFailedCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct ModelOptions {
  std::size_t n = 8;
  std::size_t k = 2;
  double alpha = 1.0;
  double beta = 1.5;
  std::optional<double> theta;
  std::string profile = "sine";
  std::vector<std::string> profile_params;  // key=value
  std::vector<double> times{0.01, 0.05, 0.1};

  void attach(CLI::App* app) {
    app->add_option("-n,--n", n, "sites per box")->check(CLI::PositiveNumber);
    app->add_option("-k,--k", k, "number of boxes")->check(CLI::PositiveNumber);
    app->add_option("--alpha", alpha, "slow-bond prefactor");
    app->add_option("--beta", beta, "slow-bond exponent");
    app->add_option("--theta", theta, "subcritical time-scale exponent (omit for critical)");
    app->add_option("--profile", profile, "initial profile: sine, bump or constant");
    app->add_option("--param", profile_params, "profile parameter, e.g. amplitude=0.25");
    app->add_option("--times", times, "macroscopic observation times")->delimiter(',');
  }

  std::map<std::string, double> params() const {
    std::map<std::string, double> out;
    for (const auto& kv : profile_params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("--param expects key=value, got " + kv);
      out[kv.substr(0, eq)] = parse_double(kv.substr(eq + 1));
    }
    return out;
  }

  Profile make() const { return make_profile(profile, params()); }
  TimeScaleRegime regime() const { return theta ? make_subcritical(*theta) : TimeScaleRegime{Critical{}}; }
};

std::ostream& open_output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw IoError("cannot open " + path + " for writing");
  return file;
}

int finish(const Report& report, std::ostream& out) {
  report.write(out);
  if (report.all_passed()) return 0;
  std::cerr << "failed checks:";
  for (const auto& name : report.failed_checks()) std::cerr << ' ' << name;
  std::cerr << '\n';
  return kExitFailedCheck;
}

int run_simulate(const ModelOptions& m, std::size_t replicas, std::uint64_t seed,
                 const std::string& output) {
  const LatticeSpec spec(m.n, m.k, m.alpha, m.beta);
  ReplicaPlan plan;
  plan.replicas = replicas;
  plan.base_seed = seed;
  plan.macro_times = m.times;
  plan.regime = m.regime();
  const BoxAverageRun run = run_box_averages(spec, plan, m.make());
  std::ofstream file;
  run.write_csv(open_output(output, file));
  return 0;
}

int run_pde(const ModelOptions& m, bool discrete, bool checks, std::size_t grid,
            const std::string& output) {
  std::ofstream file;
  std::ostream& out = open_output(output, file);
  if (checks) return finish(pde_property_checks(m.alpha), out);
  const Profile gamma = m.make();
  for (double t : m.times) {
    out << "# t = " << format_double(t) << '\n';
    if (discrete) {
      const auto gbar = box_average_profile(gamma, m.k);
      write_csv(out, DensityField{DiscreteOnTk{solve_discrete_heat(gbar, m.alpha, t)}}, grid);
    } else {
      write_csv(out, DensityField{solve_continuous_heat(gamma, m.alpha, t)}, grid);
    }
  }
  return 0;
}

int run_oracle(const ModelOptions& m, std::size_t replicas, std::uint64_t seed,
               const std::string& output) {
  ExperimentSpec spec;
  spec.kind = ExperimentKind::OracleSuite;
  spec.sizes = {{m.n, m.k}};
  spec.alpha = m.alpha;
  spec.beta = m.beta;
  spec.theta = m.theta;
  spec.profile = m.profile;
  spec.profile_params = m.params();
  spec.macro_times = m.times;
  spec.replicas = replicas;
  spec.base_seed = seed;
  std::ofstream file;
  return finish(oracle_suite(spec), open_output(output, file));
}

int run_experiment_cmd(const std::string& config, std::optional<std::uint64_t> seed,
                       const std::string& output, const std::string& plot,
                       const std::string& report_path) {
  ExperimentSpec spec = load_experiment_config(config);
  if (seed) spec.base_seed = *seed;
  const ExperimentResult result = run_experiment(spec);
  std::optional<std::filesystem::path> plot_path;
  if (!plot.empty()) {
    plot_path = plot;
  } else if (spec.plot) {
    plot_path = output == "-" ? std::filesystem::path(spec.name() + ".svg")
                              : std::filesystem::path(output).replace_extension(".svg");
  }
  if (output == "-") {
    write_table_csv(std::cout, result.table);
    if (plot_path) {
      std::ofstream svg(*plot_path);
      if (!svg) throw IoError("cannot open " + plot_path->string() + " for writing");
      write_error_plot_svg(svg, result.table);
    }
  } else {
    emit(result.table, output, plot_path);
  }
  std::ofstream file;
  return finish(result.checks, report_path.empty() ? std::cerr : open_output(report_path, file));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exclusion process with slow bonds: simulation and exact verification"};
  app.require_subcommand(1);
  app.fallthrough();
  std::optional<std::uint64_t> seed;
  std::string output = "-";
  app.add_option("--seed", seed, "base seed (overrides base_seed in experiment configs)");
  app.add_option("-o,--output", output, "output file ('-' for stdout)");

  ModelOptions model;

  auto* simulate = app.add_subcommand("simulate", "simulate trajectories and dump box averages");
  model.attach(simulate);
  std::size_t sim_replicas = 1;
  simulate->add_option("--replicas", sim_replicas, "independent trajectories")
      ->check(CLI::PositiveNumber);

  auto* pde = app.add_subcommand("pde", "reference solutions of the limit equations");
  ModelOptions pde_model;
  pde_model.attach(pde);
  bool discrete = false, pde_checks = false;
  std::size_t grid = 256;
  pde->add_flag("--discrete", discrete, "discrete heat equation on k boxes from box averages");
  pde->add_flag("--check", pde_checks, "run the solver property checks instead");
  pde->add_option("--grid", grid, "points for continuous output");

  auto* oracle = app.add_subcommand("oracle", "exact-oracle suite on a small torus");
  ModelOptions oracle_model;
  oracle_model.n = 4;
  oracle_model.attach(oracle);
  std::size_t oracle_replicas = 20000;
  oracle->add_option("--replicas", oracle_replicas, "simulator runs for the agreement check");

  auto* check = app.add_subcommand("check", "concentration-inequality checks");
  std::size_t mc_samples = 1000000;
  check->add_option("--samples", mc_samples, "Monte Carlo samples");

  auto* experiment = app.add_subcommand("experiment", "run a convergence experiment from a config");
  std::string config, plot, report_path;
  experiment->add_option("config", config, "key = value config file")->required();
  experiment->add_option("--plot", plot, "SVG plot path (implied by plot = true in the config)");
  experiment->add_option("--report", report_path, "write the check report here (default stderr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const std::uint64_t base_seed = seed.value_or(1);
    if (*simulate) return run_simulate(model, sim_replicas, base_seed, output);
    if (*pde) return run_pde(pde_model, discrete, pde_checks, grid, output);
    if (*oracle) return run_oracle(oracle_model, oracle_replicas, base_seed, output);
    if (*check) {
      std::ofstream file;
      return finish(appendix_suite(base_seed, mc_samples), open_output(output, file));
    }
    if (*experiment) {
      return run_experiment_cmd(config, seed, output, plot, report_path);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
