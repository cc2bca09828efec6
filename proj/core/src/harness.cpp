#include "slowbond/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "slowbond/errors.hpp"
#include "slowbond/format.hpp"
#include "slowbond/measures.hpp"
#include "slowbond/oracle.hpp"
#include "slowbond/parallel.hpp"
#include "slowbond/pde.hpp"
#include "slowbond/rng.hpp"
#include "slowbond/stats.hpp"

namespace slowbond {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
  static const std::vector<std::pair<ExperimentKind, std::string>> names{
      {ExperimentKind::Mixing, "mixing"},
      {ExperimentKind::Frozen, "frozen"},
      {ExperimentKind::DiscreteHeat, "discrete-heat"},
      {ExperimentKind::ContinuousHeat, "continuous-heat"},
      {ExperimentKind::Replacement, "replacement"},
      {ExperimentKind::OracleSuite, "oracle-suite"},
      {ExperimentKind::AppendixSuite, "appendix-suite"},
  };
  return names;
}

bool simulates(ExperimentKind kind) {
  return kind != ExperimentKind::OracleSuite && kind != ExperimentKind::AppendixSuite;
}

bool same_double(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string optional_double(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string{};
}

TableRow base_row(const ExperimentSpec& spec, std::size_t n, std::size_t k, double t) {
  TableRow row;
  row.experiment = to_string(spec.kind);
  row.name = spec.name();
  row.n = n;
  row.k = k;
  row.alpha = spec.alpha;
  row.beta = spec.beta;
  row.theta = spec.theta;
  row.macro_time = t;
  row.seed = spec.base_seed;
  return row;
}

ReplicaPlan make_plan(const ExperimentSpec& spec) {
  ReplicaPlan plan;
  plan.replicas = spec.replicas;
  plan.base_seed = spec.base_seed;
  plan.macro_times = spec.macro_times;
  std::sort(plan.macro_times.begin(), plan.macro_times.end());
  plan.regime = spec.regime();
  plan.event_budget = spec.event_budget;
  return plan;
}

void run_box_experiment(const ExperimentSpec& spec, ConvergenceTable& table) {
  const Profile gamma = spec.make_profile();
  const ReplicaPlan plan = make_plan(spec);
  for (const auto& [n, k] : spec.sizes) {
    const LatticeSpec lattice(n, k, spec.alpha, spec.beta);
    const BoxAverageRun run = run_box_averages(lattice, plan, gamma);
    const std::vector<double> gbar = box_average_profile(gamma, k);
    for (std::size_t j = 0; j < plan.macro_times.size(); ++j) {
      const double t = plan.macro_times[j];
      const std::vector<double> reference =
          spec.kind == ExperimentKind::DiscreteHeat ? solve_discrete_heat(gbar, spec.alpha, t)
                                                    : gbar;
      for (std::size_t i = 0; i < k; ++i) {
        const Estimate e = run.box_estimate(j, i);
        TableRow row = base_row(spec, n, k, t);
        row.observable = "box_average";
        row.box_or_mode = std::to_string(i);
        row.simulated = e.mean;
        row.reference = reference[i];
        row.abs_error = std::abs(e.mean - reference[i]);
        row.stderr_value = e.std_error;
        table.rows.push_back(std::move(row));
      }
    }
  }
}

void run_pairing_experiment(const ExperimentSpec& spec, ConvergenceTable& table) {
  const Profile gamma = spec.make_profile();
  const ReplicaPlan plan = make_plan(spec);
  for (const auto& [n, k] : spec.sizes) {
    const LatticeSpec lattice(n, k, spec.alpha, spec.beta);
    const BoxAverageRun run = run_box_averages(lattice, plan, gamma);
    for (std::size_t j = 0; j < plan.macro_times.size(); ++j) {
      const double t = plan.macro_times[j];
      const FourierOnT field = solve_continuous_heat(gamma, spec.alpha, t);
      for (const auto& g_name : spec.test_functions) {
        const TestFunction G = make_test_function(g_name);
        const Estimate e = summarize(run.pairing_samples(j, G));
        const double reference = integrate_against(field, G);
        TableRow row = base_row(spec, n, k, t);
        row.observable = "pairing";
        row.box_or_mode = G.name();
        row.simulated = e.mean;
        row.reference = reference;
        row.abs_error = std::abs(e.mean - reference);
        row.stderr_value = e.std_error;
        table.rows.push_back(std::move(row));
      }
    }
  }
}

void run_statistic_experiment(const ExperimentSpec& spec, ConvergenceTable& table) {
  const Profile gamma = spec.make_profile();
  ReplicaPlan plan = make_plan(spec);
  const bool mixing = spec.kind == ExperimentKind::Mixing;
  for (const auto& [n, k] : spec.sizes) {
    const LatticeSpec lattice(n, k, spec.alpha, spec.beta);
    for (double t : plan.macro_times) {
      for (const auto& g_name : spec.test_functions) {
        const TestFunction G = make_test_function(g_name);
        const Estimate e = mixing ? mixing_statistic(plan, lattice, gamma, G, t)
                                  : replacement_statistic(plan, lattice, gamma, G, t);
        TableRow row = base_row(spec, n, k, t);
        row.observable = mixing ? "mixing_statistic" : "replacement_statistic";
        row.box_or_mode = G.name();
        row.simulated = e.mean;
        row.reference = 0.0;
        row.abs_error = e.mean;
        row.stderr_value = e.std_error;
        table.rows.push_back(std::move(row));
      }
    }
  }
}

void suite_rows(const ExperimentSpec& spec, const Report& report, ConvergenceTable& table) {
  for (const auto& [name, value] : report.entries()) {
    TableRow row = base_row(spec, 0, 0, std::numeric_limits<double>::quiet_NaN());
    row.observable = name;
    row.simulated = value;
    row.reference = std::numeric_limits<double>::quiet_NaN();
    row.abs_error = std::numeric_limits<double>::quiet_NaN();
    row.stderr_value = std::numeric_limits<double>::quiet_NaN();
    table.rows.push_back(std::move(row));
  }
}

void assess_convergence(const ExperimentSpec& spec, const ConvergenceTable& table,
                        Report& checks) {
  const auto errors = worst_errors(table);
  std::vector<double> times = spec.macro_times;
  std::sort(times.begin(), times.end());
  for (double t : times) {
    std::vector<SizeError> along;
    for (const auto& e : errors)
      if (e.macro_time == t) along.push_back(e);
    if (along.empty()) continue;
    const std::string tag = "t" + format_double(t);
    const SizeError& last = along.back();
    checks.add(tag + ".error_first", along.front().error);
    checks.add(tag + ".error_last", last.error);
    checks.add(tag + ".stderr_last", last.std_error);
    checks.add_check(tag + ".within_tolerance",
                     last.error <= spec.tolerance + 3.0 * last.std_error);
    if (along.size() >= 2) checks.add_check(tag + ".decreasing", decreasing_trend(along));
  }
}

std::vector<double> random_params(std::size_t sites, Rng& rng) {
  std::vector<double> p(sites);
  for (double& v : p) v = 0.05 + 0.9 * uniform01(rng);
  return p;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kind_names())
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kind_names())
    if (n == name) return k;
  throw UsageError("unknown experiment kind '" + name + "'");
}

TimeScaleRegime ExperimentSpec::regime() const {
  if (theta) return make_subcritical(*theta);
  return Critical{};
}

Profile ExperimentSpec::make_profile() const { return slowbond::make_profile(profile, profile_params); }

std::vector<std::string> validate(const ExperimentSpec& spec) {
  std::vector<std::string> problems;
  const ExperimentKind kind = spec.kind;
  if (kind == ExperimentKind::AppendixSuite) return problems;

  if (spec.sizes.empty()) problems.push_back("sizes: at least one (n, k) pair is required");
  for (const auto& [n, k] : spec.sizes)
    if (n < 2 || k < 1)
      problems.push_back("sizes: need n >= 2 and k >= 1 (got " + std::to_string(n) + "x" +
                         std::to_string(k) + ")");
  if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha))
    problems.push_back("alpha: must be positive and finite");
  if (!(spec.beta > 1.0) || !std::isfinite(spec.beta))
    problems.push_back("beta: the slow-bond scaling limits assume beta > 1 (got " +
                       format_double(spec.beta) + ")");
  if (spec.theta && !(*spec.theta > 0.0))
    problems.push_back("theta: the subcritical time scale requires theta > 0");
  if (spec.macro_times.empty()) problems.push_back("macro_times: at least one time is required");
  for (double t : spec.macro_times)
    if (!(t > 0.0) || !std::isfinite(t)) problems.push_back("macro_times: must be positive");
  if (simulates(kind) && spec.replicas < 2)
    problems.push_back("replicas: at least 2 are needed for standard errors");
  if (kind == ExperimentKind::OracleSuite && spec.replicas < 1)
    problems.push_back("replicas: must be positive");

  auto k_constant = [&] {
    for (const auto& s : spec.sizes)
      if (s.second != spec.sizes.front().second) return false;
    return true;
  };

  switch (kind) {
    case ExperimentKind::Frozen:
      if (!spec.theta)
        problems.push_back("frozen: requires the subcritical time scale (set theta)");
      else if (!(*spec.theta < spec.beta - 1.0))
        problems.push_back("frozen: the frozen-profile limit needs theta < beta - 1 (theta = " +
                           format_double(*spec.theta) + ", beta - 1 = " +
                           format_double(spec.beta - 1.0) + ")");
      if (!k_constant()) problems.push_back("frozen: k must be the same for all sizes");
      break;
    case ExperimentKind::DiscreteHeat:
      if (spec.theta)
        problems.push_back("discrete-heat: the discrete heat limit uses the critical time scale");
      if (!k_constant()) problems.push_back("discrete-heat: k must be the same for all sizes");
      break;
    case ExperimentKind::ContinuousHeat:
      if (spec.theta)
        problems.push_back(
            "continuous-heat: the continuous heat limit uses the critical time scale");
      for (std::size_t i = 1; i < spec.sizes.size(); ++i)
        if (!(spec.sizes[i].second > spec.sizes[i - 1].second))
          problems.push_back("continuous-heat: k must increase strictly along sizes (k -> infinity)");
      break;
    case ExperimentKind::Mixing:
      if (!spec.theta)
        problems.push_back("mixing: box equilibration is stated on the subcritical time scale");
      break;
    case ExperimentKind::Replacement:
      if (spec.theta) problems.push_back("replacement: uses the critical time scale");
      break;
    case ExperimentKind::OracleSuite:
      for (const auto& [n, k] : spec.sizes)
        if (n * k > kMatrixSiteCap)
          problems.push_back("oracle-suite: nk <= " + std::to_string(kMatrixSiteCap) +
                             " required for exact enumeration");
      break;
    case ExperimentKind::AppendixSuite:
      break;
  }

  for (const auto& g : spec.test_functions) {
    try {
      (void)make_test_function(g);
    } catch (const std::exception& e) {
      problems.push_back(std::string("test_functions: ") + e.what());
    }
  }
  try {
    spec.make_profile().check_admissible();
  } catch (const std::exception& e) {
    problems.push_back(std::string("profile: ") + e.what());
  }

  if (simulates(kind) && problems.empty()) {
    for (const auto& [n, k] : spec.sizes) {
      const double projected = projected_events(spec, n, k);
      if (projected > static_cast<double>(spec.event_budget)) {
        std::ostringstream os;
        os << "event budget: size " << n << "x" << k << " projects " << projected
           << " events per replica, above the budget of " << spec.event_budget;
        problems.push_back(os.str());
      }
    }
  }
  return problems;
}

void require_valid(const ExperimentSpec& spec) {
  const auto problems = validate(spec);
  if (problems.empty()) return;
  std::string msg = "invalid experiment spec:";
  for (const auto& p : problems) msg += "\n  - " + p;
  throw ValidationError(msg);
}

double projected_events(const ExperimentSpec& spec, std::size_t n, std::size_t k) {
  const LatticeSpec lattice(n, k, spec.alpha, spec.beta);
  const double t_max = spec.macro_times.empty()
                           ? 0.0
                           : *std::max_element(spec.macro_times.begin(), spec.macro_times.end());
  return t_max * speedup_factor(lattice, spec.regime()) * lattice.total_rate();
}

bool TableRow::operator==(const TableRow& o) const {
  const bool theta_eq = theta.has_value() == o.theta.has_value() &&
                        (!theta || same_double(*theta, *o.theta));
  return experiment == o.experiment && name == o.name && n == o.n && k == o.k &&
         same_double(alpha, o.alpha) && same_double(beta, o.beta) && theta_eq &&
         same_double(macro_time, o.macro_time) && observable == o.observable &&
         box_or_mode == o.box_or_mode && same_double(simulated, o.simulated) &&
         same_double(reference, o.reference) && same_double(abs_error, o.abs_error) &&
         same_double(stderr_value, o.stderr_value) && seed == o.seed;
}

namespace {

// NaN cells are written empty.
std::string cell(double v) { return std::isnan(v) ? std::string{} : format_double(v); }
double parse_cell(const std::string& s) {
  return s.empty() ? std::numeric_limits<double>::quiet_NaN() : parse_double(s);
}

void check_text_field(const std::string& s) {
  if (s.find_first_of(",\n\"") != std::string::npos)
    throw UsageError("CSV text fields may not contain commas, quotes or newlines: " + s);
}

}  // namespace

void write_table_csv(std::ostream& out, const ConvergenceTable& table) {
  if (table.rows.empty()) throw UsageError("cannot emit an empty convergence table");
  out << kTableHeader << '\n';
  for (const auto& r : table.rows) {
    check_text_field(r.name);
    check_text_field(r.observable);
    check_text_field(r.box_or_mode);
    out << r.experiment << ',' << r.name << ',' << r.n << ',' << r.k << ',' << cell(r.alpha)
        << ',' << cell(r.beta) << ',' << optional_double(r.theta) << ',' << cell(r.macro_time)
        << ',' << r.observable << ',' << r.box_or_mode << ',' << cell(r.simulated) << ','
        << cell(r.reference) << ',' << cell(r.abs_error) << ',' << cell(r.stderr_value) << ','
        << r.seed << '\n';
  }
}

ConvergenceTable parse_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTableHeader)
    throw UsageError("convergence table: missing or wrong header");
  ConvergenceTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 15) throw UsageError("convergence table: expected 15 fields: " + line);
    TableRow r;
    r.experiment = f[0];
    r.name = f[1];
    r.n = std::stoull(f[2]);
    r.k = std::stoull(f[3]);
    r.alpha = parse_cell(f[4]);
    r.beta = parse_cell(f[5]);
    if (!f[6].empty()) r.theta = parse_double(f[6]);
    r.macro_time = parse_cell(f[7]);
    r.observable = f[8];
    r.box_or_mode = f[9];
    r.simulated = parse_cell(f[10]);
    r.reference = parse_cell(f[11]);
    r.abs_error = parse_cell(f[12]);
    r.stderr_value = parse_cell(f[13]);
    r.seed = std::stoull(f[14]);
    table.rows.push_back(std::move(r));
  }
  return table;
}

std::vector<SizeError> worst_errors(const ConvergenceTable& table,
                                    const std::string& observable_prefix) {
  std::vector<SizeError> out;
  for (const auto& r : table.rows) {
    if (std::isnan(r.abs_error)) continue;
    if (r.observable.compare(0, observable_prefix.size(), observable_prefix) != 0) continue;
    auto it = std::find_if(out.begin(), out.end(), [&](const SizeError& e) {
      return e.n == r.n && e.k == r.k && e.macro_time == r.macro_time;
    });
    if (it == out.end()) {
      out.push_back({r.n, r.k, r.macro_time, r.abs_error, r.stderr_value});
    } else if (r.abs_error > it->error) {
      it->error = r.abs_error;
      it->std_error = r.stderr_value;
    }
  }
  return out;
}

bool decreasing_trend(const std::vector<SizeError>& along) {
  if (along.size() < 2) return true;
  if (!(along.back().error <= along.front().error)) return false;
  for (std::size_t i = 1; i < along.size(); ++i) {
    const double se = std::hypot(along[i].std_error, along[i - 1].std_error);
    if (along[i].error > along[i - 1].error + 3.0 * se) return false;
  }
  return true;
}

Report oracle_agreement(const LatticeSpec& spec, const TimeScaleRegime& regime,
                        const Profile& gamma, double t, std::size_t replicas,
                        std::uint64_t base_seed) {
  require_matrix_cap(spec);
  if (replicas < 1) throw UsageError("oracle_agreement: replicas must be positive");
  const std::size_t states = std::size_t{1} << spec.sites();
  const std::size_t workers = thread_count();
  const std::size_t chunks = std::min<std::size_t>(replicas, 64);
  std::vector<std::vector<std::uint64_t>> partial(chunks, std::vector<std::uint64_t>(states, 0));
  const double speedup = speedup_factor(spec, regime);
  parallel_for(
      chunks,
      [&](std::size_t c) {
        const EdgeSampler sampler(spec);
        for (std::size_t r = c; r < replicas; r += chunks) {
          const std::uint64_t seed = derive_seed(base_seed, r);
          Rng init_rng(seed);
          SimState state = make_state(sample_initial(spec, gamma, init_rng), mix64(seed));
          advance_micro(state, sampler, t * speedup, kDefaultEventBudget, [](Site, double) {});
          ++partial[c][state.config.to_index()];
        }
      },
      workers);
  std::vector<double> empirical(states, 0.0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < states; ++i) empirical[i] += static_cast<double>(p[i]);
  for (double& v : empirical) v /= static_cast<double>(replicas);

  const DistributionVector mu0 = initial_product_measure(spec, gamma).to_distribution();
  const DistributionVector exact = evolve_master(spec, regime, mu0, t);
  double tv = 0.0;
  for (std::size_t i = 0; i < states; ++i) tv += std::abs(empirical[i] - exact[i]);
  tv *= 0.5;
  const double threshold =
      4.0 * std::sqrt(static_cast<double>(states) / static_cast<double>(replicas));

  Report r("oracle-agreement");
  r.add("nk", static_cast<double>(spec.sites()));
  r.add("t", t);
  r.add("replicas", static_cast<double>(replicas));
  r.add("total_variation", tv);
  r.add("threshold", threshold);
  r.add_check("within_threshold", tv <= threshold);
  return r;
}

Report adjoint_random_check(const LatticeSpec& spec, std::size_t trials, std::uint64_t seed) {
  Rng rng(mix64(seed ^ 0xad1u));
  double worst = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    const ProductMeasure nu(random_params(spec.sites(), rng));
    const auto a = adjoint_one_formula(spec, nu);
    const auto b = adjoint_one_matrix(spec, nu);
    for (std::size_t j = 0; j < a.size(); ++j) worst = std::max(worst, std::abs(a[j] - b[j]));
  }
  Report r("adjoint");
  r.add("trials", static_cast<double>(trials));
  r.add("max_abs_difference", worst);
  r.add_check("agree", worst <= 1e-9);
  return r;
}

Report oracle_suite(const ExperimentSpec& spec) {
  require_valid(spec);
  const Profile gamma = spec.make_profile();
  Report out("oracle-suite");
  std::vector<double> times = spec.macro_times;
  std::sort(times.begin(), times.end());
  const double theta = spec.theta.value_or(0.5);
  for (const auto& [n, k] : spec.sizes) {
    const LatticeSpec lattice(n, k, spec.alpha, spec.beta);
    const std::string size = std::to_string(n) + "x" + std::to_string(k);
    if (lattice.sites() <= kPairSiteCap) out.merge(size + ".invariance", invariance_check(lattice));
    out.merge(size + ".adjoint", adjoint_random_check(lattice, 20, spec.base_seed));
    out.merge(size + ".initial_entropy", initial_entropy_bound_check(lattice, gamma));
    for (double t : times) {
      const std::string at = size + ".t" + format_double(t);
      const TimeScaleRegime critical = Critical{};
      const TimeScaleRegime sub = make_subcritical(theta);
      out.merge(at + ".yau_critical",
                yau_inequality_check(lattice, critical, gamma, t, max_yau_dt(lattice, critical)));
      out.merge(at + ".yau_subcritical",
                yau_inequality_check(lattice, sub, gamma, t, max_yau_dt(lattice, sub)));
      out.merge(at + ".decomposition", entropy_production_decomposition(lattice, gamma, t));
      out.merge(at + ".agreement",
                oracle_agreement(lattice, critical, gamma, t, spec.replicas, spec.base_seed));
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  require_valid(spec);
  ExperimentResult result;
  result.checks = Report(spec.name());
  switch (spec.kind) {
    case ExperimentKind::Frozen:
    case ExperimentKind::DiscreteHeat:
      run_box_experiment(spec, result.table);
      assess_convergence(spec, result.table, result.checks);
      break;
    case ExperimentKind::ContinuousHeat:
      run_pairing_experiment(spec, result.table);
      assess_convergence(spec, result.table, result.checks);
      break;
    case ExperimentKind::Mixing:
    case ExperimentKind::Replacement:
      run_statistic_experiment(spec, result.table);
      assess_convergence(spec, result.table, result.checks);
      break;
    case ExperimentKind::OracleSuite:
      result.checks = oracle_suite(spec);
      suite_rows(spec, result.checks, result.table);
      break;
    case ExperimentKind::AppendixSuite:
      result.checks = appendix_suite(spec.base_seed);
      suite_rows(spec, result.checks, result.table);
      break;
  }
  return result;
}

void emit(const ConvergenceTable& table, const std::filesystem::path& csv_path,
          const std::optional<std::filesystem::path>& plot_path) {
  if (table.rows.empty()) throw UsageError("cannot emit an empty convergence table");
  {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
    write_table_csv(out, table);
    if (!out) throw IoError("write to " + csv_path.string() + " failed");
  }
  if (plot_path) {
    std::ofstream out(*plot_path);
    if (!out) throw IoError("cannot open " + plot_path->string() + " for writing");
    write_error_plot_svg(out, table);
    if (!out) throw IoError("write to " + plot_path->string() + " failed");
  }
}

}  // namespace slowbond
