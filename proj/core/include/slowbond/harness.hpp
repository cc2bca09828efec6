#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowbond/lattice.hpp"
#include "slowbond/profiles.hpp"
#include "slowbond/report.hpp"
#include "slowbond/simulator.hpp"

namespace slowbond {

enum class ExperimentKind {
  Mixing,
  Frozen,
  DiscreteHeat,
  ContinuousHeat,
  Replacement,
  OracleSuite,
  AppendixSuite,
};

std::string to_string(ExperimentKind kind);
/// Accepts the names used in config files, e.g. "discrete-heat".
ExperimentKind parse_experiment_kind(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Frozen;
  std::string label;  // free-form; CSV "name" column, defaults to the kind
  std::vector<std::pair<std::size_t, std::size_t>> sizes;  // (n, k)
  std::optional<double> theta;  // set: subcritical; unset: critical
  double alpha = 1.0;
  double beta = 1.5;
  std::string profile = "sine";
  std::map<std::string, double> profile_params;
  std::vector<double> macro_times{0.01, 0.05, 0.1};
  std::size_t replicas = 200;
  std::uint64_t base_seed = 1;
  std::vector<std::string> test_functions{"sin(2pi u)"};
  std::uint64_t event_budget = kDefaultEventBudget;
  /// Bias tolerance for the largest-size error check.
  double tolerance = 0.02;
  bool plot = false;

  TimeScaleRegime regime() const;
  Profile make_profile() const;
  std::string name() const { return label.empty() ? to_string(kind) : label; }
};

/// Every violated hypothesis, one message each; empty when valid.
std::vector<std::string> validate(const ExperimentSpec& spec);
/// Throws ValidationError listing all diagnostics.
void require_valid(const ExperimentSpec& spec);

/// Events per replica projected for a size: t_max * speedup * total rate.
double projected_events(const ExperimentSpec& spec, std::size_t n, std::size_t k);

struct TableRow {
  std::string experiment;
  std::string name;
  std::size_t n = 0;
  std::size_t k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> theta;
  double macro_time = 0.0;
  std::string observable;
  std::string box_or_mode;
  double simulated = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double stderr_value = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const TableRow& other) const;
};

struct ConvergenceTable {
  std::vector<TableRow> rows;
  bool operator==(const ConvergenceTable& other) const { return rows == other.rows; }
};

inline constexpr const char* kTableHeader =
    "experiment,name,n,k,alpha,beta,theta,macro_time,observable,box_or_mode,simulated,"
    "reference,abs_error,stderr,seed";

/// Writes the header and one line per row; UsageError on an empty table.
void write_table_csv(std::ostream& out, const ConvergenceTable& table);
ConvergenceTable parse_table_csv(std::istream& in);

/// Worst error per (n, k, macro_time) with the stderr of the worst row.
struct SizeError {
  std::size_t n = 0;
  std::size_t k = 0;
  double macro_time = 0.0;
  double error = 0.0;
  double std_error = 0.0;
};
std::vector<SizeError> worst_errors(const ConvergenceTable& table,
                                    const std::string& observable_prefix = "");

/// Error at the last size versus the first: last <= first, and every
/// consecutive pair is non-increasing up to 3 combined standard errors.
bool decreasing_trend(const std::vector<SizeError>& along_sizes);

struct ExperimentResult {
  ConvergenceTable table;
  Report checks;
};

/// Runs the experiment and evaluates its pass conditions. Throws
/// ValidationError before any simulation when the spec is invalid.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Simulated configuration frequencies from `replicas` independent runs
/// against the exact master equation, in total variation. The threshold is
/// 4 sqrt(2^(nk) / R).
Report oracle_agreement(const LatticeSpec& spec, const TimeScaleRegime& regime,
                        const Profile& gamma, double t, std::size_t replicas,
                        std::uint64_t base_seed);

/// Adjoint formula versus matrix for `trials` random product measures.
Report adjoint_random_check(const LatticeSpec& spec, std::size_t trials, std::uint64_t seed);

/// Invariance, adjoint, initial entropy, Yau inequality in both regimes,
/// entropy production decomposition and simulator agreement per size.
Report oracle_suite(const ExperimentSpec& spec);

/// CSV always; SVG plot next to it when spec.plot is set. IoError if a
/// file cannot be written.
void emit(const ConvergenceTable& table, const std::filesystem::path& csv_path,
          const std::optional<std::filesystem::path>& plot_path);

/// Error-vs-n plot on log axes, one series per macro time.
void write_error_plot_svg(std::ostream& out, const ConvergenceTable& table);

/// Key-value config ("key = value", '#' comments, comma-separated lists,
/// sizes as "8x2, 16x2", profile parameters as "profile.amplitude = 0.25").
ExperimentSpec parse_experiment_config(std::istream& in);
ExperimentSpec load_experiment_config(const std::filesystem::path& path);

}  // namespace slowbond
