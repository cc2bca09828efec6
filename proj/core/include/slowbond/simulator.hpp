#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "slowbond/errors.hpp"
#include "slowbond/lattice.hpp"
#include "slowbond/profiles.hpp"
#include "slowbond/rng.hpp"

namespace slowbond {

/// k^2 n^(2+theta) (subcritical) or k^2 n^(1+beta) (critical).
double speedup_factor(const LatticeSpec& spec, const TimeScaleRegime& regime);

/// Two-class edge selection: slow vs normal class by total weight, then
/// uniform within the class. The total rate is configuration independent.
class EdgeSampler {
 public:
  explicit EdgeSampler(const LatticeSpec& spec);

  double total_rate() const { return total_rate_; }
  double slow_probability() const { return p_slow_; }

  /// Maps u in [0,1) to a bond index with probability xi_{x,x+1} / total.
  Site sample(double u) const {
    if (u < p_slow_) {
      std::size_t j = static_cast<std::size_t>(u * inv_p_slow_k_);
      if (j >= k_) j = k_ - 1;
      return j * n_ + (n_ - 1);
    }
    const double t = (u - p_slow_) * inv_p_normal_k_;
    std::size_t box = static_cast<std::size_t>(t);
    if (box >= k_) box = k_ - 1;
    std::size_t offset = static_cast<std::size_t>((t - static_cast<double>(box)) * nm1_);
    if (offset >= n_ - 1) offset = n_ - 2;
    return box * n_ + offset;
  }

 private:
  std::size_t n_;
  std::size_t k_;
  double total_rate_;
  double p_slow_;
  double inv_p_slow_k_;    // k / p_slow
  double inv_p_normal_k_;  // k / (1 - p_slow)
  double nm1_;             // n - 1
};

struct SimState {
  Configuration config;
  double micro_time = 0.0;  // unaccelerated clock
  Rng rng;
  std::uint64_t events = 0;
  std::uint64_t seed = 0;  // identifies the run in diagnostics
};

SimState make_state(Configuration initial, std::uint64_t seed);

struct EventRecord {
  Site edge;
  bool changed;
  double holding_time;
};

/// Default per-replica event cap (2^33).
inline constexpr std::uint64_t kDefaultEventBudget = std::uint64_t{1} << 33;

/// One exact Gillespie step: exponential holding time at the total rate,
/// then a bond chosen proportionally to its conductance, then the swap.
EventRecord step(SimState& state, const EdgeSampler& sampler);

[[noreturn]] void throw_budget_exceeded(const SimState& state, std::uint64_t budget);

/// Interval (a power of two) between particle-conservation audits.
inline constexpr std::uint64_t kConservationAuditMask = (std::uint64_t{1} << 20) - 1;

/// Recounts the particles; throws ConsistencyError if the cached count
/// disagrees.
void audit_conservation(const SimState& state);

/// Advances to micro time `target`. A holding time that would cross the
/// target is discarded (memorylessness keeps this exact) and the clock is
/// set to the target. on_swap(x, time) runs after every swap that changed
/// the configuration.
template <class OnSwap>
void advance_micro(SimState& state, const EdgeSampler& sampler, double target,
                   std::uint64_t budget, OnSwap&& on_swap) {
  const double inv_rate = 1.0 / sampler.total_rate();
  while (true) {
    const double h = -std::log1p(-uniform01(state.rng)) * inv_rate;
    if (state.micro_time + h >= target) {
      state.micro_time = std::max(state.micro_time, target);
      return;
    }
    state.micro_time += h;
    if (++state.events > budget) throw_budget_exceeded(state, budget);
    if ((state.events & kConservationAuditMask) == 0) audit_conservation(state);
    const Site x = sampler.sample(uniform01(state.rng));
    if (state.config.swap_in_place(x)) on_swap(x, state.micro_time);
  }
}

/// Runs the accelerated process until macro time macro_t, i.e. micro time
/// macro_t * speedup. Throws UsageError if macro_t lies in the past and
/// ResourceError when the event budget is exhausted.
void run_until(SimState& state, const LatticeSpec& spec, const TimeScaleRegime& regime,
               double macro_t, std::uint64_t budget = kDefaultEventBudget);

/// Independent Bernoulli(gamma(x/nk)) occupations.
Configuration sample_initial(const LatticeSpec& spec, const Profile& gamma, Rng& rng);

struct ReplicaPlan {
  std::size_t replicas = 200;
  std::uint64_t base_seed = 1;
  std::vector<double> macro_times;
  TimeScaleRegime regime = Critical{};
  std::uint64_t event_budget = kDefaultEventBudget;

  void validate() const;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::vector<double> samples;  // one per replica, replica order
};

/// Mean and standard error (sample sd / sqrt(R)); stderr is 0 when R < 2.
Estimate summarize(std::vector<double> samples);

/// Box averages per (replica, macro time, box) for the plan's macro times.
struct BoxAverageRun {
  std::vector<double> macro_times;
  std::size_t k = 0;
  // values[r][j][i]: replica r, time j, box i
  std::vector<std::vector<std::vector<double>>> values;
  std::vector<std::uint64_t> events;  // per replica

  /// Mean and stderr of box i at time index j over replicas.
  Estimate box_estimate(std::size_t j, std::size_t i) const;
  /// <pi_t, G> per replica at time index j.
  std::vector<double> pairing_samples(std::size_t j, const TestFunction& G) const;

  /// CSV "replica,macro_time,box_index,box_average".
  void write_csv(std::ostream& out) const;
};

/// One replica: sample the initial configuration from gamma, then record
/// box averages at each macro time.
std::vector<std::vector<double>> simulate_box_averages(const LatticeSpec& spec,
                                                       const ReplicaPlan& plan,
                                                       const Profile& gamma,
                                                       std::size_t replica,
                                                       std::uint64_t* events = nullptr);

BoxAverageRun run_box_averages(const LatticeSpec& spec, const ReplicaPlan& plan,
                               const Profile& gamma);

/// Site weights c_x such that the statistic integrand is sum_x c_x eta(x).
/// Mixing: c_x = (G(x/nk) - mean of G over the box) / (nk).
std::vector<double> mixing_weights(const LatticeSpec& spec, const TestFunction& G);
/// Replacement: c_x = k G(i/k) (1{x = left end} + 1{x = right end} - 2/n).
std::vector<double> replacement_weights(const LatticeSpec& spec, const TestFunction& G);

/// int_0^t sum_x c_x eta_s(x) ds (signed) along one trajectory, integrated exactly
/// between jumps. Integrals are accumulated from vacancy times, which is
/// exact on the full configuration because each box's weights sum to zero.
double integrated_statistic(const LatticeSpec& spec, const TimeScaleRegime& regime,
                            const std::vector<double>& weights, SimState& state,
                            double macro_t, std::uint64_t budget);

/// Monte Carlo estimate of E|int_0^t (1/nk) sum_i sum_{x in box i}
/// G(x/nk)(eta_s(x) - box average) ds|. Requires a subcritical plan.
Estimate mixing_statistic(const ReplicaPlan& plan, const LatticeSpec& spec,
                          const Profile& gamma, const TestFunction& G, double t);

/// Monte Carlo estimate of E|int_0^t k sum_i G(i/k)(eta_s(left_i) +
/// eta_s(right_i) - 2 * box average) ds|. Requires a critical plan.
Estimate replacement_statistic(const ReplicaPlan& plan, const LatticeSpec& spec,
                               const Profile& gamma, const TestFunction& G, double t);

/// Aggregated CSV "statistic,estimate,stderr,n,k,regime,seed" (header
/// included when `header` is true).
void write_statistic_csv(std::ostream& out, const std::string& statistic, const Estimate& e,
                         const LatticeSpec& spec, const TimeScaleRegime& regime,
                         std::uint64_t seed, bool header);

std::string regime_label(const TimeScaleRegime& regime);

}  // namespace slowbond
